//! Scaling experiments: optimal window cutoffs versus order and fits of
//! their asymptotic forms.

use std::collections::BTreeMap;
use std::io::Write;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::evolution::{evolve_model, EvolveOptions};
use crate::ed::{DenseModel, Sector};
use crate::fit::{fit_inverse, optimal_zeta_table, FitMode, ZetaScan};
use crate::free_fermion;
use crate::integrate::StepControl;
use crate::models::{omega_max, ModelSpec, Schedule};
use crate::optimize::{maximize_log, ScanOptions};
use crate::protocol::{Protocol, VariationalEnsemble};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScalingPoint {
    pub ell: usize,
    /// The optimized parameter: `zeta*` or `Omega*`.
    pub value: f64,
    /// Objective at the optimum: `log F / N` or `F`.
    pub objective: f64,
    pub model: String,
    pub wall_time: f64,
}

/// Optimal `zeta(ell)`, read-only once built.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct ZetaTable {
    entries: BTreeMap<usize, f64>,
}

impl ZetaTable {
    pub fn from_points(points: &[ScalingPoint]) -> Self {
        ZetaTable { entries: points.iter().map(|p| (p.ell, p.value)).collect() }
    }

    pub fn from_pairs(pairs: impl IntoIterator<Item = (usize, f64)>) -> Self {
        ZetaTable { entries: pairs.into_iter().collect() }
    }

    pub fn zeta(&self, ell: usize) -> Result<f64> {
        self.entries
            .get(&ell)
            .copied()
            .ok_or_else(|| Error::invalid(format!("zeta table has no entry for ell = {ell}")))
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, f64)> + '_ {
        self.entries.iter().map(|(k, v)| (*k, *v))
    }

    /// CSV `ell,zeta`.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv_writer(out);
        w.write_record(["ell", "zeta"])?;
        for (l, z) in self.iter() {
            w.write_record([l.to_string(), z.to_string()])?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn read_csv<R: std::io::Read>(input: R) -> Result<Self> {
        let mut r = csv::Reader::from_reader(input);
        let mut entries = BTreeMap::new();
        for rec in r.records() {
            let rec = rec?;
            let parse_err = |what: &str| Error::invalid(format!("bad {what} in zeta table row {:?}", rec.position()));
            let ell: usize = rec.get(0).and_then(|s| s.trim().parse().ok()).ok_or_else(|| parse_err("ell"))?;
            let zeta: f64 = rec.get(1).and_then(|s| s.trim().parse().ok()).ok_or_else(|| parse_err("zeta"))?;
            entries.insert(ell, zeta);
        }
        Ok(ZetaTable { entries })
    }
}

pub(crate) fn csv_writer<W: Write>(out: W) -> csv::Writer<W> {
    csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(out)
}

/// Fidelity density of the clean chain under the universal protocol.
pub fn tfi_density(
    spec: &ModelSpec,
    n_modes: usize,
    schedule: &Schedule,
    ell: usize,
    zeta: f64,
    omega: f64,
    mode: FitMode,
    control: StepControl,
) -> Result<f64> {
    let p = Protocol::universal(fit_inverse::<f64>(ell, zeta, mode)?, omega)?;
    Ok(free_fermion::anneal(spec, n_modes, schedule, &p, control)?.fidelity.density)
}

/// `zeta*(ell)` maximizing the fidelity density of a free-fermion chain at
/// `Omega = Omega_max`.
pub fn optimize_mu_tfi(
    spec: &ModelSpec,
    ells: &[usize],
    n_modes: usize,
    schedule: &Schedule,
    scan: &ZetaScan,
    control: StepControl,
) -> Result<Vec<ScalingPoint>> {
    optimize_mu_tfi_mode(spec, ells, n_modes, schedule, scan, FitMode::Cost, control)
}

/// [`optimize_mu_tfi`] for either fit mode.
pub fn optimize_mu_tfi_mode(
    spec: &ModelSpec,
    ells: &[usize],
    n_modes: usize,
    schedule: &Schedule,
    scan: &ZetaScan,
    mode: FitMode,
    control: StepControl,
) -> Result<Vec<ScalingPoint>> {
    let omega = omega_max(spec, None)?;
    ells.par_iter()
        .map(|&ell| {
            let start = Instant::now();
            let row = optimal_zeta_table(
                &[ell],
                |l, z| tfi_density(spec, n_modes, schedule, l, z, omega, mode, control),
                scan,
            )?[0];
            Ok(ScalingPoint {
                ell,
                value: row.zeta,
                objective: row.score,
                model: spec.name.to_string(),
                wall_time: start.elapsed().as_secs_f64(),
            })
        })
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OmegaScan {
    pub lo: f64,
    pub hi: f64,
    pub points: usize,
    pub rel_tol: f64,
}

impl Default for OmegaScan {
    fn default() -> Self {
        OmegaScan { lo: 1.0, hi: 40.0, points: 24, rel_tol: 1e-3 }
    }
}

/// Maximizes `objective` over `Omega`; an optimum on the edge of the bracket
/// triggers one retry on a bracket widened by 4 on both sides.
fn scan_omega(objective: impl Fn(f64) -> Result<f64>, scan: &OmegaScan) -> Result<(f64, f64)> {
    let opts = ScanOptions { lo: scan.lo, hi: scan.hi, points: scan.points, rel_tol: scan.rel_tol };
    let first = maximize_log(&objective, &opts, "Omega")?;
    if !first.at_edge {
        return Ok((first.x, first.value));
    }
    let wide = ScanOptions { lo: scan.lo / 4.0, hi: scan.hi * 4.0, points: scan.points + 8, ..opts };
    log::info!("Omega* on the edge of [{}, {}]; retrying on [{}, {}]", scan.lo, scan.hi, wide.lo, wide.hi);
    let second = maximize_log(&objective, &wide, "Omega")?;
    if second.at_edge {
        return Err(Error::numerical(format!(
            "Omega* = {:.4} stays on the edge of the widened bracket [{}, {}]",
            second.x, wide.lo, wide.hi
        )));
    }
    Ok((second.x, second.value))
}

/// Settings shared by the interacting-model experiments.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentOptions {
    #[serde(default)]
    pub scan: OmegaScan,
    #[serde(default)]
    pub evolve: EvolveOptions,
    /// Momentum modes for free-fermion models; `None` means `N / 2`.
    #[serde(default)]
    pub n_modes: Option<usize>,
    /// Ensemble of the variational baseline.
    #[serde(default)]
    pub variational_ensemble: VariationalEnsemble,
}

impl Default for ExperimentOptions {
    fn default() -> Self {
        ExperimentOptions {
            scan: OmegaScan::default(),
            evolve: EvolveOptions::default(),
            n_modes: None,
            variational_ensemble: VariationalEnsemble::default(),
        }
    }
}

/// Final-state score of a protocol: `F` on the exact-diagonalization backend,
/// `log F / N` on the free-fermion one.
pub struct Scorer<'a> {
    spec: &'a ModelSpec,
    schedule: &'a Schedule,
    opts: &'a ExperimentOptions,
    model: Option<DenseModel>,
    // Only the final overlap is scored.
    evolve: EvolveOptions,
}

impl<'a> Scorer<'a> {
    pub fn new(spec: &'a ModelSpec, schedule: &'a Schedule, opts: &'a ExperimentOptions) -> Result<Self> {
        let model = if spec.name.is_free_fermion() {
            None
        } else {
            let sector = opts.evolve.sector.unwrap_or_else(|| Sector::ground_state(spec));
            Some(DenseModel::new(spec, sector, opts.evolve.dense_limit)?)
        };
        let evolve = EvolveOptions { samples: 2, ..opts.evolve.clone() };
        Ok(Scorer { spec, schedule, opts, model, evolve })
    }

    pub fn score(&self, protocol: &Protocol) -> Result<f64> {
        match &self.model {
            Some(m) => match evolve_model(m, self.schedule, protocol, &self.evolve) {
                Ok(r) => Ok(r.final_fidelity),
                // Past the rotation budget a point counts as infeasible.
                Err(Error::Resource(msg)) => {
                    log::debug!("{} skipped: {msg}", protocol.name());
                    Ok(f64::NAN)
                }
                Err(e) => Err(e),
            },
            None => {
                let modes = match self.opts.n_modes {
                    Some(m) => m,
                    None => free_fermion::default_modes(self.spec)?,
                };
                let control = match self.opts.evolve.control {
                    StepControl::Adaptive { .. } => free_fermion::default_block_control(),
                    fixed => fixed,
                };
                match free_fermion::anneal(self.spec, modes, self.schedule, protocol, control) {
                    Ok(r) => Ok(r.fidelity.density),
                    Err(Error::Resource(msg)) => {
                        log::debug!("{} skipped: {msg}", protocol.name());
                        Ok(f64::NAN)
                    }
                    Err(e) => Err(e),
                }
            }
        }
    }
}

/// `Omega*(ell)` at fixed `zeta(ell)`.
pub fn optimize_omega(
    spec: &ModelSpec,
    ells: &[usize],
    zeta_table: &ZetaTable,
    schedule: &Schedule,
    opts: &ExperimentOptions,
) -> Result<Vec<ScalingPoint>> {
    optimize_omega_mode(spec, ells, zeta_table, schedule, opts, FitMode::Cost)
}

pub fn optimize_omega_mode(
    spec: &ModelSpec,
    ells: &[usize],
    zeta_table: &ZetaTable,
    schedule: &Schedule,
    opts: &ExperimentOptions,
    mode: FitMode,
) -> Result<Vec<ScalingPoint>> {
    let scorer = Scorer::new(spec, schedule, opts)?;
    ells.par_iter()
        .map(|&ell| {
            let start = Instant::now();
            let fit = fit_inverse::<f64>(ell, zeta_table.zeta(ell)?, mode)?;
            let (omega, f) = scan_omega(|om| scorer.score(&Protocol::universal(fit.clone(), om)?), &opts.scan)?;
            Ok(ScalingPoint {
                ell,
                value: omega,
                objective: f,
                model: spec.name.to_string(),
                wall_time: start.elapsed().as_secs_f64(),
            })
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CostActionRow {
    pub ell: usize,
    pub zeta: f64,
    pub zeta_action: f64,
    pub omega_cost: f64,
    pub f_cost: f64,
    pub omega_action: f64,
    pub f_action: f64,
    pub mu_variational: f64,
    pub f_variational: f64,
}

/// Range scanned for the variational regulator `mu`.
pub const VARIATIONAL_MU_SCAN: ScanOptions = ScanOptions { lo: 1e-3, hi: 10.0, points: 13, rel_tol: 1e-3 };

/// Per order: the COST and ACTION universal protocols, each with its own
/// clean-chain `zeta` table and its own `Omega*`, and the variational
/// protocol with its own `mu*`.
pub fn compare_cost_action(
    spec: &ModelSpec,
    ells: &[usize],
    cost_table: &ZetaTable,
    action_table: &ZetaTable,
    schedule: &Schedule,
    opts: &ExperimentOptions,
) -> Result<Vec<CostActionRow>> {
    let scorer = Scorer::new(spec, schedule, opts)?;
    ells.par_iter()
        .map(|&ell| {
            let zeta = cost_table.zeta(ell)?;
            let zeta_action = action_table.zeta(ell)?;
            let best = |mode, z| -> Result<(f64, f64)> {
                let fit = fit_inverse::<f64>(ell, z, mode)?;
                scan_omega(|om| scorer.score(&Protocol::universal(fit.clone(), om)?), &opts.scan)
            };
            let (omega_cost, f_cost) = best(FitMode::Cost, zeta)?;
            let (omega_action, f_action) = best(FitMode::Action, zeta_action)?;
            let var = maximize_log(|mu| scorer.score(&Protocol::variational(ell, mu, opts.variational_ensemble)), &VARIATIONAL_MU_SCAN, "mu")?;
            Ok(CostActionRow {
                ell,
                zeta,
                zeta_action,
                omega_cost,
                f_cost,
                omega_action,
                f_action,
                mu_variational: var.x,
                f_variational: var.value,
            })
        })
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum AsymptoteForm {
    /// `y = (C log ell + b) / ell`: regression of `y ell` on `log ell`.
    LoglOverL,
    /// `y = a ell + b`.
    Linear,
    /// `y = a ell^p`, fitted in log-log coordinates.
    Power,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AsymptoteFit {
    pub form: AsymptoteForm,
    /// `[C, b]`, `[a, b]` or `[a, p]`.
    pub params: [f64; 2],
    /// Coefficient of determination in the original coordinates, clipped at 0.
    pub r2: f64,
    pub range: [f64; 2],
    pub points: usize,
}

impl AsymptoteFit {
    pub fn predict(&self, ell: f64) -> f64 {
        let [a, b] = self.params;
        match self.form {
            AsymptoteForm::LoglOverL => (a * ell.ln() + b) / ell,
            AsymptoteForm::Linear => a * ell + b,
            AsymptoteForm::Power => a * ell.powf(b),
        }
    }
}

/// Ordinary least squares `y = slope x + intercept`.
fn regress(x: &[f64], y: &[f64]) -> (f64, f64) {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx) * (a - mx)).sum();
    let slope = sxy / sxx;
    (slope, my - slope * mx)
}

/// Coefficient of determination of `pred` against `y`.
pub fn r_squared(y: &[f64], pred: &[f64]) -> f64 {
    let my = y.iter().sum::<f64>() / y.len() as f64;
    let ss_tot: f64 = y.iter().map(|v| (v - my).powi(2)).sum();
    let ss_res: f64 = y.iter().zip(pred).map(|(a, b)| (a - b).powi(2)).sum();
    if ss_tot == 0.0 {
        return if ss_res == 0.0 { 1.0 } else { 0.0 };
    }
    (1.0 - ss_res / ss_tot).clamp(0.0, 1.0)
}

/// Fits `form` to the `(ell, y)` pairs with `ell` in `range` (inclusive).
pub fn fit_asymptote(points: &[(f64, f64)], form: AsymptoteForm, range: [f64; 2]) -> Result<AsymptoteFit> {
    let sel: Vec<(f64, f64)> = points.iter().copied().filter(|(l, _)| *l >= range[0] && *l <= range[1]).collect();
    if sel.len() < 4 {
        return Err(Error::invalid(format!(
            "asymptote fit needs at least 4 points in [{}, {}], got {}",
            range[0],
            range[1],
            sel.len()
        )));
    }
    let ells: Vec<f64> = sel.iter().map(|p| p.0).collect();
    let ys: Vec<f64> = sel.iter().map(|p| p.1).collect();
    let params = match form {
        AsymptoteForm::LoglOverL => {
            let x: Vec<f64> = ells.iter().map(|l| l.ln()).collect();
            let y: Vec<f64> = sel.iter().map(|(l, v)| l * v).collect();
            let (c, b) = regress(&x, &y);
            [c, b]
        }
        AsymptoteForm::Linear => {
            let (a, b) = regress(&ells, &ys);
            [a, b]
        }
        AsymptoteForm::Power => {
            if ys.iter().any(|v| *v <= 0.0) || ells.iter().any(|l| *l <= 0.0) {
                return Err(Error::invalid("power-law fit needs positive data"));
            }
            let x: Vec<f64> = ells.iter().map(|l| l.ln()).collect();
            let y: Vec<f64> = ys.iter().map(|v| v.ln()).collect();
            let (p, ln_a) = regress(&x, &y);
            [ln_a.exp(), p]
        }
    };
    let mut fit = AsymptoteFit { form, params, r2: 0.0, range, points: sel.len() };
    let pred: Vec<f64> = ells.iter().map(|l| fit.predict(*l)).collect();
    fit.r2 = r_squared(&ys, &pred);
    Ok(fit)
}

/// `ell,value,objective`; wall times are left out so that tables are
/// reproducible byte for byte.
pub fn write_points_csv<W: Write>(out: W, value_name: &str, objective_name: &str, points: &[ScalingPoint]) -> Result<()> {
    let mut w = csv_writer(out);
    w.write_record(["ell", value_name, objective_name])?;
    let mut sorted: Vec<&ScalingPoint> = points.iter().collect();
    sorted.sort_by_key(|p| p.ell);
    for p in sorted {
        w.write_record([p.ell.to_string(), p.value.to_string(), p.objective.to_string()])?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_cost_action_csv<W: Write>(out: W, rows: &[CostActionRow]) -> Result<()> {
    let mut w = csv_writer(out);
    w.write_record([
        "ell",
        "f_cost",
        "f_action",
        "f_variational",
        "zeta_cost",
        "zeta_action",
        "omega_cost",
        "omega_action",
        "mu_variational",
    ])?;
    for r in rows {
        w.write_record([
            r.ell.to_string(),
            r.f_cost.to_string(),
            r.f_action.to_string(),
            r.f_variational.to_string(),
            r.zeta.to_string(),
            r.zeta_action.to_string(),
            r.omega_cost.to_string(),
            r.omega_action.to_string(),
            r.mu_variational.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn recovers_log_over_l() {
        let pts: Vec<(f64, f64)> = [4.0, 8.0, 16.0, 32.0, 64.0].iter().map(|&l: &f64| (l, 3.0 * l.ln() / l)).collect();
        let f = fit_asymptote(&pts, AsymptoteForm::LoglOverL, [1.0, 100.0]).unwrap();
        assert!((f.params[0] - 3.0).abs() < 1e-12 && f.params[1].abs() < 1e-12);
        assert!((f.r2 - 1.0).abs() < 1e-12);
    }

    #[test]
    fn recovers_power_and_line() {
        let pts: Vec<(f64, f64)> = (2..=10).map(|l| (l as f64, 2.0 * (l as f64).sqrt())).collect();
        let f = fit_asymptote(&pts, AsymptoteForm::Power, [2.0, 10.0]).unwrap();
        assert!((f.params[1] - 0.5).abs() < 1e-12 && (f.params[0] - 2.0).abs() < 1e-12);
        let lin: Vec<(f64, f64)> = (2..=10).map(|l| (l as f64, 1.5 * l as f64 - 2.0)).collect();
        let f = fit_asymptote(&lin, AsymptoteForm::Linear, [2.0, 10.0]).unwrap();
        assert!((f.params[0] - 1.5).abs() < 1e-12 && (f.r2 - 1.0).abs() < 1e-12);
    }

    #[test]
    fn too_few_points() {
        let pts = [(1.0, 1.0), (2.0, 2.0), (3.0, 3.0), (40.0, 1.0)];
        assert!(fit_asymptote(&pts, AsymptoteForm::Linear, [1.0, 10.0]).is_err());
    }

    #[test]
    fn zeta_table_roundtrip() {
        let t = ZetaTable::from_pairs([(2, 0.19), (4, 0.12)]);
        let mut buf = Vec::new();
        t.write_csv(&mut buf).unwrap();
        assert_eq!(String::from_utf8(buf.clone()).unwrap(), "ell,zeta\n2,0.19\n4,0.12\n");
        assert_eq!(ZetaTable::read_csv(&buf[..]).unwrap(), t);
        assert!(t.zeta(3).is_err());
    }
}
