//! Universal gauge potentials from the Liouvillian Chebyshev recursion, and
//! many-body counterdiabatic anneals on the exact-diagonalization backend.
//!
//! With `L = [H/Omega, .]` and `O_0 = dH/Omega`,
//! `O_1 = L O_0`, `O_{n+1} = 2 L O_n - O_{n-1}`, so that
//! `O_n = T_n(L) O_0` and `A = i sum_k beta_k O_{2k-1}`. In the eigenbasis of
//! `H` this is `A_mn = i sum_k beta_k T_{2k-1}(omega_mn/Omega) M_mn / Omega`.

use std::io::Write;

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::ed::{DenseModel, Sector};
use crate::error::{Error, Result};
use crate::fit::{ChebFit, FitMode};
use crate::integrate::{propagate, DenseStepper, StepControl, StepStats};
use crate::models::{dlambda_h, hamiltonian, ModelSpec, Schedule};
use crate::pauli::{PauliOperator, DEFAULT_DENSE_LIMIT};
use crate::protocol::{Protocol, VariationalEnsemble};
use crate::spectral::{
    diagonalize_model, variational_from_lines_ridge, Ensemble, SpectralData, VARIATIONAL_RANK_TOL, VARIATIONAL_RIDGE,
};
use crate::C64;

/// Default cap on Pauli strings held by the symbolic recursion.
pub const DEFAULT_TERM_CAP: usize = 2_000_000;
pub const DEFAULT_KNOTS: usize = 64;
pub const DEFAULT_SAMPLES: usize = 33;

#[derive(Clone, Debug)]
pub enum AgpRepr {
    Pauli(PauliOperator<f64>),
    /// Full computational-basis matrix.
    Dense(DMatrix<C64>),
}

#[derive(Clone, Debug)]
pub struct AgpOperator {
    pub repr: AgpRepr,
    pub omega: f64,
    pub fit: ChebFit<f64>,
    pub n_sites: usize,
}

impl AgpOperator {
    pub fn order(&self) -> usize {
        self.fit.order()
    }

    pub fn to_dense(&self) -> Result<DMatrix<C64>> {
        match &self.repr {
            AgpRepr::Pauli(op) => op.to_dense(self.n_sites),
            AgpRepr::Dense(m) => Ok(m.clone()),
        }
    }

    pub fn is_symbolic(&self) -> bool {
        matches!(self.repr, AgpRepr::Pauli(_))
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AgpBuild {
    pub term_cap: usize,
    pub dense_limit: usize,
}

impl Default for AgpBuild {
    fn default() -> Self {
        AgpBuild { term_cap: DEFAULT_TERM_CAP, dense_limit: DEFAULT_DENSE_LIMIT }
    }
}

/// `i sum_k beta_k O_{2k-1}` on Pauli operators, or `None` once an
/// intermediate operator exceeds `term_cap` strings.
pub fn universal_agp_pauli(
    h: &PauliOperator<f64>,
    dh: &PauliOperator<f64>,
    betas: &[f64],
    omega: f64,
    term_cap: usize,
) -> Option<PauliOperator<f64>> {
    let hs = h.scale_real(1.0 / omega);
    let lio = |o: &PauliOperator<f64>| hs.commutator(o);
    let mut prev = dh.scale_real(1.0 / omega);
    let mut cur = lio(&prev);
    let mut acc = cur.scale(C64::new(0.0, betas[0]));
    for &beta in &betas[1..] {
        let even = lio(&cur).scale_real(2.0).sub(&prev);
        let odd = lio(&even).scale_real(2.0).sub(&cur);
        if even.len().max(odd.len()) > term_cap {
            return None;
        }
        prev = even;
        cur = odd;
        acc = acc.axpy(C64::new(0.0, beta), &cur);
    }
    Some(acc)
}

/// The same recursion on dense matrices; valid in any basis, including
/// symmetry sectors, since `H` maps each sector to itself.
pub fn universal_agp_dense(h: &DMatrix<C64>, dh: &DMatrix<C64>, betas: &[f64], omega: f64) -> DMatrix<C64> {
    let hs = h.unscale(omega);
    let lio = |o: &DMatrix<C64>| &hs * o - o * &hs;
    let mut prev = dh.unscale(omega);
    let mut cur = lio(&prev);
    let mut acc = cur.scale(1.0) * C64::new(0.0, betas[0]);
    for &beta in &betas[1..] {
        let even = lio(&cur) * C64::new(2.0, 0.0) - &prev;
        let odd = lio(&even) * C64::new(2.0, 0.0) - &cur;
        prev = even;
        cur = odd;
        acc += &cur * C64::new(0.0, beta);
    }
    acc
}

fn check_fit(fit: &ChebFit<f64>, omega: f64) -> Result<()> {
    if fit.mode != FitMode::Cost {
        log::debug!("universal gauge potential from an {} fit", fit.mode.as_str());
    }
    if fit.betas.is_empty() {
        return Err(Error::invalid("fit has no coefficients"));
    }
    if !(omega > 0.0 && omega.is_finite()) {
        return Err(Error::invalid(format!("Omega = {omega} must be positive")));
    }
    Ok(())
}

/// Universal gauge potential of `spec` at `lambda`.
pub fn build_universal_agp(spec: &ModelSpec, lambda: f64, fit: &ChebFit<f64>, omega: f64) -> Result<AgpOperator> {
    build_universal_agp_with(spec, lambda, fit, omega, AgpBuild::default())
}

/// As [`build_universal_agp`], with an explicit term cap: past it the
/// recursion restarts on dense matrices if the chain fits `dense_limit`.
pub fn build_universal_agp_with(
    spec: &ModelSpec,
    lambda: f64,
    fit: &ChebFit<f64>,
    omega: f64,
    opts: AgpBuild,
) -> Result<AgpOperator> {
    check_fit(fit, omega)?;
    let h = hamiltonian::<f64>(spec, lambda)?;
    let dh = dlambda_h::<f64>(spec)?;
    let n = spec.n_sites;
    let repr = match universal_agp_pauli(&h, &dh, &fit.betas, omega, opts.term_cap) {
        Some(op) => AgpRepr::Pauli(op),
        None if n <= opts.dense_limit => {
            log::info!("Pauli recursion exceeded {} strings; continuing densely", opts.term_cap);
            let hd = h.to_dense_with_limit(n, opts.dense_limit)?;
            let dd = dh.to_dense_with_limit(n, opts.dense_limit)?;
            AgpRepr::Dense(universal_agp_dense(&hd, &dd, &fit.betas, omega))
        }
        None => {
            return Err(Error::Resource(format!(
                "universal gauge potential of order {} on {n} sites exceeds {} Pauli strings and the \
                 dense limit of {} sites; reduce ell or N",
                fit.order(),
                opts.term_cap,
                opts.dense_limit
            )))
        }
    };
    Ok(AgpOperator { repr, omega, fit: fit.clone(), n_sites: n })
}

/// How the gauge potential is tracked along the anneal.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum AgpRefresh {
    /// Exact polynomial interpolation for the universal protocol (its gauge
    /// potential is a polynomial of degree `2 ell - 1` in lambda); rebuilt at
    /// every generator evaluation otherwise.
    #[default]
    Auto,
    /// On `knots + 1` equally spaced values of lambda, linearly interpolated.
    Knots { knots: usize },
    /// At every generator evaluation.
    EveryStep,
}

/// Default bound on `int |A(lambda)| dlambda`, the total rotation the gauge
/// term can impart. Far outside their fit window universal potentials reach
/// norms of `1e20` and beyond, which no integrator resolves.
pub const DEFAULT_MAX_AGP_ROTATION: f64 = 1e3;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EvolveOptions {
    #[serde(default)]
    pub control: StepControl,
    #[serde(default)]
    pub refresh: AgpRefresh,
    /// Number of equally spaced fidelity samples, endpoints included.
    #[serde(default = "default_samples")]
    pub samples: usize,
    #[serde(default = "default_dense_limit")]
    pub dense_limit: usize,
    /// Symmetry sector; by default the smallest one holding the ground state.
    #[serde(default)]
    pub sector: Option<Sector>,
    /// Runs whose tabulated gauge potential exceeds this rotation are
    /// refused with a resource error.
    #[serde(default = "default_max_rotation")]
    pub max_agp_rotation: f64,
}

fn default_max_rotation() -> f64 {
    DEFAULT_MAX_AGP_ROTATION
}

fn default_samples() -> usize {
    DEFAULT_SAMPLES
}

fn default_dense_limit() -> usize {
    DEFAULT_DENSE_LIMIT
}

impl Default for EvolveOptions {
    fn default() -> Self {
        EvolveOptions {
            control: StepControl::default(),
            refresh: AgpRefresh::default(),
            samples: DEFAULT_SAMPLES,
            dense_limit: DEFAULT_DENSE_LIMIT,
            sector: None,
            max_agp_rotation: DEFAULT_MAX_AGP_ROTATION,
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct DriveConfig {
    pub model: ModelSpec,
    pub protocol: Protocol,
    pub schedule: Schedule,
    pub options: EvolveOptions,
    pub sector: Sector,
    pub dim: usize,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct DriveResult {
    pub config: DriveConfig,
    pub times: Vec<f64>,
    pub lambdas: Vec<f64>,
    /// Overlap with the instantaneous ground state at each sample time.
    pub fidelity: Vec<f64>,
    pub final_fidelity: f64,
    /// `| |psi| - 1 |` at the end of the run.
    pub norm_drift: f64,
    pub steps: StepStats,
}

impl DriveResult {
    pub fn write_json<W: Write>(&self, out: W) -> Result<()> {
        serde_json::to_writer_pretty(out, self)?;
        Ok(())
    }

    /// CSV `t,lambda,fidelity`.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(out);
        w.write_record(["t", "lambda", "fidelity"])?;
        for i in 0..self.times.len() {
            w.write_record([self.times[i].to_string(), self.lambdas[i].to_string(), self.fidelity[i].to_string()])?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Gauge potential of `protocol` in the basis of `model` at `lambda`, or
/// `None` when it vanishes identically.
pub fn protocol_agp(model: &DenseModel, protocol: &Protocol, lambda: f64) -> Result<Option<DMatrix<C64>>> {
    match protocol {
        Protocol::None => Ok(None),
        Protocol::Universal { fit, omega } => {
            Ok(Some(universal_agp_dense(&model.hamiltonian(lambda), &model.dlambda_h(), &fit.betas, *omega)))
        }
        Protocol::Exact { .. } => {
            let sd = diagonalize_model(model, lambda, &Ensemble::Ground)?;
            let a = sd.agp_from_function(|om| protocol.agp_function(om).unwrap_or(0.0));
            Ok(Some(sd.to_model_basis(&a)))
        }
        Protocol::Variational { ell, mu, ensemble: VariationalEnsemble::Ground } => {
            let sd = diagonalize_model(model, lambda, &Ensemble::Ground)?;
            Ok(Some(variational_agp_matrix(&sd, *ell, *mu)?))
        }
        Protocol::Variational { ell, mu, ensemble: VariationalEnsemble::InfiniteTemperature } => {
            Ok(Some(variational_agp_frobenius(&model.hamiltonian(lambda), &model.dlambda_h(), *ell, *mu)?))
        }
    }
}

/// Variational gauge potential fitted to the ground-state spectral lines.
fn variational_agp_matrix(sd: &SpectralData, ell: usize, mu: f64) -> Result<DMatrix<C64>> {
    let lines = sd.lines();
    if lines.is_empty() {
        return Ok(DMatrix::zeros(sd.dim, sd.dim));
    }
    let v = variational_from_lines_ridge(&lines, ell, mu, None, VARIATIONAL_RIDGE)?;
    Ok(sd.to_model_basis(&sd.agp_from_function(|om| v.eval(om))))
}

/// Variational gauge potential minimizing the Frobenius-norm action
/// `|dH + i[A, H]|^2 + mu^2 |A|^2` over `A = i sum c_k T_{2k-1}(L/s) dH`,
/// with traces taken in the basis of `h`. No diagonalization: the result is
/// smooth in lambda.
pub fn variational_agp_frobenius(h: &DMatrix<C64>, dh: &DMatrix<C64>, ell: usize, mu: f64) -> Result<DMatrix<C64>> {
    let inner = |a: &DMatrix<C64>, b: &DMatrix<C64>| a.iter().zip(b.iter()).map(|(x, y)| (x.conj() * y).re).sum::<f64>();
    let lio = |o: &DMatrix<C64>| h * o - o * h;
    let q1 = lio(dh);
    let norm_dh = inner(dh, dh);
    if norm_dh == 0.0 || inner(&q1, &q1) == 0.0 {
        return Ok(DMatrix::zeros(h.nrows(), h.ncols()));
    }
    // Three times the rms transition frequency of dH.
    let scale = 3.0 * (inner(&q1, &q1) / norm_dh).sqrt();
    let hs = h.unscale(scale);
    let ls = |o: &DMatrix<C64>| &hs * o - o * &hs;
    let mut p = Vec::with_capacity(ell);
    let mut prev = dh.clone();
    let mut cur = ls(dh);
    p.push(cur.clone());
    for _ in 1..ell {
        let even = ls(&cur) * C64::new(2.0, 0.0) - &prev;
        let next = ls(&even) * C64::new(2.0, 0.0) - &cur;
        prev = even;
        cur = next;
        p.push(cur.clone());
    }
    let q: Vec<DMatrix<C64>> = p.iter().map(lio).collect();
    let mut gram = DMatrix::<f64>::zeros(ell, ell);
    let mut rhs = DVector::<f64>::zeros(ell);
    for i in 0..ell {
        for j in i..ell {
            let g = inner(&q[i], &q[j]) + mu * mu * inner(&p[i], &p[j]);
            gram[(i, j)] = g;
            gram[(j, i)] = g;
        }
        rhs[i] = -inner(&q[i], dh);
    }
    let svd = gram.svd(true, true);
    let tol = svd.singular_values.max() * VARIATIONAL_RANK_TOL.sqrt();
    let c = svd.solve(&rhs, tol).map_err(|e| Error::numerical(format!("variational Gram solve failed: {e}")))?;
    let mut a = DMatrix::<C64>::zeros(h.nrows(), h.ncols());
    for (ck, pk) in c.iter().zip(&p) {
        a += pk * C64::new(0.0, *ck);
    }
    Ok(a)
}

/// Gauge potential along the anneal.
enum AgpTrack<'a> {
    Zero,
    Table(Vec<DMatrix<C64>>),
    /// Barycentric interpolation through Chebyshev nodes.
    Poly { nodes: Vec<f64>, weights: Vec<f64>, values: Vec<DMatrix<C64>> },
    Live(&'a DenseModel, &'a Protocol),
}

impl AgpTrack<'_> {
    fn at(&self, lambda: f64) -> Result<Option<DMatrix<C64>>> {
        match self {
            AgpTrack::Zero => Ok(None),
            AgpTrack::Live(m, p) => protocol_agp(m, p, lambda),
            AgpTrack::Table(tab) => {
                let k = tab.len() - 1;
                let pos = lambda.clamp(0.0, 1.0) * k as f64;
                let i = (pos.floor() as usize).min(k - 1);
                let s = pos - i as f64;
                Ok(Some(if s == 0.0 { tab[i].clone() } else { tab[i].scale(1.0 - s) + tab[i + 1].scale(s) }))
            }
            AgpTrack::Poly { nodes, weights, values } => {
                if let Some(j) = nodes.iter().position(|&x| x == lambda) {
                    return Ok(Some(values[j].clone()));
                }
                let c: Vec<f64> = nodes.iter().zip(weights).map(|(x, w)| w / (lambda - x)).collect();
                let total: f64 = c.iter().sum();
                let mut out = DMatrix::<C64>::zeros(values[0].nrows(), values[0].ncols());
                for (cj, v) in c.iter().zip(values) {
                    out += v * C64::new(cj / total, 0.0);
                }
                Ok(Some(out))
            }
        }
    }
}

fn tabulate(model: &DenseModel, protocol: &Protocol, lambdas: &[f64]) -> Result<Vec<DMatrix<C64>>> {
    lambdas
        .par_iter()
        .map(|&l| Ok(protocol_agp(model, protocol, l)?.expect("nonzero protocol")))
        .collect()
}

/// Mean spectral norm over the tabulated values, an estimate of
/// `int |A| dlambda`.
fn check_rotation(values: &[DMatrix<C64>], limit: f64) -> Result<()> {
    let mean = values
        .iter()
        .map(|a| crate::ed::hermitian_eigen(a).0.iter().fold(0.0f64, |m, e| m.max(e.abs())))
        .sum::<f64>()
        / values.len() as f64;
    if mean > limit {
        return Err(Error::Resource(format!(
            "gauge potential norm ~{mean:.3e} exceeds the rotation budget {limit:.1e}; \
             the protocol is far outside its window (raise Omega or max_agp_rotation)"
        )));
    }
    Ok(())
}

fn ground_vector(model: &DenseModel, lambda: f64) -> DVector<C64> {
    crate::ed::hermitian_eigen(&model.hamiltonian(lambda)).1.column(0).into_owned()
}

/// Anneals from the ground state of `H(0)` under `H + lambda_dot A`.
pub fn evolve(spec: &ModelSpec, schedule: &Schedule, protocol: &Protocol, options: &EvolveOptions) -> Result<DriveResult> {
    protocol.validate()?;
    if options.samples < 2 {
        return Err(Error::invalid("need at least two fidelity samples"));
    }
    let sector = options.sector.unwrap_or_else(|| Sector::ground_state(spec));
    let model = DenseModel::new(spec, sector, options.dense_limit)?;
    evolve_model(&model, schedule, protocol, options)
}

/// [`evolve`] on an already assembled model.
pub fn evolve_model(
    model: &DenseModel,
    schedule: &Schedule,
    protocol: &Protocol,
    options: &EvolveOptions,
) -> Result<DriveResult> {
    let track = match (protocol, options.refresh) {
        (Protocol::None, _) => AgpTrack::Zero,
        (Protocol::Universal { fit, .. }, AgpRefresh::Auto) => {
            let m = 2 * fit.order();
            let nodes: Vec<f64> = (0..m)
                .map(|j| 0.5 * (1.0 - (std::f64::consts::PI * (j as f64 + 0.5) / m as f64).cos()))
                .collect();
            let weights: Vec<f64> = (0..m)
                .map(|j| {
                    let s = (std::f64::consts::PI * (j as f64 + 0.5) / m as f64).sin();
                    if j % 2 == 0 { s } else { -s }
                })
                .collect();
            let values = tabulate(model, protocol, &nodes)?;
            check_rotation(&values, options.max_agp_rotation)?;
            AgpTrack::Poly { nodes, weights, values }
        }
        (_, AgpRefresh::Auto | AgpRefresh::EveryStep) => AgpTrack::Live(model, protocol),
        (_, AgpRefresh::Knots { knots }) => {
            let knots = knots.max(1);
            let grid: Vec<f64> = (0..=knots).map(|i| i as f64 / knots as f64).collect();
            let values = tabulate(model, protocol, &grid)?;
            check_rotation(&values, options.max_agp_rotation)?;
            AgpTrack::Table(values)
        }
    };
    let mut stepper = DenseStepper {
        generator: |t: f64| {
            let (l, ldot) = schedule.at(t);
            let h = model.hamiltonian(l);
            if ldot == 0.0 {
                return Ok(h);
            }
            Ok(match track.at(l)? {
                Some(a) => h + a.scale(ldot),
                None => h,
            })
        },
        lambda: |t: f64| schedule.at(t).0,
    };

    let tt = schedule.total_time;
    let samples = options.samples;
    let times: Vec<f64> = (0..samples).map(|i| tt * i as f64 / (samples - 1) as f64).collect();
    let lambdas: Vec<f64> = times.iter().map(|&t| schedule.at(t).0.clamp(0.0, 1.0)).collect();
    let psi0 = ground_vector(model, 0.0);
    let mut psi = DMatrix::from_column_slice(psi0.len(), 1, psi0.as_slice());
    let mut fidelity = Vec::with_capacity(samples);
    let mut stats = StepStats::default();
    let mut hint = 0.0;
    let overlap = |psi: &DMatrix<C64>, l: f64| {
        let g = ground_vector(model, l);
        g.iter().zip(psi.iter()).map(|(a, b)| a.conj() * b).sum::<C64>().norm_sqr()
    };
    fidelity.push(overlap(&psi, lambdas[0]));
    for i in 1..samples {
        let seg = options.control.segment(times[i] - times[i - 1], tt);
        psi = propagate(&mut stepper, psi, times[i - 1], times[i], seg, &mut hint, &mut stats)?;
        fidelity.push(overlap(&psi, lambdas[i]));
    }
    let norm_drift = (psi.norm() - 1.0).abs();
    let final_fidelity = overlap(&psi, 1.0);
    Ok(DriveResult {
        config: DriveConfig {
            model: model.spec.clone(),
            protocol: protocol.clone(),
            schedule: *schedule,
            options: options.clone(),
            sector: model.basis.sector(),
            dim: model.dim(),
        },
        times,
        lambdas,
        fidelity,
        final_fidelity,
        norm_drift,
        steps: stats,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fit::fit_inverse;
    use crate::pauli::Axis;

    fn single_spin() -> ModelSpec {
        let x = PauliOperator::single(1, 0, Axis::X, 1.0);
        let z = PauliOperator::single(1, 0, Axis::Z, 1.0);
        ModelSpec::custom(&x, &z)
    }

    #[test]
    fn order_one_is_a_single_commutator() {
        let spec = ModelSpec::tfi_clean(4);
        let fit = fit_inverse::<f64>(1, 0.2, FitMode::Cost).unwrap();
        let omega = 3.0;
        let agp = build_universal_agp(&spec, 0.4, &fit, omega).unwrap();
        let h = hamiltonian::<f64>(&spec, 0.4).unwrap();
        let dh = dlambda_h::<f64>(&spec).unwrap();
        let expect = h.commutator(&dh).scale(C64::new(0.0, fit.betas[0] / (omega * omega)));
        match &agp.repr {
            AgpRepr::Pauli(op) => assert!(op.max_abs_diff(&expect) < 1e-14),
            _ => panic!("expected a symbolic result"),
        }
    }

    #[test]
    fn dense_fallback_matches_symbolic() {
        let spec = ModelSpec::nnn_tfi(6);
        let fit = fit_inverse::<f64>(4, 0.1, FitMode::Cost).unwrap();
        let sym = build_universal_agp(&spec, 0.3, &fit, 8.0).unwrap();
        let dense = build_universal_agp_with(&spec, 0.3, &fit, 8.0, AgpBuild { term_cap: 1, dense_limit: 14 }).unwrap();
        assert!(sym.is_symbolic() && !dense.is_symbolic());
        let diff = crate::ed::max_abs_diff(&sym.to_dense().unwrap(), &dense.to_dense().unwrap());
        assert!(diff < 1e-10, "{diff}");
    }

    #[test]
    fn resource_error_names_order_and_size() {
        let spec = ModelSpec::nnn_tfi(20);
        let fit = fit_inverse::<f64>(6, 0.1, FitMode::Cost).unwrap();
        let err = build_universal_agp_with(&spec, 0.3, &fit, 8.0, AgpBuild { term_cap: 10, dense_limit: 14 })
            .unwrap_err();
        assert!(err.is_resource());
        let msg = err.to_string();
        assert!(msg.contains("order 6") && msg.contains("20 sites"), "{msg}");
    }

    #[test]
    fn single_spin_exact_drive() {
        let spec = single_spin();
        let opts = EvolveOptions { sector: Some(Sector::full()), ..Default::default() };
        let r = evolve(&spec, &Schedule::smooth(0.05), &Protocol::Exact { mu: 0.0 }, &opts).unwrap();
        assert!(1.0 - r.final_fidelity < 1e-8, "{}", r.final_fidelity);
        assert!((r.fidelity[0] - 1.0).abs() < 1e-12);
        assert!(r.norm_drift < 1e-10);
    }

    #[test]
    fn frozen_schedule_ignores_the_gauge_potential() {
        // A zero-speed schedule: lambda(t) = 0 throughout.
        let spec = ModelSpec::nnn_tfi(6);
        let model = DenseModel::ground_sector(&spec).unwrap();
        let fit = fit_inverse::<f64>(3, 0.1, FitMode::Cost).unwrap();
        let p = Protocol::universal(fit, 10.0).unwrap();
        let psi0 = ground_vector(&model, 0.3);
        let g = |with: bool| {
            let mut s = DenseStepper {
                generator: |_t: f64| {
                    let h = model.hamiltonian(0.3);
                    Ok(if with { h + protocol_agp(&model, &p, 0.3)?.unwrap().scale(0.0) } else { h })
                },
                lambda: |_t: f64| 0.3,
            };
            let x = DMatrix::from_column_slice(psi0.len(), 1, psi0.as_slice());
            propagate(&mut s, x, 0.0, 1.0, StepControl::Fixed { steps: 20 }.segment(1.0, 1.0), &mut 0.0, &mut StepStats::default())
                .unwrap()
        };
        assert!(crate::ed::max_abs_diff(&g(true), &g(false)) <= 1e-12);
    }

    #[test]
    fn polynomial_track_is_exact() {
        let spec = ModelSpec::nnn_tfi(6);
        let model = DenseModel::ground_sector(&spec).unwrap();
        let fit = fit_inverse::<f64>(4, 0.1, FitMode::Cost).unwrap();
        let p = Protocol::universal(fit, 6.0).unwrap();
        let opts = EvolveOptions { samples: 2, ..Default::default() };
        let sched = Schedule::smooth(0.3);
        let poly = evolve_model(&model, &sched, &p, &opts).unwrap();
        let live = evolve_model(&model, &sched, &p, &EvolveOptions { refresh: AgpRefresh::EveryStep, ..opts }).unwrap();
        let d = (poly.final_fidelity - live.final_fidelity).abs();
        assert!(d < 1e-9, "{d}");
    }

    #[test]
    fn rotation_budget_refuses_runaway_potentials() {
        let spec = ModelSpec::nnn_tfi(6);
        let fit = fit_inverse::<f64>(8, 0.05, FitMode::Cost).unwrap();
        let p = Protocol::universal(fit, 0.5).unwrap();
        let err = evolve(&spec, &Schedule::smooth(0.1), &p, &EvolveOptions::default()).unwrap_err();
        assert!(err.is_resource(), "{err}");
    }

    #[test]
    fn frobenius_variational_matches_pauli_route() {
        let spec = ModelSpec::nnn_tfi(6);
        let model = DenseModel::full(&spec).unwrap();
        let (h, dh) = (model.hamiltonian(0.4), model.dlambda_h());
        let a = variational_agp_frobenius(&h, &dh, 3, 0.2).unwrap();
        let hp = hamiltonian::<f64>(&spec, 0.4).unwrap();
        let dhp = dlambda_h::<f64>(&spec).unwrap();
        let v = crate::spectral::variational_krylov_agp_pauli(&hp, &dhp, 3, 0.2, 5.0).unwrap();
        let betas: Vec<f64> = v.cheb.iter().map(|c| c * v.scale).collect();
        let b = universal_agp_dense(&h, &dh, &betas, v.scale);
        let diff = crate::ed::max_abs_diff(&a, &b);
        assert!(diff < 1e-9, "{diff}");
    }

    #[test]
    fn csv_trace_layout() {
        let spec = single_spin();
        let opts = EvolveOptions { sector: Some(Sector::full()), samples: 3, ..Default::default() };
        let r = evolve(&spec, &Schedule::smooth(1.0), &Protocol::None, &opts).unwrap();
        let mut buf = Vec::new();
        r.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("t,lambda,fidelity\n0,0,"));
        assert_eq!(text.lines().count(), 4);
    }
}
