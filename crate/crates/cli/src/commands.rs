//! Subcommand handlers. Each reads its section of the resolved config and
//! writes artifacts through the [`Run`].

use std::path::Path;

use rayon::prelude::*;
use serde_json::json;
use unicd::ed::{DenseModel, Sector};
use unicd::evolution::{evolve, EvolveOptions};
use unicd::fit::{optimal_zeta_table, residual_score, write_fit_curve, write_fit_table, ZetaScan};
use unicd::free_fermion;
use unicd::krylov::{
    average_coefficients, coupling_variants, default_seed, divergence_index, growth_exponent,
    lanczos_coefficients, tail_fit, write_coefficients_csv, CouplingName, LanczosOptions, LanczosResult,
};
use unicd::models::{omega_max, ModelSpec, Schedule};
use unicd::pauli::PauliOperator;
use unicd::protocol::Protocol;
use unicd::scaling::{
    compare_cost_action, fit_asymptote, optimize_mu_tfi_mode, optimize_omega, write_cost_action_csv,
    write_points_csv, AsymptoteForm, ExperimentOptions, ScalingPoint, ZetaTable,
};
use unicd::spectral::{diagonalize_model, histogram, infinite_temperature_lines, Binning, Ensemble, SpectralLine};
use unicd::{fit_inverse, ChebFit, FitMode};

use crate::config::{
    Backend, Experiment, GlobalConfig, ProtocolConfig, ProtocolKind, RunConfig, SpectralEnsemble, ZetaObjective,
};
use crate::output::Run;
use crate::CliError;

fn zeta_scan(lo: f64, hi: f64, points: usize) -> ZetaScan {
    ZetaScan { lo, hi, points, ..ZetaScan::default() }
}

fn read_zeta_table(path: &Path) -> Result<ZetaTable, CliError> {
    let file = std::fs::File::open(path).map_err(|e| CliError::Config(format!("zeta table {}: {e}", path.display())))?;
    Ok(ZetaTable::read_csv(file)?)
}

/// `zeta*(ell)` on the clean chain of `sites` spins at `Omega_max`.
fn tfi_zeta_table(
    ells: &[usize],
    sites: usize,
    schedule: &Schedule,
    scan: &ZetaScan,
    mode: FitMode,
    global: &GlobalConfig,
) -> Result<Vec<ScalingPoint>, CliError> {
    let spec = ModelSpec::tfi_clean(sites);
    let modes = free_fermion::default_modes(&spec)?;
    let control = global.integrator.control(free_fermion::default_block_control());
    Ok(optimize_mu_tfi_mode(&spec, ells, modes, schedule, scan, mode, control)?)
}

pub fn fit(cfg: &RunConfig, run: &mut Run) -> Result<(), CliError> {
    let c = &cfg.fit;
    if c.ell.is_empty() {
        return Err(CliError::Config("fit needs at least one order".into()));
    }
    let fits: Vec<ChebFit<f64>> = if c.scan_zeta {
        let scan = zeta_scan(c.zeta_lo, c.zeta_hi, c.zeta_points);
        let table: Vec<(usize, f64)> = match c.objective {
            ZetaObjective::Residual => optimal_zeta_table(&c.ell, |l, z| residual_score(l, z, c.mode), &scan)?
                .into_iter()
                .map(|o| (o.ell, o.zeta))
                .collect(),
            ZetaObjective::Tfi => {
                let pts = tfi_zeta_table(&c.ell, c.n_sites, &c.schedule, &scan, c.mode, &cfg.global)?;
                run.write_with("zeta_points.csv", |w| write_points_csv(w, "zeta", "log_fidelity_density", &pts))?;
                pts.iter().map(|p| (p.ell, p.value)).collect()
            }
        };
        run.write_with("zeta.csv", |w| ZetaTable::from_pairs(table.iter().copied()).write_csv(w))?;
        table.iter().map(|&(l, z)| fit_inverse::<f64>(l, z, c.mode)).collect::<unicd::Result<_>>()?
    } else {
        let zeta = c.zeta.ok_or_else(|| CliError::Config("fit needs --zeta or --scan-zeta".into()))?;
        c.ell.iter().map(|&l| fit_inverse::<f64>(l, zeta, c.mode)).collect::<unicd::Result<_>>()?
    };
    run.write_with("fit.csv", |w| write_fit_table(w, &fits))?;
    for f in &fits {
        let name = if fits.len() == 1 { "curve.csv".to_string() } else { format!("curve_l{}.csv", f.order()) };
        run.write_with(&name, |w| write_fit_curve(w, f, f.zeta, c.curve_points))?;
    }
    let rows: Vec<_> = fits
        .iter()
        .map(|f| json!({ "ell": f.order(), "zeta": f.zeta, "residual": f.residual, "condition": f.condition, "rank": f.rank }))
        .collect();
    run.report("fits", rows);
    Ok(())
}

/// Resolves the protocol section against the model.
fn build_protocol(p: &ProtocolConfig, spec: &ModelSpec) -> Result<Protocol, CliError> {
    Ok(match p.kind {
        ProtocolKind::None => Protocol::None,
        ProtocolKind::Exact => Protocol::Exact { mu: p.mu },
        ProtocolKind::Variational => Protocol::variational(p.ell, p.mu, p.ensemble),
        ProtocolKind::Universal => {
            let zeta = match (p.zeta, &p.zeta_table) {
                (Some(z), _) => z,
                (None, Some(path)) => read_zeta_table(path)?.zeta(p.ell)?,
                (None, None) => {
                    let scan = ZetaScan::default();
                    let z = optimal_zeta_table(&[p.ell], |l, z| residual_score(l, z, p.mode), &scan)?[0].zeta;
                    log::info!("no zeta given; using the residual optimum {z:.5}");
                    z
                }
            };
            let omega = match p.omega {
                Some(o) => o,
                None => omega_max(spec, None).map_err(|_| {
                    CliError::Config(format!("the universal protocol on {} needs --omega (no hard spectral cutoff)", spec.name))
                })?,
            };
            Protocol::universal(fit_inverse::<f64>(p.ell, zeta, p.mode)?, omega)?
        }
    })
}

pub fn anneal(cfg: &RunConfig, run: &mut Run) -> Result<(), CliError> {
    let c = &cfg.anneal;
    let spec = c.model.to_spec(cfg.global.seed)?;
    let protocol = build_protocol(&c.protocol, &spec)?;
    let free = match c.backend {
        Backend::Auto => spec.name.is_free_fermion(),
        Backend::Dense => false,
        Backend::FreeFermion => true,
    };
    run.report("model", spec.name.as_str());
    run.report("protocol", protocol.name());
    if free {
        let modes = match c.n_modes {
            Some(m) => m,
            None => free_fermion::default_modes(&spec)?,
        };
        let control = cfg.global.integrator.control(free_fermion::default_block_control());
        let result = free_fermion::anneal(&spec, modes, &c.schedule, &protocol, control)?;
        run.write_json("result.json", &result)?;
        run.write_with("modes.csv", |w| result.fidelity.write_modes_csv(w))?;
        run.report("backend", "free_fermion");
        run.report("log_fidelity", result.fidelity.log_fidelity);
        run.report("log_fidelity_density", result.fidelity.density);
    } else {
        let opts = EvolveOptions {
            control: cfg.global.integrator.control(EvolveOptions::default().control),
            refresh: c.refresh,
            samples: c.samples,
            dense_limit: cfg.global.dense_limit,
            sector: None,
            max_agp_rotation: c.max_agp_rotation,
        };
        let result = evolve(&spec, &c.schedule, &protocol, &opts)?;
        run.write_with("drive.json", |w| result.write_json(w))?;
        run.write_with("drive.csv", |w| result.write_csv(w))?;
        run.report("backend", "dense");
        run.report("dimension", result.config.dim);
        run.report("final_fidelity", result.final_fidelity);
        run.report("infidelity", 1.0 - result.final_fidelity);
        run.report("norm_drift", result.norm_drift);
        run.report("steps", result.steps.accepted);
    }
    Ok(())
}

fn asymptote(run: &mut Run, points: &[ScalingPoint], form: AsymptoteForm, range: Option<[f64; 2]>) -> Result<(), CliError> {
    let pts: Vec<(f64, f64)> = points.iter().map(|p| (p.ell as f64, p.value)).collect();
    let lo = pts.iter().map(|p| p.0).fold(f64::INFINITY, f64::min);
    let hi = pts.iter().map(|p| p.0).fold(f64::NEG_INFINITY, f64::max);
    match fit_asymptote(&pts, form, range.unwrap_or([lo, hi])) {
        Ok(fit) => {
            run.write_json("fit.json", &fit)?;
            run.report("fit", &fit);
        }
        Err(e) => log::warn!("no asymptote fit: {e}"),
    }
    Ok(())
}

pub fn scaling(cfg: &RunConfig, run: &mut Run) -> Result<(), CliError> {
    let c = &cfg.scaling;
    let ells = c.ells.clone().unwrap_or_else(|| c.experiment.default_ells());
    if ells.is_empty() {
        return Err(CliError::Config("scaling needs at least one order".into()));
    }
    let n = c.n_sites.unwrap_or_else(|| c.experiment.default_sites());
    let scan = zeta_scan(c.zeta_lo, c.zeta_hi, c.zeta_points);
    let table = |run: &mut Run, path: &Option<std::path::PathBuf>, mode: FitMode, name: &str| -> Result<ZetaTable, CliError> {
        let t = match path {
            Some(p) => read_zeta_table(p)?,
            None => ZetaTable::from_points(&tfi_zeta_table(&ells, c.tfi_sites, &c.schedule, &scan, mode, &cfg.global)?),
        };
        run.write_with(name, |w| t.write_csv(w))?;
        Ok(t)
    };
    let opts = ExperimentOptions {
        scan: c.omega_scan,
        evolve: EvolveOptions {
            control: cfg.global.integrator.control(EvolveOptions::default().control),
            dense_limit: cfg.global.dense_limit,
            ..EvolveOptions::default()
        },
        n_modes: None,
        variational_ensemble: c.ensemble,
    };
    run.report("experiment", c.experiment);
    match c.experiment {
        Experiment::ZetaTfi => {
            let pts = tfi_zeta_table(&ells, n, &c.schedule, &scan, FitMode::Cost, &cfg.global)?;
            run.write_with("points.csv", |w| write_points_csv(w, "zeta", "log_fidelity_density", &pts))?;
            run.write_with("zeta.csv", |w| ZetaTable::from_points(&pts).write_csv(w))?;
            asymptote(run, &pts, AsymptoteForm::LoglOverL, c.fit_range)?;
        }
        Experiment::OmegaNnn | Experiment::OmegaXxz => {
            let (spec, form) = if c.experiment == Experiment::OmegaNnn {
                (ModelSpec::nnn_tfi(n), AsymptoteForm::Linear)
            } else {
                (ModelSpec::xxz_anneal(n), AsymptoteForm::Power)
            };
            let zt = table(run, &c.zeta_table, FitMode::Cost, "zeta_cost.csv")?;
            let pts = optimize_omega(&spec, &ells, &zt, &c.schedule, &opts)?;
            run.write_with("points.csv", |w| write_points_csv(w, "omega", "fidelity", &pts))?;
            asymptote(run, &pts, form, c.fit_range)?;
        }
        Experiment::CostVsAction => {
            let cost = table(run, &c.zeta_table, FitMode::Cost, "zeta_cost.csv")?;
            let action = table(run, &c.zeta_table_action, FitMode::Action, "zeta_action.csv")?;
            let rows = compare_cost_action(&ModelSpec::nnn_tfi(n), &ells, &cost, &action, &c.schedule, &opts)?;
            run.write_with("points.csv", |w| write_cost_action_csv(w, &rows))?;
            let scale = rows
                .iter()
                .flat_map(|r| [r.f_cost, r.f_action, r.f_variational])
                .fold(f64::INFINITY, f64::min);
            let gaps: Vec<_> = rows
                .iter()
                .map(|r| json!({ "ell": r.ell, "normalized_gap": (r.f_cost - r.f_action).abs() / (1.0 - scale) }))
                .collect();
            run.write_json("rows.json", &rows)?;
            run.report("cost_action_gaps", gaps);
        }
    }
    Ok(())
}

fn pauli_text(n: usize, text: &str) -> Result<PauliOperator<f64>, CliError> {
    PauliOperator::from_text(n, &text.replace(';', "\n")).map_err(|e| CliError::Config(format!("Pauli text: {e}")))
}

pub fn lanczos(cfg: &RunConfig, run: &mut Run) -> Result<(), CliError> {
    let c = &cfg.lanczos;
    let n = c.model.n_sites;
    let periodic = c.model.boundary == unicd::Boundary::Periodic;
    let opts_for = |p: usize| LanczosOptions {
        n_max: c.n_max,
        p,
        full_reorthogonalization: c.full_reorthogonalization,
        metric: c.metric,
    };
    let seed = c.seed_op.as_deref().map(|t| pauli_text(n, t)).transpose()?;
    // Averaged coefficients and the individual runs at truncation `p`.
    let compute = |p: usize| -> Result<(Vec<f64>, Vec<LanczosResult>), CliError> {
        let runs = match &c.hamiltonian {
            Some(text) => {
                let h = pauli_text(n, text)?;
                let seed = seed.clone().ok_or_else(|| CliError::Config("an explicit Hamiltonian needs --seed-op".into()))?;
                vec![unicd::krylov::lanczos(&h, &seed, periodic, &opts_for(p))?]
            }
            None => {
                let spec = c.model.to_spec(cfg.global.seed)?;
                let seed = match &seed {
                    Some(s) => s.clone(),
                    None => default_seed(&spec)?,
                };
                let variants = coupling_variants(&spec, CouplingName::default_for(spec.name), c.spread, c.variants);
                variants
                    .par_iter()
                    .map(|v| lanczos_coefficients(v, c.lambda, &seed, &opts_for(p)))
                    .collect::<unicd::Result<Vec<_>>>()?
            }
        };
        Ok((average_coefficients(&runs), runs))
    };
    let (b, runs) = compute(c.p)?;
    run.write_with("coefficients.csv", |w| write_coefficients_csv(w, &b, c.width))?;
    let growth = match growth_exponent(&b, c.range, c.width) {
        Ok(g) => Some(g),
        Err(e) => {
            log::warn!("no growth fit: {e}");
            None
        }
    };
    let pair = if c.p_pair {
        if c.p < 3 {
            return Err(CliError::Config("--p-pair needs p >= 3".into()));
        }
        let (b2, _) = compute(c.p - 2)?;
        run.write_with(&format!("coefficients_p{}.csv", c.p - 2), |w| write_coefficients_csv(w, &b2, c.width))?;
        let index = divergence_index(&b, &b2, c.pair_tol);
        run.report("divergence_index", index);
        Some(json!({ "p": c.p - 2, "b": b2, "divergence_index": index, "rel_tol": c.pair_tol }))
    } else {
        None
    };
    let summary = json!({
        "model": if c.hamiltonian.is_some() { "CUSTOM".to_string() } else { c.model.name.to_string() },
        "p": c.p,
        "metric": c.metric,
        "lambda": c.lambda,
        "variants": runs.len(),
        "b": b,
        "breakdown": runs.iter().any(|r| r.breakdown),
        "terms": runs[0].terms,
        "growth": growth,
        "p_pair": pair,
    });
    run.write_json("exponent.json", &summary)?;
    run.report("coefficients", b.len());
    if let Some(g) = growth {
        run.report("one_over_alpha", g.one_over_alpha);
        run.report("r2", g.r2);
    }
    Ok(())
}

pub fn spectral(cfg: &RunConfig, run: &mut Run) -> Result<(), CliError> {
    let c = &cfg.spectral;
    let spec = c.model.to_spec(cfg.global.seed)?;
    let limit = cfg.global.dense_limit;
    let lines: Vec<SpectralLine> = match c.ensemble {
        SpectralEnsemble::InfiniteTemperature => infinite_temperature_lines(&spec, c.lambda, limit)?,
        SpectralEnsemble::Ground => {
            let model = DenseModel::new(&spec, Sector::ground_state(&spec), limit)?;
            diagonalize_model(&model, c.lambda, &Ensemble::Ground)?.lines()
        }
    };
    let top = lines.iter().map(|l| l.omega).fold(0.0, f64::max);
    let hi = c.hi.unwrap_or(top * (1.0 + 1e-9) + 1e-12);
    let hist = histogram(&lines, &Binning { lo: c.lo, hi, bins: c.bins, kernel: c.kernel })?;
    run.write_with("phi.csv", |w| hist.write_csv(w))?;
    let total: f64 = lines.iter().map(|l| l.weight).sum();
    let tail = match c.tail_range {
        Some(r) => Some(tail_fit(&hist, r)?),
        None => None,
    };
    run.write_json(
        "spectral.json",
        &json!({
            "model": spec.name,
            "lambda": c.lambda,
            "ensemble": c.ensemble,
            "lines": lines.len(),
            "total_weight": total,
            "binned_weight": hist.total(),
            "omega_top": top,
            "tail": tail,
        }),
    )?;
    run.report("lines", lines.len());
    run.report("total_weight", total);
    if let Some(t) = tail {
        run.report("tail_alpha", t.alpha);
    }
    Ok(())
}
