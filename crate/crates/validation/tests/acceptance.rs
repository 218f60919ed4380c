//! Acceptance suite. Runs every check and prints one verdict line each;
//! `cargo test -p unicd-validation --test acceptance -- 4 7` runs a subset.
//!
//! Desk-scale settings throughout: smooth schedule with T = 0.1, clean-chain
//! window table from N = 200, NNN chain N = 10, XXZ chain N = 12.

use std::collections::BTreeMap;
use std::sync::{Mutex, OnceLock};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use unicd::chebyshev::{odd_chebyshev_to_monomial, odd_monomial_to_chebyshev, odd_series};
use unicd::ed::{max_abs_diff, DenseModel, Sector};
use unicd::evolution::{evolve, universal_agp_pauli, EvolveOptions};
use unicd::fit::{fit_inverse, FitMode, ZetaScan};
use unicd::free_fermion::{default_block_control, default_modes, disorder_average};
use unicd::integrate::StepControl;
use unicd::krylov::{
    average_coefficients, coupling_variants, default_seed, growth_exponent, lanczos_coefficients, CouplingName,
    LanczosOptions, LanczosResult,
};
use unicd::models::{dlambda_h, hamiltonian, ModelSpec, Schedule};
use unicd::optimize::maximize_log;
use unicd::pauli::{Axis, PauliOperator, PauliString};
use unicd::protocol::{Protocol, VariationalEnsemble};
use unicd::scaling::{
    compare_cost_action, fit_asymptote, optimize_mu_tfi_mode, optimize_omega, AsymptoteForm,
    ExperimentOptions, ZetaTable, VARIATIONAL_MU_SCAN,
};
use unicd::spectral::{
    diagonalize_model, exact_agp, histogram, variational_krylov_agp, Binning, Ensemble, FilterKind, Kernel,
    SpectralData, DEGENERACY_TOL,
};
use unicd::C64;
use unicd_validation::{run, selection, Check, Outcome};

// Pinned tolerances.
const EXACT_INFIDELITY: f64 = 1e-6;
const DUAL_ORACLE_TOL: f64 = 1e-9;
const SATURATION_TOL: f64 = 1e-8;
const ZETA_LAW_R2: f64 = 0.95;
const CONVERGENCE_RATIO: f64 = 0.5;
const DISORDER_FACTOR: f64 = 3.0;
const OMEGA_LINEAR_R2: f64 = 0.9;
const XXZ_EXPONENT: [f64; 2] = [0.4, 0.7];
const COST_ACTION_GAP: f64 = 0.1;
const VARIATIONAL_SLACK: f64 = 1e-3;
const XXZ_GROWTH: [f64; 2] = [0.4, 0.6];
const NNN_GROWTH: [f64; 2] = [0.8, 1.2];
const SYNTHETIC_GROWTH_TOL: f64 = 1e-12;
const UNITARITY_TOL: f64 = 1e-8;
const PAULI_ORACLE_TOL: f64 = 1e-12;
const ROUNDTRIP_TOL: f64 = 1e-10;
const SUM_RULE_TOL: f64 = 1e-10;

const TOTAL_TIME: f64 = 0.1;
const TFI_SITES: usize = 200;
const NNN_SITES: usize = 10;
const XXZ_SITES: usize = 12;

fn schedule() -> Schedule {
    Schedule::smooth(TOTAL_TIME)
}

fn single_spin() -> ModelSpec {
    ModelSpec::custom(&PauliOperator::single(1, 0, Axis::X, 1.0), &PauliOperator::single(1, 0, Axis::Z, 1.0))
}

/// Window tables shared between checks, filled on demand.
fn zeta_table(mode: FitMode, ells: &[usize]) -> ZetaTable {
    static CACHE: OnceLock<Mutex<BTreeMap<(bool, usize), f64>>> = OnceLock::new();
    let cache = CACHE.get_or_init(Default::default);
    let action = mode == FitMode::Action;
    let missing: Vec<usize> =
        ells.iter().copied().filter(|l| !cache.lock().unwrap().contains_key(&(action, *l))).collect();
    if !missing.is_empty() {
        let tfi = ModelSpec::tfi_clean(TFI_SITES);
        let pts = optimize_mu_tfi_mode(
            &tfi,
            &missing,
            TFI_SITES / 2,
            &schedule(),
            &ZetaScan::default(),
            mode,
            default_block_control(),
        )
        .expect("window scan");
        let mut c = cache.lock().unwrap();
        for p in pts {
            c.insert((action, p.ell), p.value);
        }
    }
    let c = cache.lock().unwrap();
    ZetaTable::from_pairs(ells.iter().map(|l| (*l, c[&(action, *l)])))
}

fn fmt_list(v: &[f64], digits: usize) -> String {
    v.iter().map(|x| format!("{x:.digits$}")).collect::<Vec<_>>().join(",")
}

fn exact_cd_transitionless() -> Outcome {
    let sched = Schedule::smooth(0.05);
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut specs = vec![single_spin()];
    for n in [4, 6, 8] {
        specs.push(ModelSpec::tfi_clean(n));
        specs.push(ModelSpec::nnn_tfi(n));
        specs.push(ModelSpec::xxz_anneal(n));
    }
    for _ in 0..3 {
        specs.push(ModelSpec::tfi_block_disorder(8, 4, rng.gen()));
    }
    specs.push(ModelSpec::tfi_block_disorder(4, 2, rng.gen()));
    let mut worst = (0.0f64, String::new());
    for spec in &specs {
        let opts = EvolveOptions { samples: 2, ..Default::default() };
        let r = evolve(spec, &sched, &Protocol::Exact { mu: 0.0 }, &opts).expect("exact drive");
        let inf = 1.0 - r.final_fidelity;
        if inf >= worst.0 || worst.1.is_empty() {
            worst = (inf, format!("{} N={}", spec.name, spec.n_sites));
        }
    }
    Outcome::new(
        worst.0 <= EXACT_INFIDELITY,
        format!("{} drives, worst 1-F = {:.2e} ({}), tol {EXACT_INFIDELITY:.0e}", specs.len(), worst.0, worst.1),
    )
}

fn dual_oracle() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut worst = 0.0f64;
    let mut cases = 0;
    for n in 2usize..=6 {
        let mut specs = vec![ModelSpec::tfi_clean(n), ModelSpec::nnn_tfi(n), ModelSpec::xxz_anneal(n)];
        if n % 2 == 0 {
            specs.push(ModelSpec::tfi_block_disorder(n, 2, rng.gen()));
        }
        for spec in specs {
            let model = DenseModel::full(&spec).expect("dense model");
            for ell in 1..=6 {
                let lambda: f64 = rng.gen_range(0.05..0.95);
                let betas: Vec<f64> = (0..ell).map(|_| rng.gen_range(-1.0..1.0)).collect();
                let sd = diagonalize_model(&model, lambda, &Ensemble::Ground).expect("diagonalize");
                let spread = sd.energies.last().unwrap() - sd.energies[0];
                let omega = spread * rng.gen_range(0.8..1.5);
                let h = hamiltonian::<f64>(&spec, lambda).unwrap();
                let dh = dlambda_h::<f64>(&spec).unwrap();
                let op = universal_agp_pauli(&h, &dh, &betas, omega, usize::MAX).expect("term cap");
                // Eigenbasis form i f(omega_mn) M_mn / Omega, back in the model basis.
                let spectral = sd.to_model_basis(&sd.agp_from_function(|w| odd_series(&betas, w / omega) / omega));
                worst = worst.max(max_abs_diff(&op.to_dense(n).unwrap(), &spectral));
                cases += 1;
            }
        }
    }
    Outcome::new(
        worst <= DUAL_ORACLE_TOL,
        format!("{cases} cases (N<=6, ell<=6), max |diff| = {worst:.2e}, tol {DUAL_ORACLE_TOL:.0e}"),
    )
}

/// Distinct `|omega|` among the spectral lines.
fn distinct_frequencies(sd: &SpectralData) -> usize {
    let mut w: Vec<f64> = sd.lines().iter().map(|l| l.omega.abs()).collect();
    w.sort_by(f64::total_cmp);
    w.dedup_by(|a, b| (*a - *b).abs() <= DEGENERACY_TOL);
    w.len()
}

fn krylov_saturation() -> Outcome {
    let mu = 0.1;
    let lambda = 0.37;
    let specs = [single_spin(), ModelSpec::tfi_clean(4), ModelSpec::nnn_tfi(4), ModelSpec::xxz_anneal(4)];
    let mut worst = 0.0f64;
    let mut orders = Vec::new();
    for spec in &specs {
        let model = DenseModel::full(spec).unwrap();
        let sd = diagonalize_model(&model, lambda, &Ensemble::InfiniteTemperature).unwrap();
        let ell = distinct_frequencies(&sd);
        let v = variational_krylov_agp(spec, lambda, ell, mu).expect("variational fit");
        let exact = exact_agp(&sd, FilterKind::Rational { mu }).unwrap();
        worst = worst.max(max_abs_diff(&v.eigenbasis_matrix(&sd), &exact));
        orders.push(ell);
    }
    Outcome::new(
        worst <= SATURATION_TOL,
        format!("orders {orders:?}, max |A_var - A_exact| = {worst:.2e}, tol {SATURATION_TOL:.0e}"),
    )
}

const ZETA_ELLS: [usize; 6] = [8, 16, 24, 32, 48, 64];

fn zeta_law() -> Outcome {
    let table = zeta_table(FitMode::Cost, &ZETA_ELLS);
    let z: Vec<f64> = table.iter().map(|(_, z)| z).collect();
    let decreasing = z.windows(2).all(|w| w[1] < w[0]);
    let pts: Vec<(f64, f64)> = table.iter().map(|(l, z)| (l as f64, z)).collect();
    let fit = fit_asymptote(&pts, AsymptoteForm::LoglOverL, [8.0, 64.0]).expect("fit");
    Outcome::new(
        decreasing && fit.r2 >= ZETA_LAW_R2,
        format!(
            "zeta* = [{}], C = {:.4}, b = {:.4}, R2 = {:.4} (>= {ZETA_LAW_R2}), strictly decreasing: {decreasing}",
            fmt_list(&z, 4),
            fit.params[0],
            fit.params[1],
            fit.r2
        ),
    )
}

fn fidelity_convergence() -> Outcome {
    let table = zeta_table(FitMode::Cost, &[8, 32]);
    let spec = ModelSpec::tfi_clean(500);
    let modes = default_modes(&spec).unwrap();
    let density = |ell: usize| {
        let p = Protocol::universal(fit_inverse::<f64>(ell, table.zeta(ell).unwrap(), FitMode::Cost).unwrap(), 4.0).unwrap();
        unicd::free_fermion::anneal(&spec, modes, &schedule(), &p, default_block_control()).unwrap().fidelity.density
    };
    let (d8, d32) = (density(8), density(32));
    let ratio = d32.abs() / d8.abs();
    Outcome::new(
        ratio <= CONVERGENCE_RATIO,
        format!("|log F|/N: ell=8 {:.5}, ell=32 {:.5}, ratio {ratio:.3} (<= {CONVERGENCE_RATIO})", d8.abs(), d32.abs()),
    )
}

fn disorder_transfer() -> Outcome {
    const ELLS: [usize; 4] = [2, 4, 8, 16];
    const REALIZATIONS: usize = 20;
    let table = zeta_table(FitMode::Cost, &ELLS);
    let spec = ModelSpec::tfi_block_disorder(TFI_SITES, 4, 0);
    let modes = default_modes(&spec).unwrap();
    let sched = schedule();
    let avg = |p: &Protocol| disorder_average(&spec, REALIZATIONS, 1, modes, &sched, p, default_block_control());
    let means: Vec<f64> = ELLS
        .iter()
        .map(|&ell| {
            let p = Protocol::universal(fit_inverse::<f64>(ell, table.zeta(ell).unwrap(), FitMode::Cost).unwrap(), 4.0);
            avg(&p.unwrap()).unwrap().0.abs()
        })
        .collect();
    let monotone = means.windows(2).all(|w| w[1] < w[0]);
    let var = maximize_log(
        |mu| Ok(avg(&Protocol::variational(8, mu, VariationalEnsemble::Ground))?.0),
        &VARIATIONAL_MU_SCAN,
        "mu",
    )
    .unwrap();
    let ratio = means[2] / var.value.abs();
    Outcome::new(
        monotone && ratio <= DISORDER_FACTOR,
        format!(
            "mean |log F|/N over ell {ELLS:?} = [{}], monotone: {monotone}; variational ell=8 {:.5} (mu {:.3}), ratio {ratio:.2} (<= {DISORDER_FACTOR})",
            fmt_list(&means, 5),
            var.value.abs(),
            var.x
        ),
    )
}

fn omega_scan(spec: &ModelSpec, ells: &[usize], form: AsymptoteForm) -> (Vec<f64>, unicd::scaling::AsymptoteFit) {
    let table = zeta_table(FitMode::Cost, ells);
    let pts = optimize_omega(spec, ells, &table, &schedule(), &ExperimentOptions::default()).expect("Omega scan");
    let omegas: Vec<f64> = pts.iter().map(|p| p.value).collect();
    let xy: Vec<(f64, f64)> = pts.iter().map(|p| (p.ell as f64, p.value)).collect();
    let lo = ells[0] as f64;
    let hi = *ells.last().unwrap() as f64;
    (omegas, fit_asymptote(&xy, form, [lo, hi]).expect("fit"))
}

fn omega_linear_nnn() -> Outcome {
    let ells: Vec<usize> = (2..=10).collect();
    let (om, fit) = omega_scan(&ModelSpec::nnn_tfi(NNN_SITES), &ells, AsymptoteForm::Linear);
    Outcome::new(
        fit.r2 >= OMEGA_LINEAR_R2 && fit.params[0] > 0.0,
        format!(
            "Omega* = [{}], slope {:.3}, R2 = {:.4} (>= {OMEGA_LINEAR_R2})",
            fmt_list(&om, 2),
            fit.params[0],
            fit.r2
        ),
    )
}

fn omega_power_xxz() -> Outcome {
    let ells: Vec<usize> = (2..=10).collect();
    let (om, fit) = omega_scan(&ModelSpec::xxz_anneal(XXZ_SITES), &ells, AsymptoteForm::Power);
    let p = fit.params[1];
    Outcome::new(
        (XXZ_EXPONENT[0]..=XXZ_EXPONENT[1]).contains(&p),
        format!("Omega* = [{}], exponent {p:.3} (in {XXZ_EXPONENT:?}), R2 = {:.4}", fmt_list(&om, 2), fit.r2),
    )
}

fn cost_vs_action() -> Outcome {
    const ELLS: [usize; 4] = [2, 4, 6, 8];
    let cost = zeta_table(FitMode::Cost, &ELLS);
    let action = zeta_table(FitMode::Action, &ELLS);
    let rows = compare_cost_action(&ModelSpec::nnn_tfi(NNN_SITES), &ELLS, &cost, &action, &schedule(), &ExperimentOptions::default())
        .expect("comparison");
    let mut pass = true;
    let mut parts = Vec::new();
    for r in &rows {
        let gap = (r.f_cost - r.f_action).abs() / (1.0 - r.f_cost.min(r.f_action));
        let var_ok = r.f_variational >= r.f_cost.max(r.f_action) - VARIATIONAL_SLACK;
        pass &= gap <= COST_ACTION_GAP && var_ok;
        parts.push(format!(
            "ell={} F cost/action/var {:.3}/{:.3}/{:.3} gap {gap:.3}{}",
            r.ell,
            r.f_cost,
            r.f_action,
            r.f_variational,
            if var_ok { "" } else { " var-below" }
        ));
    }
    Outcome::new(pass, format!("{}; gap tol {COST_ACTION_GAP}, variational slack {VARIATIONAL_SLACK:.0e}", parts.join("; ")))
}

const GROWTH_P: usize = 10;
const GROWTH_RANGE: [usize; 2] = [5, 15];
const GROWTH_WIDTH: f64 = 2.0;
// Coefficients past the fit window keep the smoothing unbiased at its edge.
const GROWTH_N_MAX: usize = 25;

fn growth_of(spec: &ModelSpec) -> f64 {
    let seed = default_seed(spec).unwrap();
    let runs: Vec<LanczosResult> = coupling_variants(spec, CouplingName::default_for(spec.name), 0.05, 3)
        .iter()
        .map(|v| lanczos_coefficients(v, 0.5, &seed, &LanczosOptions::new(GROWTH_N_MAX, GROWTH_P)).unwrap())
        .collect();
    growth_exponent(&average_coefficients(&runs), GROWTH_RANGE, GROWTH_WIDTH).unwrap().one_over_alpha
}

fn operator_growth() -> Outcome {
    let synthetic: Vec<f64> = (1..=40).map(|n| (n as f64).sqrt()).collect();
    let syn = growth_exponent(&synthetic, [1, 40], 0.0).unwrap().one_over_alpha;
    let syn_ok = (syn - 0.5).abs() <= SYNTHETIC_GROWTH_TOL;
    let xxz = growth_of(&ModelSpec::xxz_static(30, 1.0));
    let nnn = growth_of(&ModelSpec::nnn_tfi(30));
    let xxz_ok = (XXZ_GROWTH[0]..=XXZ_GROWTH[1]).contains(&xxz);
    let nnn_ok = (NNN_GROWTH[0]..=NNN_GROWTH[1]).contains(&nnn);
    Outcome::new(
        syn_ok && xxz_ok && nnn_ok,
        format!(
            "p={GROWTH_P}, n in {GROWTH_RANGE:?}: XXZ 1/alpha {xxz:.3} (in {XXZ_GROWTH:?}: {xxz_ok}), NNN 1/alpha {nnn:.3} (in {NNN_GROWTH:?}: {nnn_ok}), synthetic sqrt(n) {syn:.14} ({syn_ok})"
        ),
    )
}

fn random_operator(rng: &mut ChaCha8Rng, n: usize, terms: usize) -> PauliOperator<f64> {
    let mask = (1u64 << n) - 1;
    PauliOperator::from_terms(
        n,
        (0..terms).map(|_| {
            let s = PauliString::from_masks(rng.gen::<u64>() & mask, rng.gen::<u64>() & mask);
            (s, C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
        }),
    )
}

fn hygiene() -> Outcome {
    let mut notes = Vec::new();
    let mut pass = true;

    // Unitarity of counterdiabatic drives.
    let sched = schedule();
    let mut drift = 0.0f64;
    for spec in [ModelSpec::nnn_tfi(NNN_SITES), ModelSpec::xxz_anneal(XXZ_SITES)] {
        let p = Protocol::universal(fit_inverse::<f64>(4, 0.12, FitMode::Cost).unwrap(), 6.0).unwrap();
        let r = evolve(&spec, &sched, &p, &EvolveOptions::default()).unwrap();
        drift = drift.max(r.norm_drift);
    }
    pass &= drift <= UNITARITY_TOL;
    notes.push(format!("norm drift {drift:.1e}"));

    // Pauli algebra against dense matrices.
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut pauli = 0.0f64;
    for n in 1..=6 {
        for _ in 0..5 {
            let a = random_operator(&mut rng, n, 12);
            let b = random_operator(&mut rng, n, 12);
            let (da, db) = (a.to_dense(n).unwrap(), b.to_dense(n).unwrap());
            pauli = pauli.max(max_abs_diff(&a.mul(&b).to_dense(n).unwrap(), &(&da * &db)));
            pauli = pauli.max(max_abs_diff(&a.commutator(&b).to_dense(n).unwrap(), &(&da * &db - &db * &da)));
            pauli = pauli.max(max_abs_diff(&a.adjoint().to_dense(n).unwrap(), &da.adjoint()));
            let tr = (da.adjoint() * &db).trace() / C64::new((1u64 << n) as f64, 0.0);
            pauli = pauli.max((a.frobenius_inner(&b) - tr).norm());
        }
    }
    pass &= pauli <= PAULI_ORACLE_TOL;
    notes.push(format!("Pauli vs dense {pauli:.1e}"));

    // Monomial -> Chebyshev -> monomial, relative to the largest coefficient.
    let mut roundtrip = 0.0f64;
    for ell in 1..=12 {
        let alphas: Vec<f64> = (0..ell).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let back = odd_chebyshev_to_monomial(&odd_monomial_to_chebyshev(&alphas));
        let scale = alphas.iter().fold(0.0f64, |m, a| m.max(a.abs()));
        roundtrip = roundtrip.max(alphas.iter().zip(&back).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max) / scale);
    }
    pass &= roundtrip <= ROUNDTRIP_TOL;
    notes.push(format!("Chebyshev roundtrip {roundtrip:.1e}"));

    // Spectral sum rule: total weight equals the ground-state variance of dH.
    let mut sum_rule = 0.0f64;
    for spec in [ModelSpec::nnn_tfi(8), ModelSpec::xxz_anneal(8)] {
        let model = DenseModel::new(&spec, Sector::ground_state(&spec), 14).unwrap();
        let sd = diagonalize_model(&model, 0.4, &Ensemble::Ground).unwrap();
        let m = &sd.m;
        let variance = (m * m)[(0, 0)].re - m[(0, 0)].norm_sqr();
        let lines = sd.lines();
        let hi = lines.last().unwrap().omega * 1.01;
        let hist = histogram(&lines, &Binning { lo: 0.0, hi, bins: 64, kernel: Kernel::Hard }).unwrap();
        let gauss = histogram(&lines, &Binning { lo: 0.0, hi, bins: 64, kernel: Kernel::Gaussian }).unwrap();
        for total in [lines.iter().map(|l| l.weight).sum::<f64>(), hist.total(), gauss.total()] {
            sum_rule = sum_rule.max((total - variance).abs() / variance);
        }
    }
    pass &= sum_rule <= SUM_RULE_TOL;
    notes.push(format!("sum rule {sum_rule:.1e}"));

    // Fixed-step determinism.
    let spec = ModelSpec::nnn_tfi(8);
    let p = Protocol::universal(fit_inverse::<f64>(3, 0.15, FitMode::Cost).unwrap(), 5.0).unwrap();
    let opts = EvolveOptions { control: StepControl::Fixed { steps: 300 }, ..Default::default() };
    let csv = || {
        let mut buf = Vec::new();
        evolve(&spec, &sched, &p, &opts).unwrap().write_csv(&mut buf).unwrap();
        buf
    };
    let identical = csv() == csv();
    pass &= identical;
    notes.push(format!("fixed-step CSV identical: {identical}"));

    Outcome::new(
        pass,
        format!(
            "{} (tols {UNITARITY_TOL:.0e}/{PAULI_ORACLE_TOL:.0e}/{ROUNDTRIP_TOL:.0e}/{SUM_RULE_TOL:.0e})",
            notes.join(", ")
        ),
    )
}

fn main() {
    let checks = [
        Check { id: 1, name: "exact CD is transitionless", run: exact_cd_transitionless },
        Check { id: 2, name: "dual-oracle AGP equality", run: dual_oracle },
        Check { id: 3, name: "Krylov saturation", run: krylov_saturation },
        Check { id: 4, name: "zeta*(ell) ~ log(ell)/ell", run: zeta_law },
        Check { id: 5, name: "clean-chain fidelity convergence", run: fidelity_convergence },
        Check { id: 6, name: "disorder transfer", run: disorder_transfer },
        Check { id: 7, name: "Omega*(ell) linear, NNN", run: omega_linear_nnn },
        Check { id: 8, name: "Omega*(ell) power law, XXZ", run: omega_power_xxz },
        Check { id: 9, name: "cost vs action", run: cost_vs_action },
        Check { id: 10, name: "operator-growth exponents", run: operator_growth },
        Check { id: 11, name: "numerical hygiene", run: hygiene },
    ];
    let only = selection(std::env::args().skip(1));
    let failures = run(&checks, only.as_deref());
    println!("acceptance: {} checked, {failures} failed", only.map_or(checks.len(), |o| o.len()));
    if failures > 0 {
        std::process::exit(1);
    }
}
