//! Momentum-space solver for the transverse-field Ising families.
//!
//! After a Jordan–Wigner transformation (field along the fermion number
//! axis) the chain is quadratic, `H = 1/2 sum_q Psi_q^dagger H_q Psi_q`, with
//! Nambu spinors `Psi_q = (c_{q,a}, c^dagger_{-q,a})` over the `N_B` sites of
//! a unit cell. For cell momentum `q`
//!
//! ```text
//! H_q = [[ A(q),   D(q)      ],
//!        [ D(q)^+, -A(-q)^T  ]]
//! ```
//!
//! with `A` holding the on-site `2 h_a` and the `-J` hoppings, and `D` the
//! antisymmetric `-J` pairing. The bond leaving the cell picks up the
//! Bloch phase `e^{iq}`. Momenta are on the antiperiodic (Neveu–Schwarz)
//! grid `q = (2j - 1) pi / M`, `j = 1..M/2`, for `M` cells: the
//! paramagnetic ground state lives in the even fermion-parity sector.
//!
//! A quadratic gauge potential evolves each block independently, so the
//! many-body fidelity factorizes: `F = prod_q |det(W_target^+ W_q)|^2`, where
//! the columns of `W_q` are the evolved negative-energy orbitals.
//! The clean chain (`N_B = 1`) reduces to two-level problems
//! `h_q = n(lambda) . tau` and takes a closed-form path.

use std::f64::consts::PI;
use std::io::Write;

use nalgebra::DMatrix;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::ed::hermitian_eigen;
use crate::evolution::DEFAULT_MAX_AGP_ROTATION;
use crate::error::{Error, Result};
use crate::integrate::{propagate, DenseStepper, SpinStepper, StepControl, StepStats};
use crate::models::{omega_max, ModelKind, ModelSpec, Schedule};
use crate::protocol::{Protocol, VariationalEnsemble};
use crate::spectral::{variational_from_lines_ridge, SpectralLine, DEGENERACY_TOL, VARIATIONAL_RIDGE};
use crate::C64;

/// Knots of the lambda grid on which variational coefficients are refitted.
pub const DEFAULT_VARIATIONAL_KNOTS: usize = 64;

#[derive(Clone, Debug)]
pub struct MomentumBlock {
    pub k: f64,
    /// `H_q` at `lambda = 0` and `lambda = 1`; `H_q(lambda)` is linear.
    pub h0: DMatrix<C64>,
    pub h1: DMatrix<C64>,
}

impl MomentumBlock {
    pub fn dim(&self) -> usize {
        self.h0.nrows()
    }

    pub fn hamiltonian(&self, lambda: f64) -> DMatrix<C64> {
        self.h0.scale(1.0 - lambda) + self.h1.scale(lambda)
    }

    pub fn dlambda_h(&self) -> DMatrix<C64> {
        &self.h1 - &self.h0
    }

    /// Single-particle energies, ascending.
    pub fn energies(&self, lambda: f64) -> Vec<f64> {
        hermitian_eigen(&self.hamiltonian(lambda)).0
    }

    /// Negative-energy orbitals as columns: the many-body ground state.
    pub fn ground_orbitals(&self, lambda: f64) -> DMatrix<C64> {
        let (_, v) = hermitian_eigen(&self.hamiltonian(lambda));
        v.columns(0, self.dim() / 2).into_owned()
    }

    /// Pauli vector `n` with `h_q = n . tau`; two-level blocks only.
    fn pauli_vector(h: &DMatrix<C64>) -> [f64; 3] {
        [h[(1, 0)].re, h[(1, 0)].im, 0.5 * (h[(0, 0)].re - h[(1, 1)].re)]
    }
}

fn check_free_fermion(spec: &ModelSpec) -> Result<usize> {
    spec.validate()?;
    match spec.name {
        ModelKind::TfiClean => Ok(1),
        ModelKind::TfiBlockDisorder => Ok(spec.disorder.as_ref().map(|d| d.block_size).unwrap_or(1)),
        _ => Err(Error::NotFreeFermion(spec.name.to_string())),
    }
}

/// Number of momentum blocks for `spec.n_sites` sites.
pub fn default_modes(spec: &ModelSpec) -> Result<usize> {
    let nb = check_free_fermion(spec)?;
    if spec.n_sites % (2 * nb) != 0 {
        return Err(Error::invalid(format!(
            "{} sites cannot be split into an even number of {nb}-site cells",
            spec.n_sites
        )));
    }
    Ok(spec.n_sites / (2 * nb))
}

/// Momentum blocks at `q_j = (2j - 1) pi / (2 n_modes)`, `j = 1..n_modes`.
pub fn build_blocks(spec: &ModelSpec, n_modes: usize) -> Result<Vec<MomentumBlock>> {
    let nb = check_free_fermion(spec)?;
    if n_modes == 0 {
        return Err(Error::invalid("need at least one momentum mode"));
    }
    let fields: Vec<f64> = match &spec.disorder {
        Some(d) if spec.name == ModelKind::TfiBlockDisorder => d.fields.clone(),
        _ => vec![spec.couplings.h],
    };
    let j = spec.couplings.j;
    let cells = 2 * n_modes;
    Ok((1..=n_modes)
        .map(|idx| {
            let q = (2 * idx - 1) as f64 * PI / cells as f64;
            MomentumBlock { k: q, h0: nambu(&fields, 0.0, 1.0, q), h1: nambu(&vec![0.0; nb], j, 0.0, q) }
        })
        .collect())
}

/// `H_q` for fields `h_a * field_scale` and coupling `j`.
fn nambu(fields: &[f64], j: f64, field_scale: f64, q: f64) -> DMatrix<C64> {
    let nb = fields.len();
    let phase = C64::new(q.cos(), q.sin());
    let a_of = |sign: f64| {
        let ph = if sign > 0.0 { phase } else { phase.conj() };
        let mut a = DMatrix::<C64>::zeros(nb, nb);
        for (s, h) in fields.iter().enumerate() {
            a[(s, s)] += C64::new(2.0 * h * field_scale, 0.0);
        }
        for s in 0..nb.saturating_sub(1) {
            a[(s, s + 1)] -= C64::new(j, 0.0);
            a[(s + 1, s)] -= C64::new(j, 0.0);
        }
        a[(nb - 1, 0)] -= ph * j;
        a[(0, nb - 1)] -= ph.conj() * j;
        a
    };
    let p_of = |sign: f64| {
        let ph = if sign > 0.0 { phase } else { phase.conj() };
        let mut p = DMatrix::<C64>::zeros(nb, nb);
        for s in 0..nb.saturating_sub(1) {
            p[(s, s + 1)] -= C64::new(j, 0.0);
        }
        p[(nb - 1, 0)] -= ph * j;
        p
    };
    let a_plus = a_of(1.0);
    let a_minus = a_of(-1.0);
    let d = p_of(1.0) - p_of(-1.0).transpose();
    let mut h = DMatrix::<C64>::zeros(2 * nb, 2 * nb);
    h.view_mut((0, 0), (nb, nb)).copy_from(&a_plus);
    h.view_mut((0, nb), (nb, nb)).copy_from(&d);
    h.view_mut((nb, 0), (nb, nb)).copy_from(&d.adjoint());
    h.view_mut((nb, nb), (nb, nb)).copy_from(&(-a_minus.transpose()));
    h
}

/// Clean-chain quasiparticle energy `2 sqrt(J^2 + h^2 - 2 J h cos k)` at `lambda`.
pub fn dispersion(spec: &ModelSpec, lambda: f64, k: f64) -> f64 {
    let jl = lambda * spec.couplings.j;
    let hl = (1.0 - lambda) * spec.couplings.h;
    2.0 * (jl * jl + hl * hl - 2.0 * jl * hl * k.cos()).max(0.0).sqrt()
}

/// Ground-state energy `-1/2 sum |e|` over all blocks (both signs of `q`).
pub fn ground_energy(blocks: &[MomentumBlock], lambda: f64) -> f64 {
    blocks.iter().map(|b| b.energies(lambda).iter().filter(|e| **e < 0.0).sum::<f64>()).sum()
}

/// Variational coefficients tabulated on a lambda grid, shared by all
/// momenta, interpolated linearly in between.
#[derive(Clone, Debug)]
pub struct VariationalTable {
    pub lambdas: Vec<f64>,
    pub coeffs: Vec<Vec<f64>>,
    pub scale: f64,
}

impl VariationalTable {
    /// Fits the spectral function of all blocks: pair-creation lines for the
    /// ground ensemble, every single-particle transition at infinite
    /// temperature.
    pub fn fit(
        blocks: &[MomentumBlock],
        ell: usize,
        mu: f64,
        ensemble: VariationalEnsemble,
        scale: f64,
        knots: usize,
    ) -> Result<Self> {
        let knots = knots.max(1);
        let lambdas: Vec<f64> = (0..=knots).map(|i| i as f64 / knots as f64).collect();
        let coeffs = lambdas
            .par_iter()
            .map(|&l| {
                let mut lines = Vec::new();
                for b in blocks {
                    let (e, v) = hermitian_eigen(&b.hamiltonian(l));
                    let m = v.ad_mul(&(b.dlambda_h() * &v));
                    let half = b.dim() / 2;
                    let (lo, hi) = match ensemble {
                        VariationalEnsemble::Ground => (half, half),
                        VariationalEnsemble::InfiniteTemperature => (0, b.dim()),
                    };
                    for p in lo..b.dim() {
                        for n in 0..hi.min(p) {
                            let w = m[(p, n)].norm_sqr();
                            if w > 0.0 {
                                lines.push(SpectralLine { omega: e[p] - e[n], weight: w });
                            }
                        }
                    }
                }
                Ok(variational_from_lines_ridge(&lines, ell, mu, Some(scale), VARIATIONAL_RIDGE)?.cheb)
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(VariationalTable { lambdas, coeffs, scale })
    }

    pub fn eval(&self, lambda: f64, omega: f64) -> f64 {
        let n = self.lambdas.len() - 1;
        let pos = (lambda.clamp(0.0, 1.0) * n as f64).min(n as f64);
        let i = (pos.floor() as usize).min(n.saturating_sub(1));
        let s = if n == 0 { 0.0 } else { pos - i as f64 };
        let x = omega / self.scale;
        let a = crate::chebyshev::odd_series(&self.coeffs[i], x);
        if s == 0.0 || n == 0 {
            return a;
        }
        let b = crate::chebyshev::odd_series(&self.coeffs[i + 1], x);
        (1.0 - s) * a + s * b
    }
}

/// Protocol with its spectrum-dependent parts resolved.
enum Resolved<'a> {
    Fixed(&'a Protocol),
    Variational(VariationalTable),
}

impl Resolved<'_> {
    fn f(&self, lambda: f64, omega: f64) -> f64 {
        match self {
            Resolved::Fixed(p) => p.agp_function(omega).expect("fixed protocol"),
            Resolved::Variational(t) => t.eval(lambda, omega),
        }
    }
}

/// Gauge potential of one block in its own basis at `lambda`.
fn block_agp(block: &MomentumBlock, lambda: f64, proto: &Resolved<'_>) -> DMatrix<C64> {
    let (e, v) = hermitian_eigen(&block.hamiltonian(lambda));
    let m = v.ad_mul(&(block.dlambda_h() * &v));
    let d = block.dim();
    let a = DMatrix::from_fn(d, d, |i, j| {
        let om = e[i] - e[j];
        if i == j || om.abs() <= DEGENERACY_TOL {
            C64::new(0.0, 0.0)
        } else {
            C64::new(0.0, proto.f(lambda, om)) * m[(i, j)]
        }
    });
    &v * a * v.adjoint()
}

/// Points in lambda at which a universal drive's rotation is estimated.
const ROTATION_SAMPLES: usize = 33;

/// Refuses universal drives whose gauge potential in some block averages
/// above the rotation budget of the dense solver.
fn check_rotation(block: &MomentumBlock, proto: &Resolved<'_>) -> Result<()> {
    let mean = (0..ROTATION_SAMPLES)
        .map(|i| {
            let a = block_agp(block, i as f64 / (ROTATION_SAMPLES - 1) as f64, proto);
            hermitian_eigen(&a).0.iter().fold(0.0f64, |m, e| m.max(e.abs()))
        })
        .sum::<f64>()
        / ROTATION_SAMPLES as f64;
    if mean > DEFAULT_MAX_AGP_ROTATION {
        return Err(Error::Resource(format!(
            "mode k = {:.6}: gauge potential norm ~{mean:.3e} exceeds the rotation budget {DEFAULT_MAX_AGP_ROTATION:.1e}",
            block.k
        )));
    }
    Ok(())
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModeFidelity {
    pub k: f64,
    pub fidelity: f64,
    /// Norm deviation of the evolved orbitals, `max |W^+ W - 1|`.
    pub norm_error: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FidelityDensity {
    pub n_sites: usize,
    pub log_fidelity: f64,
    /// `log F / N`.
    pub density: f64,
    pub modes: Vec<ModeFidelity>,
}

impl FidelityDensity {
    pub fn from_modes(n_sites: usize, modes: Vec<ModeFidelity>) -> Self {
        let logs: Vec<f64> = modes.iter().map(|m| m.fidelity.ln()).collect();
        let log_fidelity = pairwise_sum(&logs);
        FidelityDensity { n_sites, log_fidelity, density: log_fidelity / n_sites as f64, modes }
    }

    /// CSV `(k, 1 - F_k)`.
    pub fn write_modes_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(out);
        w.write_record(["k", "infidelity"])?;
        for m in &self.modes {
            w.write_record([m.k.to_string(), (1.0 - m.fidelity).to_string()])?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Order-stable pairwise summation.
pub fn pairwise_sum(x: &[f64]) -> f64 {
    if x.len() <= 8 {
        return x.iter().sum();
    }
    let (a, b) = x.split_at(x.len() / 2);
    pairwise_sum(a) + pairwise_sum(b)
}

/// Fidelity of the evolved orbitals `w` with the ground state at `lambda`.
pub fn mode_fidelity(block: &MomentumBlock, w: &DMatrix<C64>, lambda: f64) -> f64 {
    let target = block.ground_orbitals(lambda);
    let overlap = target.ad_mul(w);
    overlap.determinant().norm_sqr()
}

/// Integrator settings for block evolution.
pub fn default_block_control() -> StepControl {
    StepControl::adaptive(1e-10)
}

/// Evolves the ground orbitals of `H_q(0)` to `t = T`.
fn evolve_dense(
    block: &MomentumBlock,
    schedule: &Schedule,
    proto: &Resolved<'_>,
    control: StepControl,
) -> Result<(DMatrix<C64>, StepStats)> {
    let w0 = block.ground_orbitals(0.0);
    let frozen = matches!(proto, Resolved::Fixed(Protocol::None));
    let mut stepper = DenseStepper {
        generator: |t: f64| {
            let (l, ldot) = schedule.at(t);
            let h = block.hamiltonian(l);
            if frozen || ldot == 0.0 {
                Ok(h)
            } else {
                Ok(h + block_agp(block, l, proto).scale(ldot))
            }
        },
        lambda: |t: f64| schedule.at(t).0,
    };
    let mut stats = StepStats::default();
    let mut hint = 0.0;
    let tt = schedule.total_time;
    let w = propagate(&mut stepper, w0, 0.0, tt, control.segment(tt, tt), &mut hint, &mut stats)?;
    Ok((w, stats))
}

fn cross(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]]
}

/// Two-level evolution: `G = n + ldot r(lambda) (n x n')/(2|n|^2)`, where the
/// last term is the exact gauge potential scaled by `r = -omega f(omega)` at
/// the transition frequency `omega = 2|n|`.
fn evolve_spin(
    block: &MomentumBlock,
    schedule: &Schedule,
    proto: &Resolved<'_>,
    control: StepControl,
) -> Result<(DMatrix<C64>, StepStats)> {
    let n0 = MomentumBlock::pauli_vector(&block.h0);
    let n1 = MomentumBlock::pauli_vector(&block.h1);
    let dn = [n1[0] - n0[0], n1[1] - n0[1], n1[2] - n0[2]];
    let field = |t: f64| {
        let (l, ldot) = schedule.at(t);
        let n = [0, 1, 2].map(|i| (1.0 - l) * n0[i] + l * n1[i]);
        let r2 = n[0] * n[0] + n[1] * n[1] + n[2] * n[2];
        if ldot == 0.0 || r2 == 0.0 {
            return n;
        }
        let om = 2.0 * r2.sqrt();
        let r = -om * proto.f(l, om);
        let c = cross(n, dn);
        [0, 1, 2].map(|i| n[i] + ldot * r * c[i] / (2.0 * r2))
    };
    let mut stepper = SpinStepper { field, lambda: |t: f64| schedule.at(t).0 };
    let w0 = block.ground_orbitals(0.0);
    let psi = [w0[(0, 0)], w0[(1, 0)]];
    let mut stats = StepStats::default();
    let mut hint = 0.0;
    let tt = schedule.total_time;
    let out = propagate(&mut stepper, psi, 0.0, tt, control.segment(tt, tt), &mut hint, &mut stats)?;
    Ok((DMatrix::from_column_slice(2, 1, &out), stats))
}

/// Final orbitals of one block under `protocol`; variational protocols must
/// go through [`anneal`], which fits the shared coefficients first.
pub fn evolve_block(
    block: &MomentumBlock,
    schedule: &Schedule,
    protocol: &Protocol,
    control: StepControl,
) -> Result<DMatrix<C64>> {
    protocol.validate()?;
    if matches!(protocol, Protocol::Variational { .. }) {
        return Err(Error::invalid("variational coefficients are shared across blocks; use anneal"));
    }
    let proto = Resolved::Fixed(protocol);
    run_block(block, schedule, &proto, control).map(|(w, _)| w)
}

fn run_block(
    block: &MomentumBlock,
    schedule: &Schedule,
    proto: &Resolved<'_>,
    control: StepControl,
) -> Result<(DMatrix<C64>, StepStats)> {
    let res = if block.dim() == 2 {
        evolve_spin(block, schedule, proto, control)
    } else {
        evolve_dense(block, schedule, proto, control)
    };
    res.map_err(|e| match e {
        Error::Integrator { t, lambda, reason } => {
            Error::Integrator { t, lambda, reason: format!("mode k = {:.6}: {reason}", block.k) }
        }
        other => other,
    })
}

/// Per-mode fidelities of evolved orbitals with the ground state of `H(1)`.
pub fn fidelity_density(blocks: &[MomentumBlock], finals: &[DMatrix<C64>], n_sites: usize) -> FidelityDensity {
    let modes = blocks
        .iter()
        .zip(finals)
        .map(|(b, w)| {
            let gram = w.ad_mul(w);
            let norm_error = (gram - DMatrix::<C64>::identity(w.ncols(), w.ncols()))
                .iter()
                .map(|z| z.norm())
                .fold(0.0, f64::max);
            ModeFidelity { k: b.k, fidelity: mode_fidelity(b, w, 1.0), norm_error }
        })
        .collect();
    FidelityDensity::from_modes(n_sites, modes)
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct FreeFermionRun {
    pub protocol: String,
    pub schedule: Schedule,
    pub fidelity: FidelityDensity,
    pub steps: usize,
}

/// Anneals every momentum block and reports the fidelity density.
pub fn anneal(
    spec: &ModelSpec,
    n_modes: usize,
    schedule: &Schedule,
    protocol: &Protocol,
    control: StepControl,
) -> Result<FreeFermionRun> {
    protocol.validate()?;
    let blocks = build_blocks(spec, n_modes)?;
    let nb = check_free_fermion(spec)?;
    let resolved = match protocol {
        Protocol::Variational { ell, mu, ensemble } => {
            let scale = omega_max(spec, None)?;
            Resolved::Variational(VariationalTable::fit(&blocks, *ell, *mu, *ensemble, scale, DEFAULT_VARIATIONAL_KNOTS)?)
        }
        p => Resolved::Fixed(p),
    };
    if matches!(protocol, Protocol::Universal { .. }) {
        blocks.par_iter().try_for_each(|b| check_rotation(b, &resolved))?;
    }
    let results = blocks
        .par_iter()
        .map(|b| run_block(b, schedule, &resolved, control))
        .collect::<Result<Vec<_>>>()?;
    let steps = results.iter().map(|(_, s)| s.accepted).sum();
    let finals: Vec<DMatrix<C64>> = results.into_iter().map(|(w, _)| w).collect();
    let fidelity = fidelity_density(&blocks, &finals, 2 * n_modes * nb);
    Ok(FreeFermionRun { protocol: protocol.name().to_string(), schedule: *schedule, fidelity, steps })
}

/// Mean and standard error of `log F / N` over disorder realizations with
/// seeds `seed, seed + 1, ...`.
pub fn disorder_average(
    template: &ModelSpec,
    realizations: usize,
    seed: u64,
    n_modes: usize,
    schedule: &Schedule,
    protocol: &Protocol,
    control: StepControl,
) -> Result<(f64, f64)> {
    let d = template
        .disorder
        .as_ref()
        .ok_or_else(|| Error::invalid("disorder average needs a TFI_BLOCK_DISORDER template"))?;
    if realizations == 0 {
        return Err(Error::invalid("need at least one disorder realization"));
    }
    let densities = (0..realizations as u64)
        .map(|r| {
            let mut spec = template.clone();
            spec.disorder = Some(crate::models::Disorder::sample(d.block_size, spec.couplings.h, seed + r));
            anneal(&spec, n_modes, schedule, protocol, control).map(|run| run.fidelity.density)
        })
        .collect::<Result<Vec<f64>>>()?;
    let n = densities.len() as f64;
    let mean = pairwise_sum(&densities) / n;
    let var = if densities.len() > 1 {
        densities.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0)
    } else {
        0.0
    };
    Ok((mean, (var / n).sqrt()))
}
