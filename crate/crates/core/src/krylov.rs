//! Lanczos coefficients of Liouvillian operator growth under the
//! infinite-temperature inner product, with Pauli-support truncation.
//!
//! Starting from a normalized seed `O_0`, `A_1 = L O_0`, and for `n >= 1`
//! `b_n = |A_n|`, `O_n = A_n / b_n`, `A_{n+1} = L O_n - b_n O_{n-1}` with
//! `L = [H, .]`. After each application of `L`, strings whose support
//! exceeds `p` are dropped; support is measured by spatial extent (the
//! shortest interval, cyclic on periodic chains, covering every non-identity
//! site) or, optionally, by weight (the number of non-identity sites).
//!
//! For translation-invariant chains and seeds every Krylov operator is
//! translation invariant, and is stored as one coefficient per translation
//! orbit: `O = sum_s c_s S(s)`, `S(s) = sum_{j<N} T^j s`, keyed by the
//! orbit's canonical (smallest) string. Then `[H, S(s)] = S([H, s])` and
//! `<S(s), S(s)> = N^2 / |orbit(s)|`.

use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::models::{dlambda_h, hamiltonian, ModelKind, ModelSpec};
use crate::pauli::{Axis, FxMap, PauliOperator, PauliString};
use crate::scaling::{csv_writer, r_squared};
use crate::spectral::Histogram;
use crate::C64;

/// Lanczos stops once `b_n` falls below this.
pub const BREAKDOWN_TOL: f64 = 1e-10;
const DROP_TOL: f64 = 1e-14;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LanczosOptions {
    pub n_max: usize,
    /// Largest Pauli support kept.
    pub p: usize,
    /// Orthogonalize each new operator against all previous ones.
    #[serde(default)]
    pub full_reorthogonalization: bool,
    #[serde(default)]
    pub metric: SupportMetric,
}

impl Default for LanczosOptions {
    fn default() -> Self {
        LanczosOptions { n_max: 25, p: 10, full_reorthogonalization: false, metric: SupportMetric::Extent }
    }
}

impl LanczosOptions {
    pub fn new(n_max: usize, p: usize) -> Self {
        LanczosOptions { n_max, p, ..Default::default() }
    }
}

/// How the support of a Pauli string is measured for truncation.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SupportMetric {
    #[default]
    Extent,
    Weight,
}

/// Length of the shortest interval covering every non-identity site;
/// intervals wrap around when `periodic`.
pub fn extent(s: &PauliString, n: usize, periodic: bool) -> usize {
    let m = s.support_mask();
    if m == 0 {
        return 0;
    }
    let hi = 63 - m.leading_zeros() as usize;
    let lo = m.trailing_zeros() as usize;
    if !periodic {
        return hi - lo + 1;
    }
    // n minus the longest cyclic run of identity sites.
    let (mut gap, mut run) = (lo + (n - 1 - hi), 0usize);
    for i in lo..=hi {
        if m >> i & 1 == 0 {
            run += 1;
            gap = gap.max(run);
        } else {
            run = 0;
        }
    }
    n - gap
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LanczosResult {
    /// `b_1, b_2, ...`
    pub b: Vec<f64>,
    pub p: usize,
    pub model: String,
    /// Whether the recursion stopped on a vanishing `b_n`.
    pub breakdown: bool,
    /// Strings (or orbits) held by each Krylov operator.
    pub terms: Vec<usize>,
    /// Largest `|<O_i, O_j>|`, `i != j`, over the stored operators; only
    /// computed with full reorthogonalization.
    pub max_overlap: Option<f64>,
    /// Whether the translation-reduced representation was used.
    pub reduced: bool,
}

type Coeffs = FxMap<PauliString, C64>;

/// Where Krylov operators live and how `L` acts on them.
struct Space {
    n: usize,
    reduced: bool,
    /// Hamiltonian terms touching each site.
    by_site: Vec<Vec<(PauliString, C64)>>,
    p: usize,
    metric: SupportMetric,
    periodic: bool,
}

fn rotate(m: u64, shift: usize, n: usize) -> u64 {
    PauliString::from_masks(m, 0).translate(shift, n).x_mask()
}

/// Canonical representative of the translation orbit of `s`, and its size.
pub fn canonical(s: PauliString, n: usize) -> (PauliString, usize) {
    let (x, z) = (s.x_mask(), s.z_mask());
    let mut best = (x, z);
    let mut period = n;
    for r in 1..n {
        let c = (rotate(x, r, n), rotate(z, r, n));
        if c == (x, z) && period == n {
            period = r;
        }
        if c < best {
            best = c;
        }
    }
    (PauliString::from_masks(best.0, best.1), period)
}

impl Space {
    fn new(h: &PauliOperator<f64>, reduced: bool, periodic: bool, opts: &LanczosOptions) -> Self {
        let n = h.n_sites();
        let mut by_site = vec![Vec::new(); n];
        for (s, w) in h.sorted_terms() {
            if s.is_identity() {
                continue;
            }
            for (site, _) in s.sites() {
                by_site[site].push((s, w));
            }
        }
        Space { n, reduced, by_site, p: opts.p, metric: opts.metric, periodic }
    }

    fn support(&self, s: &PauliString) -> usize {
        match self.metric {
            SupportMetric::Weight => s.support(),
            SupportMetric::Extent => extent(s, self.n, self.periodic),
        }
    }

    fn weight(&self, s: &PauliString) -> f64 {
        if self.reduced {
            let nf = self.n as f64;
            nf * nf / canonical(*s, self.n).1 as f64
        } else {
            1.0
        }
    }

    fn inner(&self, a: &Coeffs, b: &Coeffs) -> C64 {
        let (small, large, flip) = if a.len() <= b.len() { (a, b, false) } else { (b, a, true) };
        let mut acc = C64::new(0.0, 0.0);
        for (s, w) in small {
            if let Some(v) = large.get(s) {
                let term = if flip { v.conj() * w } else { w.conj() * v };
                acc += term * self.weight(s);
            }
        }
        acc
    }

    fn norm(&self, a: &Coeffs) -> f64 {
        a.iter().map(|(s, w)| w.norm_sqr() * self.weight(s)).sum::<f64>().sqrt()
    }

    fn from_operator(&self, op: &PauliOperator<f64>) -> Coeffs {
        let mut out = Coeffs::default();
        for (s, w) in op.iter() {
            if self.reduced {
                // A translate of s carries the same weight; S(c) counts each
                // distinct translate N/|orbit| times.
                let (c, orbit) = canonical(*s, self.n);
                out.insert(c, *w * orbit as f64 / self.n as f64);
            } else {
                out.insert(*s, *w);
            }
        }
        out
    }

    /// `[H, a]`, truncated to support `p`.
    fn liouvillian(&self, a: &Coeffs) -> Coeffs {
        let mut out = Coeffs::default();
        for (s, w) in a {
            let support = s.support_mask();
            for (site, _) in s.sites() {
                for (t, v) in &self.by_site[site] {
                    // Visit each overlapping term once, from its lowest shared site.
                    if (t.support_mask() & support).trailing_zeros() as usize != site {
                        continue;
                    }
                    if t.commutes_with(s) {
                        continue;
                    }
                    let (r, e) = t.mul_phase(s);
                    if self.support(&r) > self.p {
                        continue;
                    }
                    let key = if self.reduced { canonical(r, self.n).0 } else { r };
                    *out.entry(key).or_default() += *v * *w * i_pow(e) * 2.0;
                }
            }
        }
        out.retain(|_, w| w.norm() > DROP_TOL);
        out
    }
}

fn i_pow(e: u32) -> C64 {
    match e % 4 {
        0 => C64::new(1.0, 0.0),
        1 => C64::new(0.0, 1.0),
        2 => C64::new(-1.0, 0.0),
        _ => C64::new(0.0, -1.0),
    }
}

fn axpy(y: &mut Coeffs, a: C64, x: &Coeffs) {
    for (s, w) in x {
        *y.entry(*s).or_default() += a * w;
    }
    y.retain(|_, w| w.norm() > DROP_TOL);
}

fn is_translation_invariant(op: &PauliOperator<f64>) -> bool {
    op.translate(1).max_abs_diff(op) <= 1e-12 * (1.0 + op.norm())
}

/// Lanczos coefficients for `L = [h, .]` from `seed` (normalized here).
/// `periodic` marks a ring: extents wrap, and translation-invariant
/// operators are stored per orbit.
pub fn lanczos(h: &PauliOperator<f64>, seed: &PauliOperator<f64>, periodic: bool, opts: &LanczosOptions) -> Result<LanczosResult> {
    if opts.n_max < 2 {
        return Err(Error::invalid("n_max must be at least 2"));
    }
    if seed.n_sites() != h.n_sites() {
        return Err(Error::invalid("seed and Hamiltonian act on different chains"));
    }
    let reduced = periodic && h.n_sites() > 1 && is_translation_invariant(h) && is_translation_invariant(seed);
    let space = Space::new(h, reduced, periodic, opts);
    let mut cur = space.from_operator(seed);
    cur.retain(|s, _| space.support(s) <= opts.p);
    let norm = space.norm(&cur);
    if norm == 0.0 {
        return Err(Error::invalid("seed operator vanishes (after truncation to support p)"));
    }
    cur.values_mut().for_each(|w| *w /= norm);
    let mut prev: Option<Coeffs> = None;
    let mut history: Vec<Coeffs> = Vec::new();
    let mut b: Vec<f64> = Vec::new();
    let mut terms = vec![cur.len()];
    let mut breakdown = false;
    while b.len() < opts.n_max {
        let mut next = space.liouvillian(&cur);
        if let (Some(p), Some(&bn)) = (&prev, b.last()) {
            axpy(&mut next, C64::new(-bn, 0.0), p);
        }
        if opts.full_reorthogonalization {
            history.push(cur.clone());
            for _ in 0..2 {
                for q in &history {
                    let c = space.inner(q, &next);
                    axpy(&mut next, -c, q);
                }
            }
        }
        let bn = space.norm(&next);
        if bn < BREAKDOWN_TOL {
            breakdown = true;
            break;
        }
        next.values_mut().for_each(|w| *w /= bn);
        b.push(bn);
        terms.push(next.len());
        log::debug!("b_{} = {bn:.6} with {} strings", b.len(), next.len());
        prev = Some(std::mem::replace(&mut cur, next));
    }
    let max_overlap = if opts.full_reorthogonalization {
        history.push(cur);
        let mut m: f64 = 0.0;
        for i in 0..history.len() {
            for j in 0..i {
                m = m.max(space.inner(&history[i], &history[j]).norm());
            }
        }
        Some(m)
    } else {
        None
    };
    Ok(LanczosResult { b, p: opts.p, model: String::new(), breakdown, terms, max_overlap, reduced })
}

/// Default seed: normalized `dH/dlambda`; for the static XXZ chain, which
/// has none, the nearest-neighbour `sum Z Z`.
pub fn default_seed(spec: &ModelSpec) -> Result<PauliOperator<f64>> {
    let op = if spec.name == ModelKind::XxzStatic {
        let n = spec.n_sites;
        let bonds = if spec.boundary == crate::models::Boundary::Periodic { n } else { n - 1 };
        PauliOperator::from_terms(
            n,
            (0..bonds).map(|i| {
                let s = PauliString::from_sites(&sorted_pair(i, (i + 1) % n, Axis::Z)).expect("bond");
                (s, C64::new(1.0, 0.0))
            }),
        )
    } else {
        dlambda_h::<f64>(spec)?
    };
    let norm = op.norm();
    if norm == 0.0 {
        return Err(Error::invalid("default seed vanishes for this model"));
    }
    Ok(op.scale_real(1.0 / norm))
}

fn sorted_pair(i: usize, j: usize, a: Axis) -> [(usize, Axis); 2] {
    if i < j {
        [(i, a), (j, a)]
    } else {
        [(j, a), (i, a)]
    }
}

/// Lanczos coefficients of `spec` at `lambda`.
pub fn lanczos_coefficients(
    spec: &ModelSpec,
    lambda: f64,
    seed: &PauliOperator<f64>,
    opts: &LanczosOptions,
) -> Result<LanczosResult> {
    let h = hamiltonian::<f64>(spec, lambda)?;
    let periodic = spec.boundary == crate::models::Boundary::Periodic;
    let mut r = lanczos(&h, seed, periodic, opts)?;
    r.model = spec.name.to_string();
    Ok(r)
}

/// Which coupling is varied for coupling averages.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CouplingName {
    J,
    H,
    J2,
    Delta,
}

impl CouplingName {
    /// The coupling that sets the character of each family.
    pub fn default_for(kind: ModelKind) -> Self {
        match kind {
            ModelKind::XxzAnneal | ModelKind::XxzStatic => CouplingName::Delta,
            ModelKind::NnnTfi => CouplingName::J2,
            _ => CouplingName::H,
        }
    }

    fn get_mut(self, spec: &mut ModelSpec) -> &mut f64 {
        match self {
            CouplingName::J => &mut spec.couplings.j,
            CouplingName::H => &mut spec.couplings.h,
            CouplingName::J2 => &mut spec.couplings.j2,
            CouplingName::Delta => &mut spec.couplings.delta,
        }
    }
}

/// `count` copies of `spec` with `coupling` spread evenly over
/// `[1 - rel, 1 + rel]` times its value.
pub fn coupling_variants(spec: &ModelSpec, coupling: CouplingName, rel: f64, count: usize) -> Vec<ModelSpec> {
    (0..count.max(1))
        .map(|i| {
            let f = if count <= 1 { 1.0 } else { 1.0 - rel + 2.0 * rel * i as f64 / (count - 1) as f64 };
            let mut s = spec.clone();
            *coupling.get_mut(&mut s) *= f;
            s
        })
        .collect()
}

/// Elementwise mean over runs, on their common prefix.
pub fn average_coefficients(runs: &[LanczosResult]) -> Vec<f64> {
    let len = runs.iter().map(|r| r.b.len()).min().unwrap_or(0);
    (0..len).map(|i| runs.iter().map(|r| r.b[i]).sum::<f64>() / runs.len() as f64).collect()
}

/// Gaussian smoothing in `n` with standard deviation `width`; weights are
/// renormalized at the ends. `width = 0` returns the input.
pub fn smooth(b: &[f64], width: f64) -> Vec<f64> {
    if width <= 0.0 {
        return b.to_vec();
    }
    (0..b.len())
        .map(|i| {
            let (mut num, mut den) = (0.0, 0.0);
            for (j, v) in b.iter().enumerate() {
                let d = (i as f64 - j as f64) / width;
                let g = (-0.5 * d * d).exp();
                num += g * v;
                den += g;
            }
            num / den
        })
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GrowthFit {
    pub one_over_alpha: f64,
    pub prefactor: f64,
    pub r2: f64,
    /// Inclusive range of `n` (1-based, `b_1` first).
    pub range: [usize; 2],
    pub smoothing: f64,
}

/// Slope of `log b_n` against `log n` over `range` after smoothing.
pub fn growth_exponent(b: &[f64], range: [usize; 2], width: f64) -> Result<GrowthFit> {
    let s = smooth(b, width);
    let lo = range[0].max(1);
    let hi = range[1].min(b.len());
    if hi < lo || hi + 1 - lo < 6 {
        return Err(Error::invalid(format!(
            "growth fit needs at least 6 coefficients in [{}, {}], have {}",
            range[0],
            range[1],
            b.len()
        )));
    }
    let pts: Vec<(f64, f64)> = (lo..=hi).map(|n| (n as f64, s[n - 1])).collect();
    if pts.iter().any(|p| p.1 <= 0.0) {
        return Err(Error::numerical("nonpositive Lanczos coefficient in fit range"));
    }
    let fit = crate::scaling::fit_asymptote(&pts, crate::scaling::AsymptoteForm::Power, [lo as f64, hi as f64])?;
    Ok(GrowthFit { one_over_alpha: fit.params[1], prefactor: fit.params[0], r2: fit.r2, range: [lo, hi], smoothing: width })
}

/// First `n` (1-based) where two coefficient sequences differ by more than
/// `rel_tol` relative; `None` if they agree on their common prefix.
pub fn divergence_index(a: &[f64], b: &[f64], rel_tol: f64) -> Option<usize> {
    a.iter().zip(b).position(|(x, y)| (x - y).abs() > rel_tol * x.abs().max(y.abs())).map(|i| i + 1)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TailFit {
    pub alpha: f64,
    pub gamma: f64,
    /// Intercept `c` of `log Phi = c - gamma omega^alpha`.
    pub c: f64,
    /// In `log Phi` coordinates.
    pub r2: f64,
}

/// Fits `log Phi(omega) = c - Gamma omega^alpha` on bins with centers in
/// `range`. For each `alpha` the problem is linear in `(c, Gamma)`; `alpha` is
/// seeded on a grid over `[0.5, 3]` and refined by golden section.
pub fn tail_fit(hist: &Histogram, range: [f64; 2]) -> Result<TailFit> {
    let pts: Vec<(f64, f64)> = hist
        .centers
        .iter()
        .zip(&hist.values)
        .filter(|(c, _)| **c >= range[0] && **c <= range[1])
        .map(|(c, v)| (*c, *v))
        .collect();
    if pts.len() < 4 {
        return Err(Error::invalid(format!("tail fit needs at least 4 bins in [{}, {}]", range[0], range[1])));
    }
    if let Some((c, _)) = pts.iter().find(|p| p.1 <= 0.0) {
        return Err(Error::numerical(format!("spectral function not positive at omega = {c}")));
    }
    let xs: Vec<f64> = pts.iter().map(|p| p.0).collect();
    let ys: Vec<f64> = pts.iter().map(|p| p.1.ln()).collect();
    if xs.iter().any(|x| *x <= 0.0) {
        return Err(Error::invalid("tail fit range must be at positive frequencies"));
    }
    let solve = |alpha: f64| {
        let u: Vec<f64> = xs.iter().map(|x| x.powf(alpha)).collect();
        let n = u.len() as f64;
        let mu = u.iter().sum::<f64>() / n;
        let my = ys.iter().sum::<f64>() / n;
        let suy: f64 = u.iter().zip(&ys).map(|(a, b)| (a - mu) * (b - my)).sum();
        let suu: f64 = u.iter().map(|a| (a - mu).powi(2)).sum();
        let slope = suy / suu;
        let c = my - slope * mu;
        let sse: f64 = u.iter().zip(&ys).map(|(a, b)| (b - c - slope * a).powi(2)).sum();
        (sse, -slope, c)
    };
    let grid: Vec<f64> = (0..=250).map(|i| 0.5 + 2.5 * i as f64 / 250.0).collect();
    let (mut best, mut best_sse) = (grid[0], f64::INFINITY);
    for &a in &grid {
        let sse = solve(a).0;
        if sse < best_sse {
            best_sse = sse;
            best = a;
        }
    }
    let (mut lo, mut hi) = ((best - 0.01).max(0.5), (best + 0.01).min(3.0));
    let g = (5f64.sqrt() - 1.0) / 2.0;
    while hi - lo > 1e-10 {
        let c = hi - g * (hi - lo);
        let d = lo + g * (hi - lo);
        if solve(c).0 <= solve(d).0 {
            hi = d;
        } else {
            lo = c;
        }
    }
    let alpha = 0.5 * (lo + hi);
    let (_, gamma, c) = solve(alpha);
    let pred: Vec<f64> = xs.iter().map(|x| c - gamma * x.powf(alpha)).collect();
    Ok(TailFit { alpha, gamma, c, r2: r_squared(&ys, &pred) })
}

/// CSV `n,b_n,b_n_smoothed`.
pub fn write_coefficients_csv<W: Write>(out: W, b: &[f64], width: f64) -> Result<()> {
    let s = smooth(b, width);
    let mut w = csv_writer(out);
    w.write_record(["n", "b_n", "b_n_smoothed"])?;
    for (i, (x, y)) in b.iter().zip(&s).enumerate() {
        w.write_record([(i + 1).to_string(), x.to_string(), y.to_string()])?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::{histogram, Binning, Kernel, SpectralLine};

    #[test]
    fn two_level_krylov_space() {
        let h = PauliOperator::single(1, 0, Axis::Z, 1.0);
        let seed = PauliOperator::single(1, 0, Axis::X, 1.0);
        let r = lanczos(&h, &seed, false, &LanczosOptions::new(10, 1)).unwrap();
        assert_eq!(r.b.len(), 1);
        assert!((r.b[0] - 2.0).abs() < 1e-14);
        assert!(r.breakdown);
    }

    #[test]
    fn reduced_matches_plain() {
        let spec = ModelSpec::nnn_tfi(8);
        let h = hamiltonian::<f64>(&spec, 0.5).unwrap();
        let seed = default_seed(&spec).unwrap();
        let opts = LanczosOptions::new(8, 8);
        let a = lanczos(&h, &seed, true, &opts).unwrap();
        let b = lanczos(&h, &seed, false, &opts).unwrap();
        assert!(a.reduced && !b.reduced);
        for (x, y) in a.b.iter().zip(&b.b) {
            assert!((x - y).abs() < 1e-10 * x, "{x} vs {y}");
        }
    }

    #[test]
    fn canonical_orbits() {
        let s = PauliString::from_sites(&[(3, Axis::X), (4, Axis::Z)]).unwrap();
        let (c, orbit) = canonical(s, 6);
        assert_eq!(orbit, 6);
        assert_eq!(c, PauliString::from_sites(&[(0, Axis::X), (1, Axis::Z)]).unwrap());
        let alt = PauliString::from_sites(&[(0, Axis::Z), (2, Axis::Z)]).unwrap();
        assert_eq!(canonical(alt, 4).1, 2);
    }

    #[test]
    fn smoothing_preserves_constants() {
        let s = smooth(&[2.0; 9], 2.0);
        assert!(s.iter().all(|v| (v - 2.0).abs() < 1e-14));
    }

    #[test]
    fn tail_fit_recovers_exponentials() {
        let mk = |f: &dyn Fn(f64) -> f64| Histogram {
            centers: (1..=40).map(|i| i as f64 * 0.1).collect(),
            values: (1..=40).map(|i| f(i as f64 * 0.1)).collect(),
            width: 0.1,
        };
        let g = tail_fit(&mk(&|w| (-w * w).exp()), [0.2, 4.0]).unwrap();
        assert!((g.alpha - 2.0).abs() < 1e-6 && (g.gamma - 1.0).abs() < 1e-6);
        let e = tail_fit(&mk(&|w| (-2.0 * w).exp()), [0.2, 4.0]).unwrap();
        assert!((e.alpha - 1.0).abs() < 1e-6 && (e.gamma - 2.0).abs() < 1e-6);
        let lines = [SpectralLine { omega: 1.0, weight: 1.0 }];
        let h = histogram(&lines, &Binning { lo: 0.0, hi: 4.0, bins: 8, kernel: Kernel::Hard }).unwrap();
        assert!(tail_fit(&h, [0.0, 4.0]).is_err());
    }

    #[test]
    fn divergence() {
        assert_eq!(divergence_index(&[1.0, 2.0, 3.0], &[1.0, 2.01, 4.0], 0.02), Some(3));
        assert_eq!(divergence_index(&[1.0, 2.0], &[1.0, 2.0, 9.0], 0.02), None);
    }
}
