//! Exact-diagonalization spectral quantities: matrix elements of `dH/dlambda`,
//! the spectral function, exact and variational gauge potentials and the
//! fidelity susceptibility.
//!
//! Conventions: `omega_mn = E_m - E_n`, `M_mn = <m|dH|n>`. The gauge
//! potential is `A = i d/dlambda`, with eigenbasis elements
//! `A_mn = i f(omega_mn) M_mn` for a real odd function `f`; the exact one has
//! `f = -1/omega`.

use std::io::Write;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::chebyshev::{odd_chebyshev_to_monomial, odd_series};
use crate::ed::{hermitian_eigen, DenseModel};
use crate::error::{Error, Result};
use crate::linalg::lstsq;
use crate::models::ModelSpec;
use crate::pauli::PauliOperator;
use crate::C64;

/// Levels closer than this are treated as degenerate.
pub const DEGENERACY_TOL: f64 = 1e-10;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Ensemble {
    Ground,
    InfiniteTemperature,
    Weights(Vec<f64>),
}

#[derive(Clone, Debug)]
pub struct SpectralData {
    pub lambda: f64,
    pub energies: Vec<f64>,
    /// Eigenvectors as columns, in the basis of the generating model.
    pub vectors: DMatrix<C64>,
    /// `<m|dH/dlambda|n>`.
    pub m: DMatrix<C64>,
    pub rho: Vec<f64>,
    pub dim: usize,
}

impl SpectralData {
    /// Diagonalizes `h` and expresses `dh` in its eigenbasis.
    pub fn from_matrices(lambda: f64, h: &DMatrix<C64>, dh: &DMatrix<C64>, ensemble: &Ensemble) -> Result<Self> {
        let dim = h.nrows();
        let (energies, vectors) = hermitian_eigen(h);
        let m = vectors.ad_mul(&(dh * &vectors));
        let rho = match ensemble {
            Ensemble::Ground => {
                let mut r = vec![0.0; dim];
                r[0] = 1.0;
                r
            }
            Ensemble::InfiniteTemperature => vec![1.0 / dim as f64; dim],
            Ensemble::Weights(w) => {
                let s: f64 = w.iter().sum();
                if w.len() != dim || w.iter().any(|x| *x < 0.0) || s <= 0.0 {
                    return Err(Error::invalid("ensemble weights must be nonnegative with one per level"));
                }
                w.iter().map(|x| x / s).collect()
            }
        };
        Ok(SpectralData { lambda, energies, vectors, m, rho, dim })
    }

    pub fn omega(&self, m: usize, n: usize) -> f64 {
        self.energies[m] - self.energies[n]
    }

    /// Nonzero terms `(omega_mn, rho_n |M_mn|^2)` of the spectral function,
    /// with equal frequencies (within [`DEGENERACY_TOL`]) merged, sorted by
    /// frequency. Diagonal and degenerate pairs are excluded.
    pub fn lines(&self) -> Vec<SpectralLine> {
        let mut raw = Vec::new();
        for n in 0..self.dim {
            if self.rho[n] == 0.0 {
                continue;
            }
            for mi in 0..self.dim {
                let w = self.rho[n] * self.m[(mi, n)].norm_sqr();
                let om = self.omega(mi, n);
                if w > 0.0 && om.abs() > DEGENERACY_TOL {
                    raw.push(SpectralLine { omega: om, weight: w });
                }
            }
        }
        merge_lines(raw)
    }

    /// `sum_n rho_n sum_m |M_mn|^2`, including diagonal elements.
    pub fn total_weight(&self) -> f64 {
        (0..self.dim)
            .map(|n| self.rho[n] * (0..self.dim).map(|mi| self.m[(mi, n)].norm_sqr()).sum::<f64>())
            .sum()
    }

    /// Maps an eigenbasis matrix back to the model basis: `V X V^dagger`.
    pub fn to_model_basis(&self, x: &DMatrix<C64>) -> DMatrix<C64> {
        &self.vectors * x * self.vectors.adjoint()
    }

    /// Eigenbasis matrix `i f(omega_mn) M_mn`.
    pub fn agp_from_function(&self, f: impl Fn(f64) -> f64) -> DMatrix<C64> {
        let d = self.dim;
        DMatrix::from_fn(d, d, |a, b| {
            let om = self.omega(a, b);
            if a == b || om.abs() <= DEGENERACY_TOL {
                C64::new(0.0, 0.0)
            } else {
                C64::new(0.0, f(om)) * self.m[(a, b)]
            }
        })
    }

    pub fn ground_state(&self) -> DVector<C64> {
        self.vectors.column(0).into_owned()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpectralLine {
    pub omega: f64,
    pub weight: f64,
}

fn merge_lines(mut raw: Vec<SpectralLine>) -> Vec<SpectralLine> {
    raw.sort_by(|a, b| a.omega.total_cmp(&b.omega));
    let mut out: Vec<SpectralLine> = Vec::with_capacity(raw.len());
    for l in raw {
        match out.last_mut() {
            Some(last) if (l.omega - last.omega).abs() <= DEGENERACY_TOL => last.weight += l.weight,
            _ => out.push(l),
        }
    }
    out
}

/// Spectral data of the model at `lambda` in the full Hilbert space with the
/// ground-state ensemble.
pub fn diagonalize(spec: &ModelSpec, lambda: f64) -> Result<SpectralData> {
    let model = DenseModel::full(spec)?;
    diagonalize_model(&model, lambda, &Ensemble::Ground)
}

pub fn diagonalize_model(model: &DenseModel, lambda: f64, ensemble: &Ensemble) -> Result<SpectralData> {
    if !(0.0..=1.0).contains(&lambda) {
        return Err(Error::invalid(format!("lambda = {lambda} outside [0, 1]")));
    }
    SpectralData::from_matrices(lambda, &model.hamiltonian(lambda), &model.dlambda_h(), ensemble)
}

/// Infinite-temperature spectral lines over the whole Hilbert space of a
/// magnetization-conserving model, assembled from its magnetization blocks.
pub fn infinite_temperature_lines(spec: &ModelSpec, lambda: f64, dense_limit: usize) -> Result<Vec<SpectralLine>> {
    let n = spec.n_sites;
    let total = 2f64.powi(n as i32);
    let sectors: Vec<crate::ed::Sector> = if spec.conserves_magnetization() {
        (0..=n).map(|d| crate::ed::Sector { down_spins: Some(d), ..Default::default() }).collect()
    } else {
        vec![crate::ed::Sector::full()]
    };
    let mut raw = Vec::new();
    for sector in sectors {
        let model = DenseModel::new(spec, sector, dense_limit)?;
        let sd = diagonalize_model(&model, lambda, &Ensemble::InfiniteTemperature)?;
        let share = model.dim() as f64 / total;
        raw.extend(sd.lines().into_iter().map(|l| SpectralLine { omega: l.omega, weight: l.weight * share }));
    }
    Ok(merge_lines(raw))
}

/// Infrared regularization of `1/omega`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "SCREAMING_SNAKE_CASE")]
pub enum FilterKind {
    /// `g(x) = x^2 / (1 + x^2)`, `x = omega / mu`.
    Rational { mu: f64 },
    /// `g(x) = theta(|x| - 1)`.
    Step { mu: f64 },
}

impl FilterKind {
    pub fn mu(&self) -> f64 {
        match *self {
            FilterKind::Rational { mu } | FilterKind::Step { mu } => mu,
        }
    }

    /// `g(omega / mu)`.
    pub fn g(&self, omega: f64) -> f64 {
        match *self {
            FilterKind::Rational { mu } => {
                let x = omega / mu;
                x * x / (1.0 + x * x)
            }
            FilterKind::Step { mu } => {
                if omega.abs() >= mu {
                    1.0
                } else {
                    0.0
                }
            }
        }
    }

    /// The regularized `-g(omega/mu)/omega`.
    pub fn agp_function(&self, omega: f64) -> f64 {
        match *self {
            FilterKind::Rational { mu } => -omega / (omega * omega + mu * mu),
            FilterKind::Step { .. } => {
                if self.g(omega) > 0.0 {
                    -1.0 / omega
                } else {
                    0.0
                }
            }
        }
    }

    fn validate(&self) -> Result<()> {
        let mu = self.mu();
        if mu > 0.0 && mu.is_finite() {
            Ok(())
        } else {
            Err(Error::invalid(format!("filter cutoff mu = {mu} must be positive")))
        }
    }
}

/// Regularized exact gauge potential in the eigenbasis.
pub fn exact_agp(sd: &SpectralData, filter: FilterKind) -> Result<DMatrix<C64>> {
    filter.validate()?;
    for a in 0..sd.dim {
        for b in 0..a {
            if sd.omega(a, b).abs() < 1e-12 && sd.m[(a, b)].norm() > 1e-12 {
                log::warn!("degenerate levels {b},{a} coupled by dH (|M| = {:.3e})", sd.m[(a, b)].norm());
            }
        }
    }
    Ok(sd.agp_from_function(|om| filter.agp_function(om)))
}

/// `sum_{m != n} rho_n |M_mn|^2 f(omega)^2` with the filter's `f`.
pub fn fidelity_susceptibility(sd: &SpectralData, filter: FilterKind) -> Result<f64> {
    filter.validate()?;
    Ok(susceptibility_from_lines(&sd.lines(), filter))
}

/// Fidelity susceptibility as a frequency integral over spectral lines.
pub fn susceptibility_from_lines(lines: &[SpectralLine], filter: FilterKind) -> f64 {
    lines
        .iter()
        .map(|l| {
            let f = filter.agp_function(l.omega);
            l.weight * f * f
        })
        .sum()
}

/// Direct double sum over matrix elements; the oracle for
/// [`fidelity_susceptibility`].
pub fn susceptibility_direct(sd: &SpectralData, filter: FilterKind) -> f64 {
    let mut chi = 0.0;
    for n in 0..sd.dim {
        for m in 0..sd.dim {
            let om = sd.omega(m, n);
            if m != n && om.abs() > DEGENERACY_TOL {
                let f = filter.agp_function(om);
                chi += sd.rho[n] * sd.m[(m, n)].norm_sqr() * f * f;
            }
        }
    }
    chi
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Kernel {
    #[default]
    Hard,
    /// Gaussian with standard deviation equal to the bin width.
    Gaussian,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Binning {
    pub lo: f64,
    pub hi: f64,
    pub bins: usize,
    #[serde(default)]
    pub kernel: Kernel,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Histogram {
    pub centers: Vec<f64>,
    /// Spectral density per unit frequency.
    pub values: Vec<f64>,
    pub width: f64,
}

impl Histogram {
    /// `sum values * width`.
    pub fn total(&self) -> f64 {
        self.values.iter().sum::<f64>() * self.width
    }

    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(out);
        w.write_record(["omega", "phi"])?;
        for (c, v) in self.centers.iter().zip(&self.values) {
            w.write_record([c.to_string(), v.to_string()])?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Bins spectral lines. Lines outside `[lo, hi)` are dropped (hard kernel);
/// with the Gaussian kernel each line's weight is normalized over the grid,
/// so the total is preserved whenever the line lies inside the range.
pub fn histogram(lines: &[SpectralLine], binning: &Binning) -> Result<Histogram> {
    let Binning { lo, hi, bins, kernel } = *binning;
    if !(hi > lo) || bins == 0 {
        return Err(Error::invalid("binning needs hi > lo and at least one bin"));
    }
    let width = (hi - lo) / bins as f64;
    let centers: Vec<f64> = (0..bins).map(|i| lo + (i as f64 + 0.5) * width).collect();
    let mut values = vec![0.0; bins];
    match kernel {
        Kernel::Hard => {
            for l in lines {
                let pos = (l.omega - lo) / width;
                if pos >= 0.0 && (pos as usize) < bins {
                    values[pos as usize] += l.weight / width;
                }
            }
        }
        Kernel::Gaussian => {
            let mut k = vec![0.0; bins];
            for l in lines {
                if l.omega < lo || l.omega >= hi {
                    continue;
                }
                for (ki, c) in k.iter_mut().zip(&centers) {
                    let x = (c - l.omega) / width;
                    *ki = (-0.5 * x * x).exp();
                }
                let s: f64 = k.iter().sum();
                for (v, ki) in values.iter_mut().zip(&k) {
                    *v += l.weight * ki / (s * width);
                }
            }
        }
    }
    Ok(Histogram { centers, values, width })
}

pub fn spectral_function(sd: &SpectralData, binning: &Binning) -> Result<Histogram> {
    histogram(&sd.lines(), binning)
}

/// Odd polynomial `f(omega) = sum c_k T_{2k-1}(omega / scale)` minimizing the
/// variational action `sum w [(1 + omega f)^2 + mu^2 f^2]` over spectral lines.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VariationalAgp {
    pub cheb: Vec<f64>,
    pub scale: f64,
    pub mu: f64,
    /// Numerical rank of the least-squares problem: the effective order.
    pub rank: usize,
    pub action: f64,
}

impl VariationalAgp {
    pub fn order(&self) -> usize {
        self.cheb.len()
    }

    pub fn eval(&self, omega: f64) -> f64 {
        odd_series(&self.cheb, omega / self.scale)
    }

    /// Coefficients of `omega^{2k-1}`.
    pub fn monomial(&self) -> Vec<f64> {
        odd_chebyshev_to_monomial(&self.cheb)
            .into_iter()
            .enumerate()
            .map(|(k, a)| a / self.scale.powi(2 * k as i32 + 1))
            .collect()
    }

    pub fn eigenbasis_matrix(&self, sd: &SpectralData) -> DMatrix<C64> {
        sd.agp_from_function(|om| self.eval(om))
    }
}

/// Three times the weighted rms frequency. Unlike the largest line
/// frequency it is continuous in lambda, so refitted potentials do not jump
/// when faint lines appear or vanish.
pub fn default_variational_scale(lines: &[SpectralLine]) -> f64 {
    let w: f64 = lines.iter().map(|l| l.weight).sum();
    let w2: f64 = lines.iter().map(|l| l.weight * l.omega * l.omega).sum();
    3.0 * (w2 / w).sqrt()
}

/// Relative pivot threshold of the variational least-squares solves.
pub const VARIATIONAL_RANK_TOL: f64 = 1e-13;

/// Variational Krylov gauge potential from spectral lines.
///
/// `scale` defaults to [`default_variational_scale`]. Only `|omega|` matters,
/// since the integrand is even.
pub fn variational_from_lines(lines: &[SpectralLine], ell: usize, mu: f64, scale: Option<f64>) -> Result<VariationalAgp> {
    variational_from_lines_ridge(lines, ell, mu, scale, 0.0)
}

/// Relative ridge used when the variational potential is refitted along an
/// anneal.
///
/// Near classical points the ground-state lines collapse onto a few
/// frequencies, the fit loses rank, and the undetermined combinations (which
/// still act between excited states) jitter from one lambda to the next. A
/// ridge `ridge * |omega sqrt(w)|` on each coefficient picks the stable
/// minimum-norm solution and leaves well-determined fits untouched.
pub const VARIATIONAL_RIDGE: f64 = 1e-8;

/// [`variational_from_lines`] with a relative ridge on the coefficients.
pub fn variational_from_lines_ridge(
    lines: &[SpectralLine],
    ell: usize,
    mu: f64,
    scale: Option<f64>,
    ridge: f64,
) -> Result<VariationalAgp> {
    if ell == 0 {
        return Err(Error::invalid("variational order must be at least 1"));
    }
    if !(mu >= 0.0) {
        return Err(Error::invalid(format!("mu = {mu} must be nonnegative")));
    }
    let scale = scale.unwrap_or_else(|| default_variational_scale(lines));
    if !(scale > 0.0) || lines.is_empty() {
        return Err(Error::numerical("no spectral weight: the gauge potential vanishes"));
    }
    let mut folded: Vec<SpectralLine> =
        lines.iter().map(|l| SpectralLine { omega: l.omega.abs(), weight: l.weight }).collect();
    folded = merge_lines(folded);
    let ridge_rows = if ridge > 0.0 { ell } else { 0 };
    let rows = folded.len() * if mu > 0.0 { 2 } else { 1 } + ridge_rows;
    let mut a = Vec::with_capacity(rows * ell);
    let mut b = Vec::with_capacity(rows);
    let basis = |om: f64| -> Vec<f64> {
        let x = om / scale;
        let s = 2.0 * (2.0 * x * x - 1.0);
        let (mut prev, mut t) = (x, x);
        (0..ell)
            .map(|k| {
                if k > 0 {
                    let next = s * t - prev;
                    prev = t;
                    t = next;
                }
                t
            })
            .collect()
    };
    for l in &folded {
        let sw = l.weight.sqrt();
        let t = basis(l.omega);
        a.extend(t.iter().map(|v| sw * l.omega * v));
        b.push(-sw);
    }
    if mu > 0.0 {
        for l in &folded {
            let sw = l.weight.sqrt();
            a.extend(basis(l.omega).iter().map(|v| sw * mu * v));
            b.push(0.0);
        }
    }
    if ridge_rows > 0 {
        let size = folded.iter().map(|l| l.weight * l.omega * l.omega).sum::<f64>().sqrt();
        for k in 0..ell {
            a.extend((0..ell).map(|j| if j == k { ridge * size } else { 0.0 }));
            b.push(0.0);
        }
    }
    let sol = lstsq(&a, rows, ell, &b, VARIATIONAL_RANK_TOL);
    if sol.rank < ell {
        log::debug!("variational AGP: Krylov space saturated at effective order {}", sol.rank);
    }
    Ok(VariationalAgp { cheb: sol.x, scale, mu, rank: sol.rank, action: sol.residual })
}

/// Variational Krylov gauge potential of `spec` at `lambda`, full Hilbert
/// space, infinite-temperature norm.
pub fn variational_krylov_agp(spec: &ModelSpec, lambda: f64, ell: usize, mu: f64) -> Result<VariationalAgp> {
    let model = DenseModel::full(spec)?;
    let sd = diagonalize_model(&model, lambda, &Ensemble::InfiniteTemperature)?;
    variational_from_lines(&sd.lines(), ell, mu, None)
}

/// The same minimization carried out on Pauli operators with the
/// infinite-temperature Frobenius norm: no diagonalization involved.
///
/// Builds `P_k = T_{2k-1}(L/scale) dH` and `Q_k = L P_k` with `L = [H, .]`,
/// then minimizes `|dH + sum c_k Q_k|^2 + mu^2 |sum c_k P_k|^2`.
pub fn variational_krylov_agp_pauli(
    h: &PauliOperator<f64>,
    dh: &PauliOperator<f64>,
    ell: usize,
    mu: f64,
    scale: f64,
) -> Result<VariationalAgp> {
    if ell == 0 || !(scale > 0.0) {
        return Err(Error::invalid("need ell >= 1 and a positive scale"));
    }
    let lio = |o: &PauliOperator<f64>| h.commutator(o).scale_real(1.0 / scale);
    // Chebyshev images T_n(L/scale) dH for odd n.
    let mut odd = Vec::with_capacity(ell);
    let mut prev = dh.clone();
    let mut cur = lio(dh);
    odd.push(cur.clone());
    for _ in 1..ell {
        let even = lio(&cur).scale_real(2.0).sub(&prev);
        let next = lio(&even).scale_real(2.0).sub(&cur);
        prev = even;
        cur = next;
        odd.push(cur.clone());
    }
    let q: Vec<PauliOperator<f64>> = odd.iter().map(|p| lio(p).scale_real(scale)).collect();
    let mut gram = DMatrix::<f64>::zeros(ell, ell);
    let mut rhs = DVector::<f64>::zeros(ell);
    for i in 0..ell {
        for j in 0..ell {
            gram[(i, j)] = q[i].frobenius_inner(&q[j]).re + mu * mu * odd[i].frobenius_inner(&odd[j]).re;
        }
        rhs[i] = -q[i].frobenius_inner(dh).re;
    }
    let svd = gram.clone().svd(true, true);
    let smax = svd.singular_values.max();
    let tol = smax * VARIATIONAL_RANK_TOL.sqrt();
    let rank = svd.singular_values.iter().filter(|s| **s > tol).count();
    let c = svd
        .solve(&rhs, tol)
        .map_err(|e| Error::numerical(format!("variational Gram solve failed: {e}")))?;
    let action = dh.norm_sqr() + 2.0 * rhs.dot(&c) * -1.0 + c.dot(&(&gram * &c));
    Ok(VariationalAgp { cheb: c.iter().copied().collect(), scale, mu, rank, action })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::ModelSpec;
    use crate::pauli::{Axis, PauliOperator};

    fn single_spin() -> ModelSpec {
        let x = PauliOperator::single(1, 0, Axis::X, 1.0);
        let z = PauliOperator::single(1, 0, Axis::Z, 1.0);
        ModelSpec::custom(&x, &z)
    }

    #[test]
    fn single_spin_levels_and_lines() {
        let sd = diagonalize(&single_spin(), 0.0).unwrap();
        assert!((sd.energies[0] + 1.0).abs() < 1e-14 && (sd.energies[1] - 1.0).abs() < 1e-14);
        let lines = sd.lines();
        assert_eq!(lines.len(), 1);
        assert!((lines[0].omega - 2.0).abs() < 1e-14);
        assert!((lines[0].weight - 1.0).abs() < 1e-14);
    }

    #[test]
    fn single_spin_agp_is_minus_half_sigma_y() {
        let sd = diagonalize(&single_spin(), 0.0).unwrap();
        let a = sd.to_model_basis(&exact_agp(&sd, FilterKind::Rational { mu: 1e-8 }).unwrap());
        let y = PauliOperator::single(1, 0, Axis::Y, -0.5).to_dense(1).unwrap();
        assert!(crate::ed::max_abs_diff(&a, &y) < 1e-12);
    }

    #[test]
    fn single_spin_susceptibility() {
        let sd = diagonalize(&single_spin(), 0.0).unwrap();
        let chi = fidelity_susceptibility(&sd, FilterKind::Rational { mu: 1e-9 }).unwrap();
        assert!((chi - 0.25).abs() < 1e-12);
    }

    #[test]
    fn single_spin_variational_order_one() {
        let sd = diagonalize(&single_spin(), 0.0).unwrap();
        let mu = 0.3;
        let v = variational_from_lines(&sd.lines(), 1, mu, None).unwrap();
        let alpha = v.monomial()[0];
        assert!((alpha + 1.0 / (4.0 + mu * mu)).abs() < 1e-14);
    }

    #[test]
    fn filters_limits() {
        for f in [FilterKind::Rational { mu: 0.5 }, FilterKind::Step { mu: 0.5 }] {
            assert!(f.g(1e-6) < 1e-10);
            assert!(f.g(1e3) > 1.0 - 1e-6);
        }
        assert!(exact_agp(&diagonalize(&single_spin(), 0.0).unwrap(), FilterKind::Step { mu: 0.0 }).is_err());
    }

    #[test]
    fn gaussian_histogram_preserves_weight() {
        let lines = [SpectralLine { omega: 1.0, weight: 0.3 }, SpectralLine { omega: 2.5, weight: 0.7 }];
        let h = histogram(&lines, &Binning { lo: 0.0, hi: 4.0, bins: 40, kernel: Kernel::Gaussian }).unwrap();
        assert!((h.total() - 1.0).abs() < 1e-12);
        let h = histogram(&lines, &Binning { lo: 0.0, hi: 4.0, bins: 40, kernel: Kernel::Hard }).unwrap();
        assert!((h.total() - 1.0).abs() < 1e-12);
    }
}
