//! Least-squares approximation of `-1/x` on `[zeta, 1]` by odd Chebyshev
//! series.
//!
//! Two objectives share one coefficient convention: `beta_k` multiplies
//! `T_{2k-1}(x)` in both.
//!
//! * [`FitMode::Cost`] minimizes `int_zeta^1 (sum beta_k T_{2k-1}(x) + 1/x)^2 dx`.
//! * [`FitMode::Action`] minimizes `int_zeta^1 (x sum beta_k T_{2k-1}(x) + 1)^2 dx`,
//!   the same bracket multiplied by `x`. The products `x T_{2k-1}` are even
//!   Chebyshev combinations `(T_{2k} + T_{2k-2}) / 2`.
//!
//! The normal equations are never formed: the weighted design matrix on a
//! graded Gauss–Legendre rule is solved by pivoted Householder QR.

use std::io::Write;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::chebyshev::{odd_chebyshev_to_monomial, odd_series};
use crate::error::{Error, Result};
use crate::linalg::lstsq;
use crate::optimize::{maximize_log, ScanOptions};
use crate::quadrature::GradedRule;
use crate::scalar::Real;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum FitMode {
    #[default]
    Cost,
    Action,
}

impl FitMode {
    pub fn as_str(self) -> &'static str {
        match self {
            FitMode::Cost => "COST",
            FitMode::Action => "ACTION",
        }
    }
}

/// Fitted odd Chebyshev approximation of `-1/x` on `[zeta, 1]`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChebFit<T> {
    pub zeta: T,
    pub betas: Vec<T>,
    pub mode: FitMode,
    pub residual: T,
    /// Estimated condition number of the normal-equation matrix.
    pub condition: T,
    /// Numerical rank of the design matrix (equals the order unless degenerate).
    pub rank: usize,
}

/// Odd-monomial coefficients `alpha_k` of `x^{2k-1}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MonomialCoeffs<T> {
    pub alphas: Vec<T>,
}

impl<T: Real> ChebFit<T> {
    pub fn order(&self) -> usize {
        self.betas.len()
    }

    /// `sum_k beta_k T_{2k-1}(x)`.
    pub fn eval(&self, x: T) -> T {
        odd_series(&self.betas, x)
    }
}

/// Quadrature points per panel for an order-`ell` fit: exact for the
/// polynomial part of every integrand.
fn points_for(ell: usize) -> usize {
    2 * ell + 12
}

const QUAD_TOL: f64 = 1e-14;

fn design<T: Real>(rule: &GradedRule<T>, ell: usize, mode: FitMode) -> (Vec<T>, Vec<T>) {
    let rows = rule.nodes.len();
    let mut a = Vec::with_capacity(rows * ell);
    let mut b = Vec::with_capacity(rows);
    let two = T::c(2.0);
    for (&x, &w) in rule.nodes.iter().zip(&rule.weights) {
        let sw = w.sqrt();
        let scale = match mode {
            FitMode::Cost => T::one(),
            FitMode::Action => x,
        };
        // Odd Chebyshev values by the recurrence T_{n+2} = 2(2x^2 - 1) T_n - T_{n-2}.
        let s = two * (two * x * x - T::one());
        let (mut t_prev, mut t) = (x, x); // T_{-1} = T_1

        for k in 0..ell {
            if k > 0 {
                let next = s * t - t_prev;
                t_prev = t;
                t = next;
            }
            a.push(sw * scale * t);
        }
        b.push(match mode {
            FitMode::Cost => -sw / x,
            FitMode::Action => -sw,
        });
    }
    (a, b)
}

/// Fits `-1/x` on `[zeta, 1]` with `ell` odd Chebyshev terms.
pub fn fit_inverse<T: Real>(ell: usize, zeta: f64, mode: FitMode) -> Result<ChebFit<T>> {
    if ell == 0 {
        return Err(Error::invalid("fit order must be at least 1"));
    }
    if !(zeta > 0.0 && zeta < 1.0) {
        return Err(Error::invalid(format!("zeta = {zeta} must lie in (0, 1)")));
    }
    if ell > 20 {
        log::debug!("order {ell}: monomial coefficients will not be meaningful");
    }
    let rule = GradedRule::<T>::new(zeta, points_for(ell), QUAD_TOL);
    let (a, b) = design(&rule, ell, mode);
    let tol = T::epsilon() * T::c(1e3);
    let sol = lstsq(&a, rule.nodes.len(), ell, &b, tol);
    if sol.rank < ell {
        log::debug!("fit ell={ell} zeta={zeta}: rank {} < order", sol.rank);
    }
    Ok(ChebFit {
        zeta: T::c(zeta),
        betas: sol.x,
        mode,
        residual: sol.residual,
        condition: sol.condition,
        rank: sol.rank,
    })
}

/// Evaluates the fitted series; odd in `x`.
pub fn eval_fit<T: Real>(fit: &ChebFit<T>, x: T) -> T {
    fit.eval(x)
}

/// Recomputes the objective for the stored coefficients on a fresh rule.
pub fn objective_value<T: Real>(fit: &ChebFit<T>, points: usize) -> T {
    let rule = GradedRule::<T>::new(fit.zeta.to_f64_lossy(), points, QUAD_TOL);
    rule.integrate(|x| {
        let p = fit.eval(x);
        let r = match fit.mode {
            FitMode::Cost => p + T::one() / x,
            FitMode::Action => x * p + T::one(),
        };
        r * r
    })
}

/// `sup |x f(x) + 1|` over `[zeta, 1]`, sampled on `points` Chebyshev-spaced
/// abscissae.
pub fn max_residual(fit: &ChebFit<f64>, points: usize) -> f64 {
    let n = points.max(2);
    let z = fit.zeta;
    (0..=n)
        .map(|i| {
            let x = z + (1.0 - z) * 0.5 * (1.0 - (std::f64::consts::PI * i as f64 / n as f64).cos());
            (x * fit.eval(x) + 1.0).abs()
        })
        .fold(0.0, f64::max)
}

/// Spectrum-free window score `-(zeta + sup |x f(x) + 1|)`: a wider window
/// costs accuracy inside it, a narrower one leaves more of the spectrum
/// unfitted.
pub fn residual_score(ell: usize, zeta: f64, mode: FitMode) -> Result<f64> {
    let fit = fit_inverse::<f64>(ell, zeta, mode)?;
    Ok(-(zeta + max_residual(&fit, 4096)))
}

/// Monomial form `sum alpha_k x^{2k-1}` of a fit.
pub fn cheb_to_monomial<T: Real>(fit: &ChebFit<T>) -> Result<MonomialCoeffs<T>> {
    if fit.order() > 20 {
        log::warn!(
            "order {} > 20: monomial coefficients grow exponentially and lose all precision",
            fit.order()
        );
    }
    Ok(MonomialCoeffs { alphas: odd_chebyshev_to_monomial(&fit.betas) })
}

/// One row of an optimal-window table.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ZetaOptimum {
    pub ell: usize,
    pub zeta: f64,
    pub score: f64,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ZetaScan {
    pub lo: f64,
    pub hi: f64,
    pub points: usize,
    pub rel_tol: f64,
}

impl Default for ZetaScan {
    fn default() -> Self {
        ZetaScan { lo: 1e-4, hi: 0.5, points: 40, rel_tol: 1e-3 }
    }
}

/// For each order, the `zeta` maximizing `objective(ell, zeta)`.
///
/// Orders are processed in parallel; the table comes back in input order.
pub fn optimal_zeta_table<F>(ells: &[usize], objective: F, scan: &ZetaScan) -> Result<Vec<ZetaOptimum>>
where
    F: Fn(usize, f64) -> Result<f64> + Sync,
{
    let opts = ScanOptions { lo: scan.lo, hi: scan.hi, points: scan.points, rel_tol: scan.rel_tol };
    ells.par_iter()
        .map(|&ell| {
            let r = maximize_log(|z| objective(ell, z), &opts, "zeta")?;
            Ok(ZetaOptimum { ell, zeta: r.x, score: r.value })
        })
        .collect()
}

/// Writes fit rows as CSV: `ell,zeta,mode,beta_1..beta_L,residual,condition`,
/// padding short coefficient lists with empty cells.
pub fn write_fit_table<W: Write>(out: W, fits: &[ChebFit<f64>]) -> Result<()> {
    let width = fits.iter().map(|f| f.order()).max().unwrap_or(0);
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(out);
    let mut header = vec!["ell".to_string(), "zeta".into(), "mode".into()];
    header.extend((1..=width).map(|k| format!("beta_{k}")));
    header.push("residual".into());
    header.push("condition".into());
    w.write_record(&header)?;
    for f in fits {
        let mut row = vec![f.order().to_string(), f.zeta.to_string(), f.mode.as_str().to_string()];
        for k in 0..width {
            row.push(f.betas.get(k).map(|b| b.to_string()).unwrap_or_default());
        }
        row.push(f.residual.to_string());
        row.push(f.condition.to_string());
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}

/// Writes `x, fit(x), -1/x` on a uniform grid of `points` over `[x_lo, 1]`.
pub fn write_fit_curve<W: Write>(out: W, fit: &ChebFit<f64>, x_lo: f64, points: usize) -> Result<()> {
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(out);
    w.write_record(["x", "fit", "minus_inv_x"])?;
    let n = points.max(2);
    for i in 0..n {
        let x = x_lo + (1.0 - x_lo) * i as f64 / (n - 1) as f64;
        let target = if x == 0.0 { f64::NEG_INFINITY } else { -1.0 / x };
        w.write_record([x.to_string(), fit.eval(x).to_string(), target.to_string()])?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chebyshev::odd_monomial_to_chebyshev;

    #[test]
    fn order_one_closed_form() {
        let zeta = 0.1f64;
        let fit = fit_inverse::<f64>(1, zeta, FitMode::Cost).unwrap();
        let expected = -3.0 * (1.0 - zeta) / (1.0 - zeta.powi(3));
        assert!((fit.betas[0] - expected).abs() < 1e-12);
        assert!((fit.betas[0] + 2.7027).abs() < 1e-4);
    }

    #[test]
    fn narrow_window_matches_pointwise() {
        let fit = fit_inverse::<f64>(1, 0.999, FitMode::Cost).unwrap();
        assert!((fit.betas[0] + 1.0).abs() < 1e-2);
    }

    #[test]
    fn residual_decreases_with_order() {
        let r4 = fit_inverse::<f64>(4, 0.05, FitMode::Cost).unwrap().residual;
        let r8 = fit_inverse::<f64>(8, 0.05, FitMode::Cost).unwrap().residual;
        assert!(r8 < r4);
    }

    #[test]
    fn invalid_window() {
        assert!(fit_inverse::<f64>(3, 1.5, FitMode::Cost).is_err());
        assert!(fit_inverse::<f64>(3, 0.0, FitMode::Cost).is_err());
        assert!(fit_inverse::<f64>(0, 0.1, FitMode::Cost).is_err());
    }

    #[test]
    fn fit_is_odd() {
        let fit = fit_inverse::<f64>(6, 0.1, FitMode::Cost).unwrap();
        assert_eq!(fit.eval(0.0), 0.0);
        for &x in &[0.1, 0.37, 0.8, 1.0] {
            assert!((fit.eval(-x) + fit.eval(x)).abs() < 1e-14);
        }
    }

    #[test]
    fn stored_residual_recomputes() {
        for mode in [FitMode::Cost, FitMode::Action] {
            let fit = fit_inverse::<f64>(10, 0.02, mode).unwrap();
            let again = objective_value(&fit, 64);
            assert!(((again - fit.residual) / fit.residual).abs() < 1e-10, "{mode:?}");
        }
    }

    #[test]
    fn monomial_examples_and_roundtrip() {
        let f = ChebFit {
            zeta: 0.1,
            betas: vec![0.0, 1.0],
            mode: FitMode::Cost,
            residual: 0.0,
            condition: 1.0,
            rank: 2,
        };
        assert_eq!(cheb_to_monomial(&f).unwrap().alphas, vec![-3.0, 4.0]);
        let betas = vec![0.3f64, -0.1, 0.8, -0.45, 0.2, 0.05];
        let alphas = odd_chebyshev_to_monomial(&betas);
        let back = odd_monomial_to_chebyshev(&alphas);
        for (a, b) in betas.iter().zip(&back) {
            assert!((a - b).abs() <= 1e-10 * a.abs().max(1.0));
        }
    }

    #[test]
    fn single_precision_fit() {
        let fit = fit_inverse::<f32>(1, 0.1, FitMode::Cost).unwrap();
        assert!((fit.betas[0] + 2.7027).abs() < 1e-3);
    }

    #[test]
    fn zeta_table_bookkeeping() {
        let objective = |ell: usize, z: f64| {
            Ok(-fit_inverse::<f64>(ell, z, FitMode::Cost)?.residual * z)
        };
        let table = optimal_zeta_table(&[1], objective, &ZetaScan::default()).unwrap();
        assert_eq!(table.len(), 1);
        assert_eq!(table[0].score, objective(1, table[0].zeta).unwrap());
    }

    #[test]
    fn csv_layout() {
        let a = fit_inverse::<f64>(2, 0.1, FitMode::Cost).unwrap();
        let b = fit_inverse::<f64>(1, 0.2, FitMode::Action).unwrap();
        let mut buf = Vec::new();
        write_fit_table(&mut buf, &[a, b]).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "ell,zeta,mode,beta_1,beta_2,residual,condition");
        assert!(lines[2].starts_with("1,0.2,ACTION,"));
        assert_eq!(lines[2].split(',').nth(4), Some(""));
        assert!(!text.contains('\r'));
    }
}
