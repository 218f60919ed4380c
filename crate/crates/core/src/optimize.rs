//! Derivative-free one-dimensional maximization: log-grid scan followed by
//! golden-section refinement around the best grid point.

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ScanOptions {
    pub lo: f64,
    pub hi: f64,
    pub points: usize,
    /// Stop when the bracket width is below `rel_tol * x`.
    pub rel_tol: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ScanResult {
    pub x: f64,
    pub value: f64,
    /// Grid index of the best scan point.
    pub grid_index: usize,
    pub evaluations: usize,
    /// Whether the optimum sits on the first or last scan point.
    pub at_edge: bool,
}

fn log_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![(lo * hi).sqrt()];
    }
    let (a, b) = (lo.ln(), hi.ln());
    (0..n).map(|i| (a + (b - a) * i as f64 / (n - 1) as f64).exp()).collect()
}

/// Maximizes `f` over `[lo, hi]` in `log x`.
///
/// The returned `value` is `f(x)` at the returned `x`, never a stale
/// bracket value. Errors from `f` propagate with the offending argument.
pub fn maximize_log<F>(f: F, opts: &ScanOptions, param: &'static str) -> Result<ScanResult>
where
    F: Fn(f64) -> Result<f64>,
{
    if !(opts.lo > 0.0 && opts.hi > opts.lo && opts.points >= 1) {
        return Err(Error::invalid(format!(
            "bad scan range [{}, {}] with {} points",
            opts.lo, opts.hi, opts.points
        )));
    }
    let eval = |x: f64| {
        f(x).map_err(|e| Error::Objective { param, value: x, source: Box::new(e) })
            .map(|v| if v.is_nan() { f64::NEG_INFINITY } else { v })
    };
    let grid = log_grid(opts.lo, opts.hi, opts.points);
    let mut values = Vec::with_capacity(grid.len());
    for &x in &grid {
        values.push(eval(x)?);
    }
    let mut evaluations = grid.len();
    let (best_i, _) = values
        .iter()
        .enumerate()
        .fold((0, f64::NEG_INFINITY), |acc, (i, &v)| if v > acc.1 { (i, v) } else { acc });
    let mut best = (grid[best_i], values[best_i]);
    let at_edge = best_i == 0 || best_i + 1 == grid.len();

    if grid.len() >= 3 {
        let a = grid[best_i.saturating_sub(1)].ln();
        let b = grid[(best_i + 1).min(grid.len() - 1)].ln();
        let (mut a, mut b) = (a, b);
        let g = (5f64.sqrt() - 1.0) / 2.0;
        let mut c = b - g * (b - a);
        let mut d = a + g * (b - a);
        let mut fc = eval(c.exp())?;
        let mut fd = eval(d.exp())?;
        evaluations += 2;
        for (x, v) in [(c, fc), (d, fd)] {
            if v > best.1 {
                best = (x.exp(), v);
            }
        }
        let tol = opts.rel_tol.max(1e-12).ln_1p();
        while (b - a) > tol {
            if fc >= fd {
                b = d;
                d = c;
                fd = fc;
                c = b - g * (b - a);
                fc = eval(c.exp())?;
                if fc > best.1 {
                    best = (c.exp(), fc);
                }
            } else {
                a = c;
                c = d;
                fc = fd;
                d = a + g * (b - a);
                fd = eval(d.exp())?;
                if fd > best.1 {
                    best = (d.exp(), fd);
                }
            }
            evaluations += 1;
        }
    }
    Ok(ScanResult { x: best.0, value: best.1, grid_index: best_i, evaluations, at_edge })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn finds_peak_in_log_space() {
        let f = |x: f64| Ok(-(x.ln() - 0.3f64.ln()).powi(2));
        let r = maximize_log(f, &ScanOptions { lo: 1e-3, hi: 10.0, points: 20, rel_tol: 1e-4 }, "x")
            .unwrap();
        assert!((r.x / 0.3 - 1.0).abs() < 1e-3);
        assert_eq!(r.value, f(r.x).unwrap());
        assert!(!r.at_edge);
    }

    #[test]
    fn propagates_errors_with_argument() {
        let f = |x: f64| {
            if x > 1.0 {
                Err(Error::numerical("boom"))
            } else {
                Ok(x)
            }
        };
        let err = maximize_log(f, &ScanOptions { lo: 0.1, hi: 10.0, points: 5, rel_tol: 1e-3 }, "zeta")
            .unwrap_err();
        assert!(err.to_string().contains("zeta"));
    }
}
