//! Gauss–Legendre rules and graded composite rules on `[zeta, 1]`.

use crate::scalar::Real;

/// Nodes and weights of the `n`-point Gauss–Legendre rule on `[-1, 1]`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n > 0);
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let m = n.div_ceil(2);
    for i in 0..m {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            let pn = if n == 1 { x } else { p1 };
            let pn1 = if n == 1 { 1.0 } else { p0 };
            dp = n as f64 * (x * pn - pn1) / (x * x - 1.0);
            let dx = pn / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    if n % 2 == 1 {
        nodes[n / 2] = 0.0;
    }
    (nodes, weights)
}

/// Composite rule on `[zeta, 1]`: panels graded geometrically towards
/// `zeta`, each panel split until the rule integrates `1/x^2` on it to
/// `tol` relative, `points` Gauss nodes per panel.
#[derive(Clone, Debug)]
pub struct GradedRule<T> {
    pub nodes: Vec<T>,
    pub weights: Vec<T>,
    pub panels: usize,
}

impl<T: Real> GradedRule<T> {
    pub fn new(zeta: f64, points: usize, tol: f64) -> Self {
        assert!(zeta > 0.0 && zeta < 1.0);
        let (gx, gw) = gauss_legendre(points);
        let mut edges = vec![zeta];
        let mut a = zeta;
        while a < 1.0 {
            let b = (2.0 * a).min(1.0);
            edges.push(b);
            a = b;
        }
        let mut panels: Vec<(f64, f64)> = edges.windows(2).map(|w| (w[0], w[1])).collect();
        // Adaptive splitting on the most singular integrand.
        let mut done = Vec::new();
        while let Some((a, b)) = panels.pop() {
            let exact = 1.0 / a - 1.0 / b;
            let (mid, half) = (0.5 * (a + b), 0.5 * (b - a));
            let approx: f64 = gx
                .iter()
                .zip(&gw)
                .map(|(x, w)| {
                    let t = mid + half * x;
                    half * w / (t * t)
                })
                .sum();
            if ((approx - exact) / exact).abs() > tol && (b - a) > 1e-3 * a {
                panels.push((a, mid));
                panels.push((mid, b));
            } else {
                done.push((a, b));
            }
        }
        done.sort_by(|p, q| p.0.total_cmp(&q.0));
        let mut nodes = Vec::with_capacity(done.len() * points);
        let mut weights = Vec::with_capacity(done.len() * points);
        for &(a, b) in &done {
            let (mid, half) = (0.5 * (a + b), 0.5 * (b - a));
            for (x, w) in gx.iter().zip(&gw) {
                nodes.push(T::c(mid + half * x));
                weights.push(T::c(half * w));
            }
        }
        GradedRule { nodes, weights, panels: done.len() }
    }

    pub fn integrate(&self, f: impl Fn(T) -> T) -> T {
        self.nodes.iter().zip(&self.weights).map(|(x, w)| *w * f(*x)).sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gauss_exact_for_polynomials() {
        let (x, w) = gauss_legendre(5);
        let sum: f64 = w.iter().sum();
        assert!((sum - 2.0).abs() < 1e-14);
        let int9: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(8)).sum();
        assert!((int9 - 2.0 / 9.0).abs() < 1e-14);
    }

    #[test]
    fn graded_rule_inverse_square() {
        let r = GradedRule::<f64>::new(1e-4, 24, 1e-14);
        let v = r.integrate(|x| 1.0 / (x * x));
        assert!(((v - (1e4 - 1.0)) / 1e4).abs() < 1e-13);
        let l = r.integrate(|x| 1.0 / x);
        assert!((l - 1e4f64.ln()).abs() < 1e-12);
    }
}
