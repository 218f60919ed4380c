//! Chebyshev polynomial helpers: evaluation, odd-series Clenshaw sums and
//! conversion between the odd Chebyshev and odd monomial bases.

use crate::scalar::Real;

/// `T_n(x)` by the three-term recurrence.
pub fn chebyshev_t<T: Real>(n: usize, x: T) -> T {
    let (mut t0, mut t1) = (T::one(), x);
    if n == 0 {
        return t0;
    }
    let two = T::c(2.0);
    for _ in 1..n {
        let t2 = two * x * t1 - t0;
        t0 = t1;
        t1 = t2;
    }
    t1
}

/// `sum_k beta_k T_{2k-1}(x)` by Clenshaw's recurrence (`betas[0]` is `beta_1`).
pub fn odd_series<T: Real>(betas: &[T], x: T) -> T {
    if betas.is_empty() {
        return T::zero();
    }
    let degree = 2 * betas.len() - 1;
    let coeff = |n: usize| if n % 2 == 1 { betas[(n - 1) / 2] } else { T::zero() };
    let two_x = T::c(2.0) * x;
    let (mut b1, mut b2) = (T::zero(), T::zero());
    for n in (1..=degree).rev() {
        let b0 = coeff(n) + two_x * b1 - b2;
        b2 = b1;
        b1 = b0;
    }
    // n = 0 coefficient is zero; f = x b1 - b2.
    x * b1 - b2
}

/// Monomial coefficients of `T_n`, lowest degree first.
pub fn chebyshev_monomial_coeffs<T: Real>(n: usize) -> Vec<T> {
    let mut prev = vec![T::one()];
    if n == 0 {
        return prev;
    }
    let mut cur = vec![T::zero(), T::one()];
    let two = T::c(2.0);
    for _ in 1..n {
        let mut next = vec![T::zero(); cur.len() + 1];
        for (i, &c) in cur.iter().enumerate() {
            next[i + 1] += two * c;
        }
        for (i, &c) in prev.iter().enumerate() {
            next[i] -= c;
        }
        prev = cur;
        cur = next;
    }
    cur
}

/// `alpha` with `sum_k alpha_k x^{2k-1} = sum_k beta_k T_{2k-1}(x)`.
pub fn odd_chebyshev_to_monomial<T: Real>(betas: &[T]) -> Vec<T> {
    let l = betas.len();
    let mut alphas = vec![T::zero(); l];
    for (k, &b) in betas.iter().enumerate() {
        let coeffs = chebyshev_monomial_coeffs::<T>(2 * k + 1);
        for (deg, &c) in coeffs.iter().enumerate() {
            if deg % 2 == 1 {
                alphas[(deg - 1) / 2] += b * c;
            }
        }
    }
    alphas
}

/// Inverse of [`odd_chebyshev_to_monomial`].
pub fn odd_monomial_to_chebyshev<T: Real>(alphas: &[T]) -> Vec<T> {
    let l = alphas.len();
    let half = T::c(0.5);
    let mut betas = vec![T::zero(); l];
    // Chebyshev expansion of x^n, updated by x T_m = (T_{m+1} + T_{|m-1|}) / 2.
    let mut power = vec![T::zero(); 2 * l + 1];
    power[1] = T::one();
    for (k, &a) in alphas.iter().enumerate() {
        let deg = 2 * k + 1;
        if k > 0 {
            for _ in 0..2 {
                let mut next = vec![T::zero(); power.len()];
                for (m, &c) in power.iter().enumerate() {
                    if c == T::zero() {
                        continue;
                    }
                    if m == 0 {
                        next[1] += c;
                        continue;
                    }
                    if m + 1 < next.len() {
                        next[m + 1] += half * c;
                    }
                    next[m - 1] += half * c;
                }
                power = next;
            }
        }
        for m in (1..=deg).step_by(2) {
            betas[(m - 1) / 2] += a * power[m];
        }
    }
    betas
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn t3_monomials() {
        assert_eq!(chebyshev_monomial_coeffs::<f64>(3), vec![0.0, -3.0, 0.0, 4.0]);
        assert_eq!(odd_chebyshev_to_monomial(&[1.0]), vec![1.0]);
        assert_eq!(odd_chebyshev_to_monomial(&[0.0, 1.0]), vec![-3.0, 4.0]);
    }

    #[test]
    fn clenshaw_matches_direct_sum() {
        let betas = [0.3, -1.2, 0.7, 0.05];
        for &x in &[-1.0, -0.4, 0.0, 0.33, 0.9, 1.0] {
            let direct: f64 = betas
                .iter()
                .enumerate()
                .map(|(k, b)| b * chebyshev_t(2 * k + 1, x))
                .sum();
            assert!((odd_series(&betas, x) - direct).abs() < 1e-14);
        }
    }

    #[test]
    fn chebyshev_cosine_identity() {
        for n in 0..30 {
            let th = 0.37f64;
            assert!((chebyshev_t(n, th.cos()) - (n as f64 * th).cos()).abs() < 1e-12);
        }
    }

    #[test]
    fn monomial_inverse() {
        let b = odd_monomial_to_chebyshev(&[-3.0f64, 4.0]);
        assert!((b[0]).abs() < 1e-15 && (b[1] - 1.0).abs() < 1e-15);
    }
}
