//! Small dense least-squares kernels written against [`Real`].

use crate::scalar::Real;

/// Solution of a rank-revealing least-squares solve.
#[derive(Clone, Debug)]
pub struct LstsqSolution<T> {
    pub x: Vec<T>,
    pub rank: usize,
    /// `(max |R_ii| / min |R_ii|)^2` over the retained pivots: an estimate of
    /// the condition number of the normal-equation matrix.
    pub condition: T,
    /// `||A x - b||^2`.
    pub residual: T,
}

/// Minimizes `||A x - b||` for a row-major `rows x cols` matrix using
/// Householder QR with column pivoting. Pivots below `rel_tol * |R_00|`
/// are treated as rank deficiency and the corresponding unknowns set to 0.
pub fn lstsq<T: Real>(a: &[T], rows: usize, cols: usize, b: &[T], rel_tol: T) -> LstsqSolution<T> {
    assert_eq!(a.len(), rows * cols);
    assert_eq!(b.len(), rows);
    // Column-major working copy.
    let mut q: Vec<Vec<T>> = (0..cols).map(|j| (0..rows).map(|i| a[i * cols + j]).collect()).collect();
    let mut rhs = b.to_vec();
    let mut perm: Vec<usize> = (0..cols).collect();
    let mut diag = Vec::with_capacity(cols.min(rows));
    let steps = cols.min(rows);
    for k in 0..steps {
        // Pivot on the largest remaining column norm.
        let (mut best, mut best_norm) = (k, T::zero());
        for (j, col) in q.iter().enumerate().skip(k) {
            let nrm: T = col[k..].iter().map(|v| *v * *v).sum();
            if nrm > best_norm {
                best_norm = nrm;
                best = j;
            }
        }
        q.swap(k, best);
        perm.swap(k, best);
        let norm = best_norm.sqrt();
        if norm == T::zero() {
            break;
        }
        let col = &mut q[k];
        let alpha = if col[k] > T::zero() { -norm } else { norm };
        let mut v: Vec<T> = col[k..].to_vec();
        v[0] -= alpha;
        let vnorm2: T = v.iter().map(|x| *x * *x).sum();
        col[k] = alpha;
        for c in col[k + 1..].iter_mut() {
            *c = T::zero();
        }
        diag.push(alpha.abs());
        if vnorm2 == T::zero() {
            continue;
        }
        let two = T::c(2.0);
        for col in q.iter_mut().skip(k + 1) {
            let dot: T = v.iter().zip(&col[k..]).map(|(a, b)| *a * *b).sum();
            let f = two * dot / vnorm2;
            for (c, vi) in col[k..].iter_mut().zip(&v) {
                *c -= f * *vi;
            }
        }
        let dot: T = v.iter().zip(&rhs[k..]).map(|(a, b)| *a * *b).sum();
        let f = two * dot / vnorm2;
        for (c, vi) in rhs[k..].iter_mut().zip(&v) {
            *c -= f * *vi;
        }
    }
    let r00 = diag.first().copied().unwrap_or(T::zero());
    let rank = diag.iter().take_while(|d| **d > rel_tol * r00).count();
    let mut z = vec![T::zero(); cols];
    for i in (0..rank).rev() {
        let mut s = rhs[i];
        for j in i + 1..rank {
            s -= q[j][i] * z[j];
        }
        z[i] = s / q[i][i];
    }
    let mut x = vec![T::zero(); cols];
    for (k, &p) in perm.iter().enumerate() {
        x[p] = z[k];
    }
    let residual = (0..rows)
        .map(|i| {
            let r: T = (0..cols).map(|j| a[i * cols + j] * x[j]).sum::<T>() - b[i];
            r * r
        })
        .sum();
    let condition = if rank > 0 {
        let ratio = diag[0] / diag[rank - 1];
        ratio * ratio
    } else {
        T::infinity()
    };
    LstsqSolution { x, rank, condition, residual }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_fit_of_line() {
        // y = 2 + 3 t
        let ts = [0.0, 1.0, 2.0, 3.0];
        let a: Vec<f64> = ts.iter().flat_map(|t| [1.0, *t]).collect();
        let b: Vec<f64> = ts.iter().map(|t| 2.0 + 3.0 * t).collect();
        let s = lstsq(&a, 4, 2, &b, 1e-12);
        assert_eq!(s.rank, 2);
        assert!((s.x[0] - 2.0).abs() < 1e-12 && (s.x[1] - 3.0).abs() < 1e-12);
        assert!(s.residual < 1e-20);
    }

    #[test]
    fn rank_deficient_columns() {
        let a = [1.0f64, 1.0, 2.0, 2.0, 3.0, 3.0];
        let b = [1.0, 2.0, 3.0];
        let s = lstsq(&a, 3, 2, &b, 1e-10);
        assert_eq!(s.rank, 1);
        assert!((s.x[0] + s.x[1] - 1.0).abs() < 1e-12);
    }
}
