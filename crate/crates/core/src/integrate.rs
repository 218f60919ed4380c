//! Time stepping for `i d psi/dt = G(t) psi` with Hermitian `G`.
//!
//! The scheme is the fourth-order commutator-free Magnus integrator with two
//! exponentials per step,
//! `psi <- exp(-i h (a2 G1 + a1 G2)) exp(-i h (a1 G1 + a2 G2)) psi`,
//! `G_j = G(t + c_j h)`. Every step is exactly unitary, which matters here:
//! universal gauge potentials have very large eigenvalues outside their fit
//! window and make explicit Runge–Kutta schemes stiff. Step size control uses
//! step doubling.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::ed::hermitian_eigen;
use crate::error::{Error, Result};
use crate::C64;

const SQRT3_6: f64 = 0.288_675_134_594_812_9; // sqrt(3) / 6
pub(crate) const C1: f64 = 0.5 - SQRT3_6;
pub(crate) const C2: f64 = 0.5 + SQRT3_6;
pub(crate) const A_BIG: f64 = 0.25 + SQRT3_6;
pub(crate) const A_SMALL: f64 = 0.25 - SQRT3_6;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum StepControl {
    /// Step doubling with a local error tolerance on the state.
    Adaptive { tol: f64, max_steps: usize },
    /// `steps` equal steps over the whole run, distributed over segments
    /// proportionally to their length.
    Fixed { steps: usize },
}

impl StepControl {
    pub fn adaptive(tol: f64) -> Self {
        StepControl::Adaptive { tol, max_steps: 2_000_000 }
    }
}

impl Default for StepControl {
    fn default() -> Self {
        StepControl::adaptive(1e-9)
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct StepStats {
    pub accepted: usize,
    pub rejected: usize,
}

/// A propagator for one fourth-order step.
pub trait Stepper {
    type State: Clone;

    /// Advances `state` from `t` to `t + h`.
    fn step(&mut self, state: &Self::State, t: f64, h: f64) -> Result<Self::State>;

    /// Error norm between two candidate states.
    fn distance(a: &Self::State, b: &Self::State) -> f64;

    /// Schedule parameter at `t`, for error reports.
    fn lambda_at(&self, _t: f64) -> f64 {
        f64::NAN
    }
}

/// Integrates from `t0` to `t1`. `h_hint` carries the step size between
/// calls in adaptive mode; in fixed mode `steps` equal steps are taken.
pub fn propagate<S: Stepper>(
    stepper: &mut S,
    mut state: S::State,
    t0: f64,
    t1: f64,
    control: SegmentControl,
    h_hint: &mut f64,
    stats: &mut StepStats,
) -> Result<S::State> {
    let span = t1 - t0;
    if span <= 0.0 {
        return Ok(state);
    }
    match control {
        SegmentControl::Fixed { steps } => {
            let steps = steps.max(1);
            let h = span / steps as f64;
            for i in 0..steps {
                state = stepper.step(&state, t0 + i as f64 * h, h)?;
                stats.accepted += 1;
            }
            Ok(state)
        }
        SegmentControl::Adaptive { tol, max_steps } => {
            let mut t = t0;
            let mut h = if *h_hint > 0.0 { h_hint.min(span) } else { span / 16.0 };
            let min_h = span * 1e-14;
            let mut taken = 0usize;
            while t < t1 {
                let remaining = t1 - t;
                let last = h >= remaining;
                let hh = if last { remaining } else { h };
                let full = stepper.step(&state, t, hh)?;
                let half = stepper.step(&state, t, 0.5 * hh)?;
                let two = stepper.step(&half, t + 0.5 * hh, 0.5 * hh)?;
                let err = S::distance(&full, &two);
                if !err.is_finite() {
                    return Err(Error::Integrator {
                        t,
                        lambda: stepper.lambda_at(t),
                        reason: "non-finite state".into(),
                    });
                }
                // Local error of the doubled step is err / 15 for a fourth-order scheme.
                let est = err / 15.0;
                let factor = if est == 0.0 { 4.0 } else { (0.9 * (tol / est).powf(0.2)).clamp(0.2, 4.0) };
                if est <= tol {
                    state = two;
                    t = if last { t1 } else { t + hh };
                    stats.accepted += 1;
                    // A step clipped at the segment end says little about the next one.
                    h = if last { h.max(hh * factor) } else { hh * factor };
                } else {
                    stats.rejected += 1;
                    h = hh * factor;
                    if h < min_h {
                        return Err(Error::Integrator {
                            t,
                            lambda: stepper.lambda_at(t),
                            reason: format!("step size underflow (h = {h:.3e})"),
                        });
                    }
                }
                taken += 1;
                if taken > max_steps {
                    return Err(Error::Integrator {
                        t,
                        lambda: stepper.lambda_at(t),
                        reason: format!("exceeded {max_steps} steps"),
                    });
                }
            }
            *h_hint = h;
            Ok(state)
        }
    }
}

/// Per-segment step control derived from a [`StepControl`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum SegmentControl {
    Adaptive { tol: f64, max_steps: usize },
    Fixed { steps: usize },
}

impl StepControl {
    /// Control for a segment of length `len` out of a run of length `total`.
    pub fn segment(&self, len: f64, total: f64) -> SegmentControl {
        match *self {
            StepControl::Adaptive { tol, max_steps } => SegmentControl::Adaptive { tol, max_steps },
            StepControl::Fixed { steps } => {
                SegmentControl::Fixed { steps: ((steps as f64 * len / total).round() as usize).max(1) }
            }
        }
    }
}

/// `exp(-i h G) X` for Hermitian `G`.
pub fn expm_apply_dense(g: &DMatrix<C64>, h: f64, x: &DMatrix<C64>) -> DMatrix<C64> {
    let (e, u) = hermitian_eigen(g);
    let mut c = u.ad_mul(x);
    for (i, ei) in e.iter().enumerate() {
        let ph = C64::new(0.0, -h * ei).exp();
        for v in c.row_mut(i).iter_mut() {
            *v *= ph;
        }
    }
    &u * c
}

/// Dense stepper for a generator given as a closure of time; the state is a
/// matrix whose columns are propagated together.
pub struct DenseStepper<G, L> {
    pub generator: G,
    pub lambda: L,
}

impl<G, L> Stepper for DenseStepper<G, L>
where
    G: FnMut(f64) -> Result<DMatrix<C64>>,
    L: Fn(f64) -> f64,
{
    type State = DMatrix<C64>;

    fn step(&mut self, state: &DMatrix<C64>, t: f64, h: f64) -> Result<DMatrix<C64>> {
        let g1 = (self.generator)(t + C1 * h)?;
        let g2 = (self.generator)(t + C2 * h)?;
        let b1 = g1.scale(A_BIG) + g2.scale(A_SMALL);
        let b2 = g1.scale(A_SMALL) + g2.scale(A_BIG);
        let mid = expm_apply_dense(&b1, h, state);
        Ok(expm_apply_dense(&b2, h, &mid))
    }

    fn distance(a: &DMatrix<C64>, b: &DMatrix<C64>) -> f64 {
        a.iter().zip(b.iter()).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
    }

    fn lambda_at(&self, t: f64) -> f64 {
        (self.lambda)(t)
    }
}

/// Two-level stepper for `G(t) = n(t) . sigma` (traceless), state in `C^2`.
pub struct SpinStepper<G, L> {
    pub field: G,
    pub lambda: L,
}

/// `exp(-i h n.sigma) psi`.
pub fn spin_exp_apply(n: [f64; 3], h: f64, psi: [C64; 2]) -> [C64; 2] {
    let r = (n[0] * n[0] + n[1] * n[1] + n[2] * n[2]).sqrt();
    let (c, s) = ((h * r).cos(), (h * r).sin());
    if r == 0.0 {
        return psi;
    }
    let (nx, ny, nz) = (n[0] / r, n[1] / r, n[2] / r);
    // cos - i sin (n.sigma)
    let i = C64::new(0.0, 1.0);
    let m00 = C64::new(c, 0.0) - i * s * nz;
    let m11 = C64::new(c, 0.0) + i * s * nz;
    let m01 = -i * s * C64::new(nx, -ny);
    let m10 = -i * s * C64::new(nx, ny);
    [m00 * psi[0] + m01 * psi[1], m10 * psi[0] + m11 * psi[1]]
}

impl<G, L> Stepper for SpinStepper<G, L>
where
    G: FnMut(f64) -> [f64; 3],
    L: Fn(f64) -> f64,
{
    type State = [C64; 2];

    fn step(&mut self, state: &[C64; 2], t: f64, h: f64) -> Result<[C64; 2]> {
        let g1 = (self.field)(t + C1 * h);
        let g2 = (self.field)(t + C2 * h);
        let b1 = [0, 1, 2].map(|i| A_BIG * g1[i] + A_SMALL * g2[i]);
        let b2 = [0, 1, 2].map(|i| A_SMALL * g1[i] + A_BIG * g2[i]);
        Ok(spin_exp_apply(b2, h, spin_exp_apply(b1, h, *state)))
    }

    fn distance(a: &[C64; 2], b: &[C64; 2]) -> f64 {
        (a[0] - b[0]).norm().max((a[1] - b[1]).norm())
    }

    fn lambda_at(&self, t: f64) -> f64 {
        (self.lambda)(t)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_generator_is_exact() {
        // G = sigma_x: psi(t) = cos t |0> - i sin t |1>.
        let mut s = SpinStepper { field: |_t: f64| [1.0, 0.0, 0.0], lambda: |_t: f64| 0.0 };
        let mut hint = 0.0;
        let mut stats = StepStats::default();
        let psi = [C64::new(1.0, 0.0), C64::new(0.0, 0.0)];
        let out = propagate(&mut s, psi, 0.0, 1.3, SegmentControl::Adaptive { tol: 1e-12, max_steps: 1000 }, &mut hint, &mut stats)
            .unwrap();
        assert!((out[0] - C64::new(1.3f64.cos(), 0.0)).norm() < 1e-13);
        assert!((out[1] - C64::new(0.0, -(1.3f64.sin()))).norm() < 1e-13);
    }

    #[test]
    fn fourth_order_convergence() {
        // Time-dependent field: compare fixed-step errors at h and h/2.
        let field = |t: f64| [t.cos(), 0.3 * t, (2.0 * t).sin()];
        let run = |steps: usize| {
            let mut s = SpinStepper { field, lambda: |_t: f64| 0.0 };
            let mut hint = 0.0;
            let mut stats = StepStats::default();
            let psi = [C64::new(1.0, 0.0), C64::new(0.0, 0.0)];
            propagate(&mut s, psi, 0.0, 2.0, SegmentControl::Fixed { steps }, &mut hint, &mut stats).unwrap()
        };
        let reference = run(4096);
        let e1 = SpinStepper::<fn(f64) -> [f64; 3], fn(f64) -> f64>::distance(&run(32), &reference);
        let e2 = SpinStepper::<fn(f64) -> [f64; 3], fn(f64) -> f64>::distance(&run(64), &reference);
        let order = (e1 / e2).log2();
        assert!(order > 3.7 && order < 4.5, "observed order {order}");
    }

    #[test]
    fn dense_matches_spin() {
        let field = |t: f64| [t.cos(), 0.3 * t, (2.0 * t).sin()];
        let mut s = SpinStepper { field, lambda: |_t: f64| 0.0 };
        let mut d = DenseStepper {
            generator: |t: f64| {
                let n = field(t);
                Ok(DMatrix::from_row_slice(
                    2,
                    2,
                    &[C64::new(n[2], 0.0), C64::new(n[0], -n[1]), C64::new(n[0], n[1]), C64::new(-n[2], 0.0)],
                ))
            },
            lambda: |_t: f64| 0.0,
        };
        let psi = [C64::new(0.6, 0.0), C64::new(0.0, 0.8)];
        let a = s.step(&psi, 0.1, 0.2).unwrap();
        let b = d.step(&DMatrix::from_column_slice(2, 1, &psi), 0.1, 0.2).unwrap();
        assert!((a[0] - b[0]).norm() < 1e-14 && (a[1] - b[1]).norm() < 1e-14);
    }
}
