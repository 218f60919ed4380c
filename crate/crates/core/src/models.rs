//! Annealing families `H(lambda) = (1 - lambda) H0 + lambda H1` and schedules.

use std::f64::consts::PI;

use num_complex::Complex;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::pauli::{Axis, PauliOperator, PauliString};
use crate::scalar::Real;

/// Name of the generator used to draw disordered fields.
pub const DISORDER_RNG: &str = "chacha8";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum ModelKind {
    /// `lambda (-J sum ZZ) + (1 - lambda)(-h sum X)`.
    TfiClean,
    /// Clean Ising coupling, fields `h_i` repeated with period `N_B`.
    TfiBlockDisorder,
    /// Adds `-J2 sum Z_i Z_{i+2}` to the Ising endpoint.
    NnnTfi,
    /// `(1 - lambda)(-J/3 sum s.s) + lambda(-Delta sum ZZ)`.
    XxzAnneal,
    /// `-J sum (XX + YY) - Delta sum ZZ`, independent of lambda.
    XxzStatic,
    /// User-supplied endpoint operators.
    Custom,
}

impl ModelKind {
    pub fn as_str(self) -> &'static str {
        match self {
            ModelKind::TfiClean => "TFI_CLEAN",
            ModelKind::TfiBlockDisorder => "TFI_BLOCK_DISORDER",
            ModelKind::NnnTfi => "NNN_TFI",
            ModelKind::XxzAnneal => "XXZ_ANNEAL",
            ModelKind::XxzStatic => "XXZ_STATIC",
            ModelKind::Custom => "CUSTOM",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s.to_ascii_uppercase().replace('-', "_").as_str() {
            "TFI_CLEAN" => Ok(ModelKind::TfiClean),
            "TFI_BLOCK_DISORDER" => Ok(ModelKind::TfiBlockDisorder),
            "NNN_TFI" => Ok(ModelKind::NnnTfi),
            "XXZ_ANNEAL" => Ok(ModelKind::XxzAnneal),
            "XXZ_STATIC" => Ok(ModelKind::XxzStatic),
            "CUSTOM" => Ok(ModelKind::Custom),
            other => Err(Error::invalid(format!("unknown model name {other:?}"))),
        }
    }

    pub fn is_free_fermion(self) -> bool {
        matches!(self, ModelKind::TfiClean | ModelKind::TfiBlockDisorder)
    }
}

impl std::fmt::Display for ModelKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Couplings {
    pub j: f64,
    pub h: f64,
    pub j2: f64,
    pub delta: f64,
}

impl Default for Couplings {
    fn default() -> Self {
        Couplings { j: 1.0, h: 1.0, j2: 0.25, delta: 1.0 }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Boundary {
    Open,
    #[default]
    Periodic,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Disorder {
    pub block_size: usize,
    pub fields: Vec<f64>,
    pub seed: u64,
}

impl Disorder {
    /// Draws `block_size` fields uniformly from `[0, h]`.
    pub fn sample(block_size: usize, h: f64, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let fields = (0..block_size).map(|_| rng.gen::<f64>() * h).collect();
        Disorder { block_size, fields, seed }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CustomEndpoints {
    /// `H(0)` in the text format of [`PauliOperator::to_text`].
    pub h0: String,
    /// `H(1)` in the same format.
    pub h1: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelSpec {
    pub name: ModelKind,
    pub n_sites: usize,
    #[serde(default)]
    pub couplings: Couplings,
    #[serde(default)]
    pub boundary: Boundary,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub disorder: Option<Disorder>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub custom: Option<CustomEndpoints>,
}

impl ModelSpec {
    pub fn new(name: ModelKind, n_sites: usize) -> Self {
        ModelSpec {
            name,
            n_sites,
            couplings: Couplings::default(),
            boundary: Boundary::Periodic,
            disorder: None,
            custom: None,
        }
    }

    pub fn tfi_clean(n_sites: usize) -> Self {
        Self::new(ModelKind::TfiClean, n_sites)
    }

    pub fn nnn_tfi(n_sites: usize) -> Self {
        Self::new(ModelKind::NnnTfi, n_sites)
    }

    pub fn xxz_anneal(n_sites: usize) -> Self {
        Self::new(ModelKind::XxzAnneal, n_sites)
    }

    pub fn xxz_static(n_sites: usize, delta_over_j: f64) -> Self {
        let mut m = Self::new(ModelKind::XxzStatic, n_sites);
        m.couplings.delta = delta_over_j * m.couplings.j;
        m
    }

    pub fn tfi_block_disorder(n_sites: usize, block_size: usize, seed: u64) -> Self {
        let mut m = Self::new(ModelKind::TfiBlockDisorder, n_sites);
        m.disorder = Some(Disorder::sample(block_size, m.couplings.h, seed));
        m
    }

    /// Endpoints given directly as operators.
    pub fn custom(h0: &PauliOperator<f64>, h1: &PauliOperator<f64>) -> Self {
        let mut m = Self::new(ModelKind::Custom, h0.n_sites());
        m.boundary = Boundary::Open;
        m.custom = Some(CustomEndpoints { h0: h0.to_text(), h1: h1.to_text() });
        m
    }

    pub fn with_boundary(mut self, b: Boundary) -> Self {
        self.boundary = b;
        self
    }

    pub fn with_couplings(mut self, c: Couplings) -> Self {
        self.couplings = c;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_sites == 0 {
            return Err(Error::invalid("n_sites must be positive"));
        }
        match self.name {
            ModelKind::TfiBlockDisorder => {
                let d = self
                    .disorder
                    .as_ref()
                    .ok_or_else(|| Error::invalid("TFI_BLOCK_DISORDER needs a disorder block"))?;
                if d.block_size == 0 || d.fields.len() != d.block_size {
                    return Err(Error::invalid("disorder fields must have block_size entries"));
                }
                let h = self.couplings.h;
                if d.fields.iter().any(|&f| !(0.0..=h).contains(&f)) {
                    return Err(Error::invalid(format!("disorder fields must lie in [0, {h}]")));
                }
            }
            ModelKind::Custom => {
                if self.custom.is_none() {
                    return Err(Error::invalid("CUSTOM model needs h0/h1 operators"));
                }
            }
            _ => {}
        }
        Ok(())
    }

    fn bonds(&self, range: usize) -> Vec<(usize, usize)> {
        let n = self.n_sites;
        match self.boundary {
            Boundary::Periodic => {
                if n <= range {
                    return Vec::new();
                }
                (0..n).map(|i| (i, (i + range) % n)).collect()
            }
            Boundary::Open => (0..n.saturating_sub(range)).map(|i| (i, i + range)).collect(),
        }
    }

    fn field(&self, site: usize) -> f64 {
        match (&self.name, &self.disorder) {
            (ModelKind::TfiBlockDisorder, Some(d)) => d.fields[site % d.block_size],
            _ => self.couplings.h,
        }
    }

    /// The two endpoint Hamiltonians `(H0, H1)`.
    pub fn endpoints<T: Real>(&self) -> Result<(PauliOperator<T>, PauliOperator<T>)> {
        self.validate()?;
        let n = self.n_sites;
        let c = self.couplings;
        let mut h0 = PauliOperator::<T>::zero(n);
        let mut h1 = PauliOperator::<T>::zero(n);
        let w = |v: f64| Complex::new(T::c(v), T::zero());
        let two = |i: usize, j: usize, a: Axis| {
            PauliString::from_sites(&[(i, a), (j, a)]).expect("distinct bond sites")
        };
        match self.name {
            ModelKind::TfiClean | ModelKind::TfiBlockDisorder | ModelKind::NnnTfi => {
                for i in 0..n {
                    h0.add_term(PauliString::single(i, Axis::X), w(-self.field(i)));
                }
                for (i, j) in self.bonds(1) {
                    h1.add_term(two(i, j, Axis::Z), w(-c.j));
                }
                if self.name == ModelKind::NnnTfi {
                    for (i, j) in self.bonds(2) {
                        h1.add_term(two(i, j, Axis::Z), w(-c.j2));
                    }
                }
            }
            ModelKind::XxzAnneal => {
                for (i, j) in self.bonds(1) {
                    for a in [Axis::X, Axis::Y, Axis::Z] {
                        h0.add_term(two(i, j, a), w(-c.j / 3.0));
                    }
                    h1.add_term(two(i, j, Axis::Z), w(-c.delta));
                }
            }
            ModelKind::XxzStatic => {
                for (i, j) in self.bonds(1) {
                    h0.add_term(two(i, j, Axis::X), w(-c.j));
                    h0.add_term(two(i, j, Axis::Y), w(-c.j));
                    h0.add_term(two(i, j, Axis::Z), w(-c.delta));
                }
                h1 = h0.clone();
            }
            ModelKind::Custom => {
                let ce = self.custom.as_ref().expect("validated");
                let a = PauliOperator::<f64>::from_text(n, &ce.h0)?;
                let b = PauliOperator::<f64>::from_text(n, &ce.h1)?;
                let cast = |op: &PauliOperator<f64>| {
                    PauliOperator::<T>::from_terms(
                        n,
                        op.iter()
                            .map(|(s, v)| (*s, Complex::new(T::c(v.re), T::c(v.im)))),
                    )
                };
                h0 = cast(&a);
                h1 = cast(&b);
            }
        }
        h0.prune();
        h1.prune();
        Ok((h0, h1))
    }

    /// Translation step (in sites) under which the model is invariant, if any.
    pub fn translation_step(&self) -> Option<usize> {
        if self.boundary != Boundary::Periodic {
            return None;
        }
        match self.name {
            ModelKind::TfiClean | ModelKind::NnnTfi | ModelKind::XxzAnneal | ModelKind::XxzStatic => {
                Some(1)
            }
            ModelKind::TfiBlockDisorder => {
                let b = self.disorder.as_ref()?.block_size;
                (self.n_sites % b == 0).then_some(b)
            }
            ModelKind::Custom => None,
        }
    }

    pub fn conserves_magnetization(&self) -> bool {
        matches!(self.name, ModelKind::XxzAnneal | ModelKind::XxzStatic)
    }

    /// Whether `prod_i X_i` commutes with both endpoints.
    pub fn spin_flip_symmetric(&self) -> bool {
        match self.name {
            ModelKind::Custom => {
                let Ok((h0, h1)) = self.endpoints::<f64>() else {
                    return false;
                };
                let all_x = if self.n_sites == 64 { u64::MAX } else { (1u64 << self.n_sites) - 1 };
                let flip = PauliString::from_masks(all_x, 0);
                let symmetric = h0.iter().chain(h1.iter()).all(|(s, _)| s.commutes_with(&flip));
                symmetric
            }
            _ => true,
        }
    }
}

pub fn hamiltonian<T: Real>(spec: &ModelSpec, lambda: f64) -> Result<PauliOperator<T>> {
    if !(0.0..=1.0).contains(&lambda) {
        return Err(Error::invalid(format!("lambda = {lambda} outside [0, 1]")));
    }
    let (h0, h1) = spec.endpoints::<T>()?;
    let l = T::c(lambda);
    Ok(h0
        .scale_real(T::one() - l)
        .axpy(Complex::new(l, T::zero()), &h1))
}

/// `dH/dlambda = H1 - H0`, independent of lambda.
pub fn dlambda_h<T: Real>(spec: &ModelSpec) -> Result<PauliOperator<T>> {
    let (h0, h1) = spec.endpoints::<T>()?;
    Ok(h1.sub(&h0))
}

/// Largest single-pair excitation energy `4 (lambda J + (1 - lambda) h)`.
///
/// With `lambda = None` the maximum over `[0, 1]` is returned.
pub fn omega_max(spec: &ModelSpec, lambda: Option<f64>) -> Result<f64> {
    if !spec.name.is_free_fermion() {
        return Err(Error::NoHardCutoff(spec.name.to_string()));
    }
    let c = spec.couplings;
    let at = |l: f64| 4.0 * (l * c.j.abs() + (1.0 - l) * c.h.abs());
    Ok(match lambda {
        Some(l) => at(l),
        None => at(0.0).max(at(1.0)),
    })
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum ScheduleShape {
    #[default]
    SmoothSine,
    Linear,
}

pub const DEFAULT_TOTAL_TIME: f64 = 0.1;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Schedule {
    pub total_time: f64,
    #[serde(default)]
    pub shape: ScheduleShape,
}

impl Default for Schedule {
    fn default() -> Self {
        Schedule { total_time: DEFAULT_TOTAL_TIME, shape: ScheduleShape::SmoothSine }
    }
}

impl Schedule {
    pub fn new(total_time: f64, shape: ScheduleShape) -> Result<Self> {
        if !(total_time > 0.0 && total_time.is_finite()) {
            return Err(Error::invalid(format!("total time {total_time} must be positive")));
        }
        Ok(Schedule { total_time, shape })
    }

    pub fn smooth(total_time: f64) -> Self {
        Schedule { total_time, shape: ScheduleShape::SmoothSine }
    }

    /// `(lambda(t), dlambda/dt)` without range checks.
    #[inline]
    pub fn at(&self, t: f64) -> (f64, f64) {
        let tt = self.total_time;
        match self.shape {
            ScheduleShape::SmoothSine => {
                let s = (PI * t / (2.0 * tt)).sin();
                (s * s, PI / (2.0 * tt) * (PI * t / tt).sin())
            }
            ScheduleShape::Linear => (t / tt, 1.0 / tt),
        }
    }

    /// Time at which the schedule reaches `lambda`.
    pub fn time_at(&self, lambda: f64) -> f64 {
        let l = lambda.clamp(0.0, 1.0);
        match self.shape {
            ScheduleShape::SmoothSine => 2.0 * self.total_time / PI * l.sqrt().asin(),
            ScheduleShape::Linear => l * self.total_time,
        }
    }
}

pub fn schedule_eval(s: &Schedule, t: f64) -> Result<(f64, f64)> {
    let eps = 1e-12 * s.total_time;
    if !(t >= -eps && t <= s.total_time + eps) {
        return Err(Error::invalid(format!("t = {t} outside [0, {}]", s.total_time)));
    }
    Ok(s.at(t.clamp(0.0, s.total_time)))
}
