//! Sparse Pauli-string operators on spin-1/2 chains.
//!
//! A [`PauliString`] is stored in symplectic form as two bit masks: bit `i`
//! of `x` (resp. `z`) is set when the string carries an `X` (resp. `Z`)
//! factor on site `i`, and `Y` sets both. The bit masks are the canonical
//! sorted-site form, so map lookups are exact. Chains are limited to
//! [`MAX_SITES`] sites.
//!
//! Weights are complex and the operator is generic over the real scalar.
//! After every arithmetic operation weights with magnitude below the drop
//! tolerance are removed.

use std::fmt;
use std::hash::BuildHasherDefault;

use nalgebra::DMatrix;
use num_complex::Complex;
use rustc_hash::FxHasher;

use crate::error::{Error, Result};
use crate::scalar::Real;

pub const MAX_SITES: usize = 64;
pub const DEFAULT_DROP_TOL: f64 = 1e-14;
pub const DEFAULT_DENSE_LIMIT: usize = 14;

pub(crate) type FxMap<K, V> = std::collections::HashMap<K, V, BuildHasherDefault<FxHasher>>;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Axis {
    X,
    Y,
    Z,
}

impl Axis {
    pub fn symbol(self) -> char {
        match self {
            Axis::X => 'X',
            Axis::Y => 'Y',
            Axis::Z => 'Z',
        }
    }

    pub fn parse(c: char) -> Option<Axis> {
        match c.to_ascii_uppercase() {
            'X' => Some(Axis::X),
            'Y' => Some(Axis::Y),
            'Z' => Some(Axis::Z),
            _ => None,
        }
    }
}

/// Tensor product of single-site Pauli matrices, without weight.
#[derive(Clone, Copy, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PauliString {
    x: u64,
    z: u64,
}

impl PauliString {
    pub const IDENTITY: PauliString = PauliString { x: 0, z: 0 };

    pub fn from_masks(x: u64, z: u64) -> Self {
        PauliString { x, z }
    }

    pub fn single(site: usize, axis: Axis) -> Self {
        assert!(site < MAX_SITES, "site {site} out of range");
        let bit = 1u64 << site;
        match axis {
            Axis::X => PauliString { x: bit, z: 0 },
            Axis::Y => PauliString { x: bit, z: bit },
            Axis::Z => PauliString { x: 0, z: bit },
        }
    }

    /// Builds a string from `(site, axis)` pairs. Sites must be distinct.
    pub fn from_sites(sites: &[(usize, Axis)]) -> Result<Self> {
        let mut s = PauliString::IDENTITY;
        for &(site, axis) in sites {
            if site >= MAX_SITES {
                return Err(Error::invalid(format!("site {site} exceeds {MAX_SITES}")));
            }
            if (s.x | s.z) >> site & 1 == 1 {
                return Err(Error::invalid(format!("site {site} repeated")));
            }
            let p = PauliString::single(site, axis);
            s.x |= p.x;
            s.z |= p.z;
        }
        Ok(s)
    }

    #[inline]
    pub fn x_mask(&self) -> u64 {
        self.x
    }

    #[inline]
    pub fn z_mask(&self) -> u64 {
        self.z
    }

    #[inline]
    pub fn support_mask(&self) -> u64 {
        self.x | self.z
    }

    /// Number of non-identity sites.
    #[inline]
    pub fn support(&self) -> usize {
        self.support_mask().count_ones() as usize
    }

    #[inline]
    pub fn is_identity(&self) -> bool {
        self.x == 0 && self.z == 0
    }

    pub fn axis_at(&self, site: usize) -> Option<Axis> {
        let xb = self.x >> site & 1 == 1;
        let zb = self.z >> site & 1 == 1;
        match (xb, zb) {
            (false, false) => None,
            (true, false) => Some(Axis::X),
            (true, true) => Some(Axis::Y),
            (false, true) => Some(Axis::Z),
        }
    }

    /// Sites in increasing order with their axis.
    pub fn sites(&self) -> Vec<(usize, Axis)> {
        let mut out = Vec::with_capacity(self.support());
        let mut m = self.support_mask();
        while m != 0 {
            let i = m.trailing_zeros() as usize;
            out.push((i, self.axis_at(i).expect("occupied site")));
            m &= m - 1;
        }
        out
    }

    /// Highest occupied site plus one; zero for the identity.
    pub fn extent(&self) -> usize {
        64 - self.support_mask().leading_zeros() as usize
    }

    #[inline]
    pub fn commutes_with(&self, other: &PauliString) -> bool {
        ((self.x & other.z).count_ones() + (self.z & other.x).count_ones()) % 2 == 0
    }

    /// Product `self * other` as a string and a power of `i` (0..4).
    #[inline]
    pub fn mul_phase(&self, other: &PauliString) -> (PauliString, u32) {
        let x = self.x ^ other.x;
        let z = self.z ^ other.z;
        let ya = (self.x & self.z).count_ones();
        let yb = (other.x & other.z).count_ones();
        let yc = (x & z).count_ones();
        let flips = (self.z & other.x).count_ones();
        let e = (ya + yb + 2 * flips + 4 * 64 - yc) % 4;
        (PauliString { x, z }, e)
    }

    /// Product with the phase as a complex number.
    pub fn multiply<T: Real>(&self, other: &PauliString) -> (PauliString, Complex<T>) {
        let (s, e) = self.mul_phase(other);
        (s, i_pow(e))
    }

    /// Cyclic shift of every site index by `shift` on a ring of `n` sites.
    pub fn translate(&self, shift: usize, n: usize) -> PauliString {
        PauliString {
            x: rotate(self.x, shift, n),
            z: rotate(self.z, shift, n),
        }
    }

    /// Action on a computational basis state: `P|b> = phase |b'>`.
    ///
    /// Bit `i` of `b` set means site `i` is spin down (`Z = -1`).
    #[inline]
    pub fn apply_to_basis(&self, b: u64) -> (u64, u32) {
        let y = (self.x & self.z).count_ones();
        let sign = (self.z & b).count_ones() % 2;
        (b ^ self.x, (y + 2 * sign) % 4)
    }
}

impl fmt::Debug for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_identity() {
            return write!(f, "I");
        }
        let parts: Vec<String> = self
            .sites()
            .iter()
            .map(|(i, a)| format!("{}{}", a.symbol(), i))
            .collect();
        write!(f, "{}", parts.join(" "))
    }
}

#[inline]
pub(crate) fn rotate(m: u64, shift: usize, n: usize) -> u64 {
    let shift = shift % n;
    if shift == 0 {
        return m;
    }
    let full = if n == 64 { u64::MAX } else { (1u64 << n) - 1 };
    ((m << shift) | (m >> (n - shift))) & full
}

#[inline]
pub(crate) fn i_pow<T: Real>(e: u32) -> Complex<T> {
    match e % 4 {
        0 => Complex::new(T::one(), T::zero()),
        1 => Complex::new(T::zero(), T::one()),
        2 => Complex::new(-T::one(), T::zero()),
        _ => Complex::new(T::zero(), -T::one()),
    }
}

/// Sparse sum of Pauli strings with complex weights.
#[derive(Clone)]
pub struct PauliOperator<T: Real> {
    terms: FxMap<PauliString, Complex<T>>,
    n_sites: usize,
    drop_tol: T,
}

impl<T: Real> PauliOperator<T> {
    pub fn zero(n_sites: usize) -> Self {
        assert!(n_sites <= MAX_SITES, "at most {MAX_SITES} sites supported");
        PauliOperator {
            terms: FxMap::default(),
            n_sites,
            drop_tol: T::c(DEFAULT_DROP_TOL),
        }
    }

    pub fn identity(n_sites: usize) -> Self {
        let mut op = Self::zero(n_sites);
        op.add_term(PauliString::IDENTITY, Complex::new(T::one(), T::zero()));
        op
    }

    pub fn from_terms<I>(n_sites: usize, terms: I) -> Self
    where
        I: IntoIterator<Item = (PauliString, Complex<T>)>,
    {
        let mut op = Self::zero(n_sites);
        for (s, w) in terms {
            op.add_term(s, w);
        }
        op.prune();
        op
    }

    pub fn single(n_sites: usize, site: usize, axis: Axis, weight: T) -> Self {
        Self::from_terms(
            n_sites,
            [(PauliString::single(site, axis), Complex::new(weight, T::zero()))],
        )
    }

    pub fn with_drop_tol(mut self, tol: T) -> Self {
        self.drop_tol = tol;
        self.prune();
        self
    }

    #[inline]
    pub fn n_sites(&self) -> usize {
        self.n_sites
    }

    #[inline]
    pub fn drop_tol(&self) -> T {
        self.drop_tol
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.terms.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn weight(&self, s: &PauliString) -> Complex<T> {
        self.terms.get(s).copied().unwrap_or_else(Complex::default)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&PauliString, &Complex<T>)> {
        self.terms.iter()
    }

    /// Terms sorted by string; deterministic order for output and hashing.
    pub fn sorted_terms(&self) -> Vec<(PauliString, Complex<T>)> {
        let mut v: Vec<_> = self.terms.iter().map(|(s, w)| (*s, *w)).collect();
        v.sort_by(|a, b| a.0.cmp(&b.0));
        v
    }

    /// Adds a weight without pruning; call [`prune`](Self::prune) afterwards.
    #[inline]
    pub fn add_term(&mut self, s: PauliString, w: Complex<T>) {
        debug_assert!(s.extent() <= self.n_sites, "string {s} outside lattice");
        *self.terms.entry(s).or_insert_with(Complex::default) += w;
    }

    pub fn prune(&mut self) {
        let tol = self.drop_tol;
        self.terms.retain(|_, w| w.norm() >= tol);
    }

    pub fn max_support(&self) -> usize {
        self.terms.keys().map(|s| s.support()).max().unwrap_or(0)
    }

    /// Drops every string whose support exceeds `p`.
    pub fn truncate_support(&mut self, p: usize) {
        self.terms.retain(|s, _| s.support() <= p);
    }

    pub fn scale(&self, a: Complex<T>) -> Self {
        let mut out = self.clone();
        for w in out.terms.values_mut() {
            *w = *w * a;
        }
        out.prune();
        out
    }

    pub fn scale_real(&self, a: T) -> Self {
        self.scale(Complex::new(a, T::zero()))
    }

    /// `self + a * other`.
    pub fn axpy(&self, a: Complex<T>, other: &Self) -> Self {
        check_lattice(self, other);
        let mut out = self.clone();
        for (s, w) in other.terms.iter() {
            out.add_term(*s, *w * a);
        }
        out.prune();
        out
    }

    pub fn add(&self, other: &Self) -> Self {
        self.axpy(Complex::new(T::one(), T::zero()), other)
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.axpy(Complex::new(-T::one(), T::zero()), other)
    }

    /// Operator product `self * other`.
    pub fn mul(&self, other: &Self) -> Self {
        check_lattice(self, other);
        let mut out = Self::zero(self.n_sites);
        out.drop_tol = self.drop_tol;
        for (sa, wa) in self.terms.iter() {
            for (sb, wb) in other.terms.iter() {
                let (s, e) = sa.mul_phase(sb);
                out.add_term(s, *wa * *wb * i_pow::<T>(e));
            }
        }
        out.prune();
        out
    }

    /// Commutator `[self, other]`. Only anticommuting string pairs
    /// contribute, each with twice the product, so exactly commuting pairs
    /// leave no residue.
    pub fn commutator(&self, other: &Self) -> Self {
        self.commutator_truncated(other, usize::MAX)
    }

    /// Commutator keeping only strings with support at most `max_support`.
    pub fn commutator_truncated(&self, other: &Self, max_support: usize) -> Self {
        check_lattice(self, other);
        let two = T::c(2.0);
        let mut out = Self::zero(self.n_sites);
        out.drop_tol = self.drop_tol;
        for (sa, wa) in self.terms.iter() {
            for (sb, wb) in other.terms.iter() {
                if sa.commutes_with(sb) {
                    continue;
                }
                let (s, e) = sa.mul_phase(sb);
                if s.support() > max_support {
                    continue;
                }
                out.add_term(s, *wa * *wb * i_pow::<T>(e) * two);
            }
        }
        out.prune();
        out
    }

    pub fn adjoint(&self) -> Self {
        let mut out = self.clone();
        for w in out.terms.values_mut() {
            *w = w.conj();
        }
        out
    }

    /// Hermitian iff every weight is real (strings are self-adjoint).
    pub fn is_hermitian(&self, tol: T) -> bool {
        self.terms.values().all(|w| w.im.abs() <= tol)
    }

    /// Infinite-temperature inner product `Tr(a^dagger b) / 2^N`.
    pub fn frobenius_inner(&self, other: &Self) -> Complex<T> {
        check_lattice(self, other);
        let (small, large, conj_small) = if self.len() <= other.len() {
            (self, other, true)
        } else {
            (other, self, false)
        };
        let mut acc = Complex::default();
        for (s, w) in small.terms.iter() {
            if let Some(v) = large.terms.get(s) {
                acc += if conj_small { w.conj() * *v } else { v.conj() * *w };
            }
        }
        acc
    }

    pub fn norm_sqr(&self) -> T {
        self.terms.values().map(|w| w.norm_sqr()).sum()
    }

    pub fn norm(&self) -> T {
        self.norm_sqr().sqrt()
    }

    /// Translates every string cyclically by `shift` sites.
    pub fn translate(&self, shift: usize) -> Self {
        let n = self.n_sites;
        let mut out = Self::zero(n);
        out.drop_tol = self.drop_tol;
        for (s, w) in self.terms.iter() {
            out.add_term(s.translate(shift, n), *w);
        }
        out
    }

    /// Largest weight difference against `other`.
    pub fn max_abs_diff(&self, other: &Self) -> T {
        let mut m = T::zero();
        for (s, w) in self.terms.iter() {
            m = m.max((*w - other.weight(s)).norm());
        }
        for (s, w) in other.terms.iter() {
            if !self.terms.contains_key(s) {
                m = m.max(w.norm());
            }
        }
        m
    }

    /// Dense computational-basis matrix. Basis index bit `i` is site `i`.
    pub fn to_dense(&self, n_sites: usize) -> Result<DMatrix<Complex<T>>> {
        self.to_dense_with_limit(n_sites, DEFAULT_DENSE_LIMIT)
    }

    pub fn to_dense_with_limit(&self, n_sites: usize, limit: usize) -> Result<DMatrix<Complex<T>>> {
        if n_sites > limit {
            return Err(Error::DenseLimit { dim: n_sites, limit });
        }
        if let Some(s) = self.terms.keys().find(|s| s.extent() > n_sites) {
            return Err(Error::invalid(format!("string {s} outside {n_sites} sites")));
        }
        let dim = 1usize << n_sites;
        let mut m = DMatrix::from_element(dim, dim, Complex::default());
        for (s, w) in self.terms.iter() {
            for b in 0..dim as u64 {
                let (b2, e) = s.apply_to_basis(b);
                m[(b2 as usize, b as usize)] += *w * i_pow::<T>(e);
            }
        }
        Ok(m)
    }

    /// Text dump: one term per line, `re im site:axis site:axis ...`.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for (s, w) in self.sorted_terms() {
            out.push_str(&format!("{} {}", w.re, w.im));
            for (i, a) in s.sites() {
                out.push_str(&format!(" {}:{}", i, a.symbol()));
            }
            out.push('\n');
        }
        out
    }

    /// Parses the format written by [`to_text`](Self::to_text).
    pub fn from_text(n_sites: usize, text: &str) -> Result<Self> {
        let mut op = Self::zero(n_sites);
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let bad = |what: &str| Error::invalid(format!("line {}: {what}", lineno + 1));
            let mut it = line.split_whitespace();
            let re: f64 = it.next().and_then(|t| t.parse().ok()).ok_or_else(|| bad("weight"))?;
            let im: f64 = it.next().and_then(|t| t.parse().ok()).ok_or_else(|| bad("weight"))?;
            let mut sites = Vec::new();
            for tok in it {
                let (i, a) = tok.split_once(':').ok_or_else(|| bad("expected site:axis"))?;
                let i: usize = i.parse().map_err(|_| bad("site index"))?;
                if i >= n_sites {
                    return Err(bad("site outside lattice"));
                }
                let a = a.chars().next().and_then(Axis::parse).ok_or_else(|| bad("axis"))?;
                sites.push((i, a));
            }
            let s = PauliString::from_sites(&sites).map_err(|e| bad(&e.to_string()))?;
            op.add_term(s, Complex::new(T::c(re), T::c(im)));
        }
        op.prune();
        Ok(op)
    }
}

impl<T: Real> fmt::Debug for PauliOperator<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "PauliOperator(n={}, ", self.n_sites)?;
        let terms = self.sorted_terms();
        f.debug_map().entries(terms.iter().map(|(s, w)| (s, w))).finish()?;
        write!(f, ")")
    }
}

impl<T: Real> PartialEq for PauliOperator<T> {
    fn eq(&self, other: &Self) -> bool {
        self.n_sites == other.n_sites && self.terms == other.terms
    }
}

fn check_lattice<T: Real>(a: &PauliOperator<T>, b: &PauliOperator<T>) {
    assert_eq!(a.n_sites, b.n_sites, "operators live on different lattices");
}

/// Free-function form of [`PauliString::multiply`].
pub fn multiply<T: Real>(a: &PauliString, b: &PauliString) -> (PauliString, Complex<T>) {
    a.multiply(b)
}

pub fn commutator<T: Real>(a: &PauliOperator<T>, b: &PauliOperator<T>) -> PauliOperator<T> {
    a.commutator(b)
}

pub fn frobenius_inner<T: Real>(a: &PauliOperator<T>, b: &PauliOperator<T>) -> Complex<T> {
    a.frobenius_inner(b)
}

pub fn to_dense<T: Real>(op: &PauliOperator<T>, n_sites: usize) -> Result<DMatrix<Complex<T>>> {
    op.to_dense(n_sites)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn s(sites: &[(usize, Axis)]) -> PauliString {
        PauliString::from_sites(sites).unwrap()
    }

    #[test]
    fn single_site_products() {
        let x = s(&[(0, Axis::X)]);
        let z = s(&[(0, Axis::Z)]);
        let (p, ph) = multiply::<f64>(&x, &x);
        assert!(p.is_identity());
        assert_eq!(ph, c(1.0, 0.0));
        let (p, ph) = multiply::<f64>(&z, &x);
        assert_eq!(p, s(&[(0, Axis::Y)]));
        assert_eq!(ph, c(0.0, 1.0));
    }

    #[test]
    fn two_site_product_matches_dense() {
        let a = s(&[(0, Axis::X), (1, Axis::Z)]);
        let b = s(&[(0, Axis::Z), (1, Axis::Z)]);
        let (p, ph) = multiply::<f64>(&a, &b);
        assert_eq!(p, s(&[(0, Axis::Y)]));
        assert_eq!(ph, c(0.0, -1.0));

        let da = PauliOperator::from_terms(2, [(a, c(1.0, 0.0))]).to_dense(2).unwrap();
        let db = PauliOperator::from_terms(2, [(b, c(1.0, 0.0))]).to_dense(2).unwrap();
        let dp = PauliOperator::from_terms(2, [(p, ph)]).to_dense(2).unwrap();
        assert!((da * db - dp).norm() < 1e-15);
    }

    #[test]
    fn repeated_site_rejected() {
        assert!(PauliString::from_sites(&[(1, Axis::X), (1, Axis::Z)]).is_err());
    }

    #[test]
    fn zx_commutator_is_2iy() {
        let z = PauliOperator::<f64>::single(1, 0, Axis::Z, 1.0);
        let x = PauliOperator::<f64>::single(1, 0, Axis::X, 1.0);
        let comm = z.commutator(&x);
        assert_eq!(comm.len(), 1);
        assert_eq!(comm.weight(&s(&[(0, Axis::Y)])), c(0.0, 2.0));
    }

    #[test]
    fn self_commutator_vanishes() {
        let mut h = PauliOperator::<f64>::zero(3);
        for i in 0..3 {
            h.add_term(s(&[(i, Axis::X)]), c(0.7, 0.0));
            h.add_term(s(&[(i, Axis::Z), ((i + 1) % 3, Axis::Z)]), c(-1.0, 0.0));
        }
        assert!(h.commutator(&h).is_empty());
    }

    #[test]
    fn frobenius_examples() {
        let x0 = PauliOperator::<f64>::single(2, 0, Axis::X, 1.0);
        let z0 = PauliOperator::<f64>::single(2, 0, Axis::Z, 1.0);
        assert_eq!(x0.frobenius_inner(&x0), c(1.0, 0.0));
        assert_eq!(x0.frobenius_inner(&z0), c(0.0, 0.0));

        let a = PauliOperator::from_terms(
            2,
            [(s(&[(0, Axis::X)]), c(2.0, 0.0)), (s(&[(1, Axis::Z)]), c(0.0, 3.0))],
        );
        let b = PauliOperator::<f64>::single(2, 0, Axis::X, 2.0);
        let ip = a.frobenius_inner(&b);
        assert!((ip - c(4.0, 0.0)).norm() < 1e-15);
        let da = a.to_dense(2).unwrap();
        let db = b.to_dense(2).unwrap();
        let tr = (da.adjoint() * db).trace() / c(4.0, 0.0);
        assert!((tr - ip).norm() < 1e-14);
    }

    #[test]
    fn dense_images() {
        let x = PauliOperator::<f64>::single(1, 0, Axis::X, 1.0).to_dense(1).unwrap();
        assert_eq!(x[(0, 1)], c(1.0, 0.0));
        assert_eq!(x[(1, 0)], c(1.0, 0.0));
        assert_eq!(x[(0, 0)], c(0.0, 0.0));
        let zz = PauliOperator::from_terms(2, [(s(&[(0, Axis::Z), (1, Axis::Z)]), c(1.0, 0.0))])
            .to_dense(2)
            .unwrap();
        let diag: Vec<f64> = (0..4).map(|i| zz[(i, i)].re).collect();
        assert_eq!(diag, vec![1.0, -1.0, -1.0, 1.0]);
    }

    #[test]
    fn dense_limit_error_names_limit() {
        let op = PauliOperator::<f64>::identity(16);
        let err = op.to_dense(16).unwrap_err();
        assert!(err.to_string().contains("14"));
    }

    #[test]
    fn drop_tolerance_prunes() {
        let x = PauliOperator::<f64>::single(1, 0, Axis::X, 1.0);
        let y = x.axpy(c(-1.0 + 1e-16, 0.0), &x);
        assert!(y.is_empty());
    }

    #[test]
    fn text_roundtrip() {
        let a = PauliOperator::from_terms(
            3,
            [
                (s(&[(0, Axis::X), (2, Axis::Y)]), c(0.5, -0.25)),
                (s(&[(1, Axis::Z)]), c(-1.0, 0.0)),
            ],
        );
        let text = a.to_text();
        assert!(text.contains("0.5 -0.25 0:X 2:Y"));
        let b = PauliOperator::<f64>::from_text(3, &text).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn translation_wraps() {
        let a = s(&[(3, Axis::X), (0, Axis::Z)]);
        let t = a.translate(1, 4);
        assert_eq!(t, s(&[(0, Axis::X), (1, Axis::Z)]));
    }

    #[test]
    fn works_in_single_precision() {
        let z = PauliOperator::<f32>::single(1, 0, Axis::Z, 1.0);
        let x = PauliOperator::<f32>::single(1, 0, Axis::X, 1.0);
        let comm = z.commutator(&x);
        assert_eq!(comm.weight(&s(&[(0, Axis::Y)])), Complex::new(0.0f32, 2.0));
    }
}
