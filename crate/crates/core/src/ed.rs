//! Dense matrices of Pauli operators in symmetry-reduced computational bases.
//!
//! A sector keeps only the fully symmetric representation of its group:
//! translation by a fixed step with momentum zero, optionally combined with
//! the global spin flip `prod_i X_i` in its even sector, optionally restricted
//! to a fixed number of down spins. Basis vectors are uniform superpositions
//! over group orbits, so every operator commuting with the group has a block
//! here. All annealing families are stoquastic and the ground state of each
//! lies in the fully symmetric sector, which is why trivial characters
//! suffice. The XXZ anneal is ferromagnetic: its full-space ground state is
//! the polarized product state at every `lambda`, so it is annealed in the
//! zero-magnetization sector, whose lowest state is the one tracked.

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::models::ModelSpec;
use crate::pauli::{i_pow, rotate, FxMap, PauliOperator, DEFAULT_DENSE_LIMIT};
use crate::C64;

/// Largest sector dimension accepted by the dense backend.
pub fn max_dense_dim(limit_sites: usize) -> usize {
    1usize << limit_sites.min(30)
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Sector {
    /// Fixed number of down spins.
    pub down_spins: Option<usize>,
    /// Translation step with momentum zero.
    pub translation: Option<usize>,
    /// Restrict to the even sector of the global spin flip.
    pub spin_flip_even: bool,
}

impl Sector {
    pub fn full() -> Self {
        Sector::default()
    }

    /// The smallest sector containing the ground state of every `H(lambda)`.
    pub fn ground_state(spec: &ModelSpec) -> Self {
        let n = spec.n_sites;
        Sector {
            down_spins: (spec.conserves_magnetization() && n % 2 == 0).then_some(n / 2),
            translation: spec.translation_step(),
            spin_flip_even: spec.spin_flip_symmetric(),
        }
    }

    pub fn is_full(&self) -> bool {
        *self == Sector::full()
    }
}

/// Orbit representatives of a [`Sector`].
#[derive(Clone, Debug)]
pub struct SectorBasis {
    n_sites: usize,
    sector: Sector,
    reps: Vec<u64>,
    orbit: Vec<u32>,
    index: FxMap<u64, u32>,
}

fn next_same_popcount(v: u64) -> u64 {
    // Gosper's hack.
    let c = v & v.wrapping_neg();
    let r = v + c;
    (((r ^ v) >> 2) / c) | r
}

impl SectorBasis {
    pub fn new(n_sites: usize, sector: Sector, dense_limit: usize) -> Result<Self> {
        if n_sites == 0 || n_sites > 40 {
            return Err(Error::invalid(format!("dense backend supports 1..=40 sites, got {n_sites}")));
        }
        if let Some(step) = sector.translation {
            if step == 0 || n_sites % step != 0 {
                return Err(Error::invalid(format!("translation step {step} incompatible with {n_sites} sites")));
            }
        }
        if let Some(d) = sector.down_spins {
            if d > n_sites {
                return Err(Error::invalid(format!("{d} down spins on {n_sites} sites")));
            }
        }
        if sector.is_full() && n_sites > dense_limit {
            return Err(Error::DenseLimit { dim: 1 << n_sites, limit: dense_limit });
        }
        // Enumerating candidates is linear in the unreduced space; keep it bounded.
        let unreduced_limit = dense_limit + 10;
        if n_sites > unreduced_limit {
            return Err(Error::DenseLimit { dim: 1 << n_sites.min(62), limit: unreduced_limit });
        }
        let mut basis = SectorBasis { n_sites, sector, reps: Vec::new(), orbit: Vec::new(), index: FxMap::default() };
        let visit = |b: u64, basis: &mut SectorBasis| {
            let (rep, orbit) = basis.representative(b);
            if rep == b {
                basis.index.insert(b, basis.reps.len() as u32);
                basis.reps.push(b);
                basis.orbit.push(orbit);
            }
        };
        let full = 1u64 << n_sites;
        match sector.down_spins {
            Some(0) => visit(0, &mut basis),
            Some(d) => {
                let mut v = (1u64 << d) - 1;
                while v < full {
                    visit(v, &mut basis);
                    v = next_same_popcount(v);
                }
            }
            None => {
                for b in 0..full {
                    visit(b, &mut basis);
                }
            }
        }
        if basis.reps.len() > max_dense_dim(dense_limit) {
            return Err(Error::DenseLimit { dim: basis.reps.len(), limit: dense_limit });
        }
        Ok(basis)
    }

    pub fn full(n_sites: usize) -> Result<Self> {
        Self::new(n_sites, Sector::full(), DEFAULT_DENSE_LIMIT)
    }

    pub fn n_sites(&self) -> usize {
        self.n_sites
    }

    pub fn sector(&self) -> Sector {
        self.sector
    }

    pub fn dim(&self) -> usize {
        self.reps.len()
    }

    pub fn states(&self) -> &[u64] {
        &self.reps
    }

    /// Smallest element of the orbit of `b` and the orbit size.
    fn representative(&self, b: u64) -> (u64, u32) {
        let n = self.n_sites;
        let mask = if n == 64 { u64::MAX } else { (1u64 << n) - 1 };
        let step = self.sector.translation.unwrap_or(n);
        let shifts = n / step;
        let mut best = b;
        let mut stab = 0u32;
        let mut total = 0u32;
        for j in 0..shifts {
            let t = rotate(b, j * step, n);
            let images: &[u64] = if self.sector.spin_flip_even { &[t, t ^ mask] } else { &[t] };
            for &img in images {
                total += 1;
                if img == b {
                    stab += 1;
                }
                best = best.min(img);
            }
        }
        (best, total / stab)
    }

    /// Block of `op` in this sector. The operator must commute with the
    /// sector's symmetries: individual strings may leave the sector (`XX`
    /// alone changes the magnetization) but their sum must not.
    pub fn matrix(&self, op: &PauliOperator<f64>) -> Result<DMatrix<C64>> {
        let d = self.dim();
        let mut m = DMatrix::<C64>::zeros(d, d);
        let terms = op.sorted_terms();
        let mut leaked: FxMap<u64, C64> = FxMap::default();
        for (j, &r) in self.reps.iter().enumerate() {
            let oj = self.orbit[j] as f64;
            leaked.clear();
            for (s, w) in &terms {
                let (b, e) = s.apply_to_basis(r);
                let (rep, orbit) = self.representative(b);
                let amp = *w * i_pow::<f64>(e);
                match self.index.get(&rep) {
                    Some(&i) if self.in_sector(rep) => {
                        let oi = self.orbit[i as usize] as f64;
                        m[(i as usize, j)] += amp * (oj / oi).sqrt();
                    }
                    _ => *leaked.entry(rep).or_default() += amp * (oj / orbit as f64).sqrt(),
                }
            }
            if let Some((b, a)) = leaked.iter().find(|(_, a)| a.norm() > 1e-12) {
                return Err(Error::invalid(format!(
                    "operator leaves the symmetry sector (amplitude {:.3e} on state {b:#b})",
                    a.norm()
                )));
            }
        }
        Ok(m)
    }

    fn in_sector(&self, b: u64) -> bool {
        self.sector.down_spins.is_none_or(|d| b.count_ones() as usize == d)
    }
}

/// Eigen-decomposition of a Hermitian matrix, eigenvalues ascending.
///
/// Each eigenvector is rotated so its largest-magnitude component is real
/// and positive. Real input takes the real symmetric path.
pub fn hermitian_eigen(m: &DMatrix<C64>) -> (Vec<f64>, DMatrix<C64>) {
    let n = m.nrows();
    let real = m.iter().all(|z| z.im == 0.0);
    let (vals, vecs): (Vec<f64>, DMatrix<C64>) = if real {
        let r = m.map(|z| z.re);
        let e = SymmetricEigen::new(r);
        (e.eigenvalues.iter().copied().collect(), e.eigenvectors.map(|x| Complex::new(x, 0.0)))
    } else {
        let e = SymmetricEigen::new(m.clone());
        (e.eigenvalues.iter().copied().collect(), e.eigenvectors)
    };
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| vals[a].total_cmp(&vals[b]));
    let energies = order.iter().map(|&i| vals[i]).collect();
    let mut out = DMatrix::<C64>::zeros(n, n);
    for (k, &i) in order.iter().enumerate() {
        let col = vecs.column(i);
        let mut big = 0;
        for r in 0..n {
            if col[r].norm_sqr() > col[big].norm_sqr() {
                big = r;
            }
        }
        let phase = if col[big].norm() > 0.0 { col[big].conj() / col[big].norm() } else { C64::new(1.0, 0.0) };
        for r in 0..n {
            out[(r, k)] = col[r] * phase;
        }
    }
    (energies, out)
}

/// Largest elementwise modulus of `a - b`.
pub fn max_abs_diff(a: &DMatrix<C64>, b: &DMatrix<C64>) -> f64 {
    a.iter().zip(b.iter()).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

/// `H0` and `H1` of a model as dense sector blocks.
#[derive(Clone, Debug)]
pub struct DenseModel {
    pub spec: ModelSpec,
    pub basis: SectorBasis,
    pub h0: DMatrix<C64>,
    pub h1: DMatrix<C64>,
}

impl DenseModel {
    pub fn new(spec: &ModelSpec, sector: Sector, dense_limit: usize) -> Result<Self> {
        let basis = SectorBasis::new(spec.n_sites, sector, dense_limit)?;
        let (a, b) = spec.endpoints::<f64>()?;
        Ok(DenseModel { spec: spec.clone(), h0: basis.matrix(&a)?, h1: basis.matrix(&b)?, basis })
    }

    /// The full Hilbert space.
    pub fn full(spec: &ModelSpec) -> Result<Self> {
        Self::new(spec, Sector::full(), DEFAULT_DENSE_LIMIT)
    }

    /// The sector holding the ground state.
    pub fn ground_sector(spec: &ModelSpec) -> Result<Self> {
        Self::new(spec, Sector::ground_state(spec), DEFAULT_DENSE_LIMIT)
    }

    pub fn dim(&self) -> usize {
        self.basis.dim()
    }

    pub fn hamiltonian(&self, lambda: f64) -> DMatrix<C64> {
        self.h0.scale(1.0 - lambda) + self.h1.scale(lambda)
    }

    pub fn dlambda_h(&self) -> DMatrix<C64> {
        &self.h1 - &self.h0
    }

    pub fn operator(&self, op: &PauliOperator<f64>) -> Result<DMatrix<C64>> {
        self.basis.matrix(op)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::{hamiltonian, ModelSpec};

    #[test]
    fn sector_dimensions() {
        let n = 8;
        assert_eq!(SectorBasis::full(n).unwrap().dim(), 256);
        let mz = Sector { down_spins: Some(4), ..Sector::full() };
        assert_eq!(SectorBasis::new(n, mz, 14).unwrap().dim(), 70);
        // Necklaces of 8 beads, two colors: 36; bracelets under flip too: 20.
        let k0 = Sector { translation: Some(1), ..Sector::full() };
        assert_eq!(SectorBasis::new(n, k0, 14).unwrap().dim(), 36);
        let k0f = Sector { translation: Some(1), spin_flip_even: true, ..Sector::full() };
        assert_eq!(SectorBasis::new(n, k0f, 14).unwrap().dim(), 20);
    }

    #[test]
    fn sector_ground_energy_matches_full_space() {
        for spec in [ModelSpec::tfi_clean(8), ModelSpec::nnn_tfi(8), ModelSpec::xxz_anneal(8)] {
            for &l in &[0.0, 0.3, 0.7] {
                // The ferromagnetic XXZ anneal lives in the zero-magnetization block.
                let reference = Sector { down_spins: Sector::ground_state(&spec).down_spins, ..Sector::full() };
                let block = SectorBasis::new(8, reference, 14).unwrap();
                let h = hamiltonian::<f64>(&spec, l).unwrap();
                let (ef, _) = hermitian_eigen(&block.matrix(&h).unwrap());
                let model = DenseModel::ground_sector(&spec).unwrap();
                let (es, _) = hermitian_eigen(&model.hamiltonian(l));
                assert!((ef[0] - es[0]).abs() < 1e-10, "{:?} λ={l}: {} vs {}", spec.name, ef[0], es[0]);
                assert!(model.dim() < 256);
            }
        }
    }

    #[test]
    fn sector_block_is_hermitian() {
        let spec = ModelSpec::xxz_anneal(10);
        let m = DenseModel::ground_sector(&spec).unwrap();
        let h = m.hamiltonian(0.4);
        assert!(max_abs_diff(&h, &h.adjoint()) < 1e-14);
    }

    #[test]
    fn phase_convention() {
        let m = DMatrix::from_row_slice(2, 2, &[C64::new(0.0, 0.0), C64::new(0.0, -1.0), C64::new(0.0, 1.0), C64::new(0.0, 0.0)]);
        let (e, v) = hermitian_eigen(&m);
        assert!((e[0] + 1.0).abs() < 1e-14 && (e[1] - 1.0).abs() < 1e-14);
        for k in 0..2 {
            let col = v.column(k);
            let big = if col[0].norm() >= col[1].norm() { col[0] } else { col[1] };
            assert!(big.im.abs() < 1e-14 && big.re > 0.0);
        }
    }

    #[test]
    fn dense_limit_is_reported() {
        let err = SectorBasis::new(16, Sector::full(), 14).unwrap_err();
        assert!(err.to_string().contains("14"));
    }
}
