//! Dense real square operators and their spectral data.
//!
//! A [`LinearOperator`] owns its matrix together with cached eigenvalues,
//! symmetric-part eigenvalues and singular values. Every cached quantity is
//! computed once at construction; the operator is immutable afterwards.
//!
//! Normal operators with a prescribed spectrum are produced by
//! [`make_normal_from_spectrum`]: a real block-diagonal core (1×1 blocks for
//! real eigenvalues, `[[a, b], [-b, a]]` blocks for pairs `a ± bi`) conjugated
//! by a seeded random orthogonal matrix.

use nalgebra::{DMatrix, DVector, Schur, SymmetricEigen, QR, SVD};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Largest supported dimension. Everything here is dense.
pub const MAX_DIM: usize = 64;

/// Relative tolerance used when pairing an eigenvalue with its conjugate.
pub const CONJUGATE_TOL: f64 = 1e-12;

const DECOMPOSITION_MAX_ITERS: usize = 10_000;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum LinopError {
    #[error("spectrum is empty")]
    EmptySpectrum,
    #[error("spectrum is not closed under conjugation: {0} has no conjugate partner")]
    NotConjugateClosed(Complex64),
    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },
    #[error("dimension {0} outside supported range 1..={MAX_DIM}")]
    UnsupportedDimension(usize),
    #[error("dimension mismatch: operator is {expected}-dimensional, vector has length {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("matrix or spectrum contains a non-finite value")]
    NonFinite,
    #[error("{0} decomposition did not converge")]
    NoConvergence(&'static str),
}

/// One real block of the canonical real form of a spectrum.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SpectralBlock {
    Real(f64),
    /// The pair `re ± i·im`, with `im > 0`.
    Pair { re: f64, im: f64 },
}

impl SpectralBlock {
    pub fn size(&self) -> usize {
        match self {
            SpectralBlock::Real(_) => 1,
            SpectralBlock::Pair { .. } => 2,
        }
    }
}

/// A conjugation-closed multiset of complex eigenvalues.
///
/// Serialized as a list of `[re, im]` pairs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<[f64; 2]>", into = "Vec<[f64; 2]>")]
pub struct Spectrum {
    eigenvalues: Vec<Complex64>,
    blocks: Vec<SpectralBlock>,
}

fn scale_of(z: Complex64) -> f64 {
    z.norm().max(1.0)
}

fn is_real(z: Complex64) -> bool {
    z.im.abs() <= CONJUGATE_TOL * scale_of(z)
}

impl Spectrum {
    pub fn new(eigenvalues: Vec<Complex64>) -> Result<Self, LinopError> {
        if eigenvalues.is_empty() {
            return Err(LinopError::EmptySpectrum);
        }
        if eigenvalues.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(LinopError::NonFinite);
        }
        if eigenvalues.len() > MAX_DIM {
            return Err(LinopError::UnsupportedDimension(eigenvalues.len()));
        }

        let mut blocks = Vec::with_capacity(eigenvalues.len());
        let mut upper = Vec::new();
        let mut lower = Vec::new();
        for &z in &eigenvalues {
            if is_real(z) {
                blocks.push(SpectralBlock::Real(z.re));
            } else if z.im > 0.0 {
                upper.push(z);
            } else {
                lower.push(z);
            }
        }

        // Greedy nearest-partner matching of the upper half-plane against the
        // conjugates of the lower half-plane.
        let mut used = vec![false; lower.len()];
        for &z in &upper {
            let partner = lower
                .iter()
                .enumerate()
                .filter(|(j, _)| !used[*j])
                .map(|(j, w)| (j, (w.conj() - z).norm()))
                .min_by(|a, b| a.1.total_cmp(&b.1));
            match partner {
                Some((j, dist)) if dist <= CONJUGATE_TOL * scale_of(z) => {
                    used[j] = true;
                    blocks.push(SpectralBlock::Pair { re: z.re, im: z.im });
                }
                _ => return Err(LinopError::NotConjugateClosed(z)),
            }
        }
        if let Some(j) = used.iter().position(|u| !u) {
            return Err(LinopError::NotConjugateClosed(lower[j]));
        }

        Ok(Self { eigenvalues, blocks })
    }

    /// Builds a spectrum from real parts and imaginary parts given pairwise.
    pub fn from_pairs(pairs: &[[f64; 2]]) -> Result<Self, LinopError> {
        Self::new(pairs.iter().map(|p| Complex64::new(p[0], p[1])).collect())
    }

    /// A seeded random spectrum of size `n`: real parts in `[-1, 1]`,
    /// conjugate pairs with imaginary parts in `[0.05, 1.5]`.
    pub fn random(n: usize, seed: u64) -> Result<Self, LinopError> {
        if n == 0 || n > MAX_DIM {
            return Err(LinopError::UnsupportedDimension(n));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut eigenvalues = Vec::with_capacity(n);
        while eigenvalues.len() < n {
            let re = rng.random_range(-1.0..=1.0);
            if n - eigenvalues.len() >= 2 && rng.random_bool(0.5) {
                let im = rng.random_range(0.05..=1.5);
                eigenvalues.push(Complex64::new(re, im));
                eigenvalues.push(Complex64::new(re, -im));
            } else {
                eigenvalues.push(Complex64::new(re, 0.0));
            }
        }
        Self::new(eigenvalues)
    }

    pub fn eigenvalues(&self) -> &[Complex64] {
        &self.eigenvalues
    }

    pub fn blocks(&self) -> &[SpectralBlock] {
        &self.blocks
    }

    pub fn len(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn is_empty(&self) -> bool {
        self.eigenvalues.is_empty()
    }

    /// Smallest real part in the spectrum.
    pub fn min_real_part(&self) -> f64 {
        self.eigenvalues
            .iter()
            .map(|z| z.re)
            .fold(f64::INFINITY, f64::min)
    }
}

impl TryFrom<Vec<[f64; 2]>> for Spectrum {
    type Error = LinopError;

    fn try_from(pairs: Vec<[f64; 2]>) -> Result<Self, Self::Error> {
        Self::from_pairs(&pairs)
    }
}

impl From<Spectrum> for Vec<[f64; 2]> {
    fn from(s: Spectrum) -> Self {
        s.eigenvalues.iter().map(|z| [z.re, z.im]).collect()
    }
}

/// Greedy nearest-match distance between two eigenvalue multisets.
///
/// Returns `None` when the lengths differ, otherwise the largest distance
/// between an element of `a` and its assigned partner in `b`, each
/// measured relative to `max(1, |b_j|)`.
pub fn multiset_distance(a: &[Complex64], b: &[Complex64]) -> Option<f64> {
    if a.len() != b.len() {
        return None;
    }
    let mut used = vec![false; b.len()];
    let mut worst: f64 = 0.0;
    for &z in a {
        let (j, d) = b
            .iter()
            .enumerate()
            .filter(|(j, _)| !used[*j])
            .map(|(j, w)| (j, (z - w).norm() / scale_of(*w)))
            .min_by(|x, y| x.1.total_cmp(&y.1))?;
        used[j] = true;
        worst = worst.max(d);
    }
    Some(worst)
}

/// True when `a` and `b` agree as multisets within `tol`.
pub fn spectra_match(a: &[Complex64], b: &[Complex64], tol: f64) -> bool {
    multiset_distance(a, b).is_some_and(|d| d <= tol)
}

/// Haar-distributed orthogonal matrix from a seeded Gaussian: QR of an
/// `n×n` standard normal matrix with the signs of `diag(R)` folded into `Q`.
pub fn random_orthogonal(n: usize, seed: u64) -> DMatrix<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let g = DMatrix::<f64>::from_fn(n, n, |_, _| rng.sample(StandardNormal));
    let qr = QR::new(g);
    let r = qr.r();
    let mut q = qr.q();
    for j in 0..n {
        if r[(j, j)] < 0.0 {
            q.column_mut(j).neg_mut();
        }
    }
    q
}

/// Block-diagonal real matrix realizing `spectrum`.
pub fn block_diagonal_core(spectrum: &Spectrum) -> DMatrix<f64> {
    let n = spectrum.len();
    let mut core = DMatrix::<f64>::zeros(n, n);
    let mut k = 0;
    for block in spectrum.blocks() {
        match *block {
            SpectralBlock::Real(a) => core[(k, k)] = a,
            SpectralBlock::Pair { re, im } => {
                core[(k, k)] = re;
                core[(k, k + 1)] = im;
                core[(k + 1, k)] = -im;
                core[(k + 1, k + 1)] = re;
            }
        }
        k += block.size();
    }
    core
}

/// Real square matrix with cached spectral data.
#[derive(Debug, Clone)]
pub struct LinearOperator {
    matrix: DMatrix<f64>,
    eigenvalues: Vec<Complex64>,
    /// Ascending.
    sym_eigenvalues: Vec<f64>,
    /// Descending.
    singular_values: Vec<f64>,
    seed: Option<u64>,
}

impl LinearOperator {
    pub fn from_matrix(matrix: DMatrix<f64>) -> Result<Self, LinopError> {
        let (rows, cols) = matrix.shape();
        if rows != cols {
            return Err(LinopError::NotSquare { rows, cols });
        }
        if rows == 0 || rows > MAX_DIM {
            return Err(LinopError::UnsupportedDimension(rows));
        }
        if matrix.iter().any(|v| !v.is_finite()) {
            return Err(LinopError::NonFinite);
        }

        let eps = f64::EPSILON;
        let eigenvalues = Schur::try_new(matrix.clone(), eps, DECOMPOSITION_MAX_ITERS)
            .ok_or(LinopError::NoConvergence("Schur"))?
            .complex_eigenvalues()
            .iter()
            .copied()
            .collect::<Vec<_>>();

        let sym = symmetrize(&matrix);
        let mut sym_eigenvalues = SymmetricEigen::try_new(sym, eps, DECOMPOSITION_MAX_ITERS)
            .ok_or(LinopError::NoConvergence("symmetric eigen"))?
            .eigenvalues
            .iter()
            .copied()
            .collect::<Vec<_>>();
        sym_eigenvalues.sort_by(f64::total_cmp);

        let mut singular_values =
            SVD::try_new(matrix.clone(), false, false, eps, DECOMPOSITION_MAX_ITERS)
                .ok_or(LinopError::NoConvergence("singular value"))?
                .singular_values
                .iter()
                .copied()
                .collect::<Vec<_>>();
        singular_values.sort_by(|a, b| b.total_cmp(a));

        if eigenvalues.iter().any(|z| !z.re.is_finite() || !z.im.is_finite())
            || sym_eigenvalues.iter().chain(&singular_values).any(|v| !v.is_finite())
        {
            return Err(LinopError::NonFinite);
        }

        Ok(Self {
            matrix,
            eigenvalues,
            sym_eigenvalues,
            singular_values,
            seed: None,
        })
    }

    /// Row-major construction.
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self, LinopError> {
        let n = rows.len();
        if let Some(bad) = rows.iter().find(|r| r.len() != n) {
            return Err(LinopError::NotSquare { rows: n, cols: bad.len() });
        }
        Self::from_matrix(DMatrix::from_fn(n, n, |i, j| rows[i][j]))
    }

    /// `c·I` of dimension `n`.
    pub fn scalar(n: usize, c: f64) -> Result<Self, LinopError> {
        Self::from_matrix(DMatrix::from_diagonal_element(n, n, c))
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    /// Seed of the orthogonal similarity, when built from a spectrum.
    pub fn seed(&self) -> Option<u64> {
        self.seed
    }

    pub fn apply(&self, x: &DVector<f64>) -> Result<DVector<f64>, LinopError> {
        if x.len() != self.dim() {
            return Err(LinopError::DimensionMismatch {
                expected: self.dim(),
                found: x.len(),
            });
        }
        Ok(&self.matrix * x)
    }

    /// `(A + Aᵀ) / 2`.
    pub fn symmetric_part(&self) -> DMatrix<f64> {
        symmetrize(&self.matrix)
    }

    pub fn eigenvalues(&self) -> &[Complex64] {
        &self.eigenvalues
    }

    /// Eigenvalues of the symmetric part, ascending.
    pub fn sym_eigenvalues(&self) -> &[f64] {
        &self.sym_eigenvalues
    }

    pub fn min_sym_eigenvalue(&self) -> f64 {
        self.sym_eigenvalues[0]
    }

    /// Largest singular value, i.e. the Euclidean operator norm.
    pub fn operator_norm(&self) -> f64 {
        self.singular_values[0]
    }

    pub fn min_singular_value(&self) -> f64 {
        *self.singular_values.last().expect("n >= 1")
    }

    pub fn singular_values(&self) -> &[f64] {
        &self.singular_values
    }

    pub fn min_real_eigenvalue(&self) -> f64 {
        self.eigenvalues
            .iter()
            .map(|z| z.re)
            .fold(f64::INFINITY, f64::min)
    }

    /// `max |AAᵀ − AᵀA|` entrywise.
    pub fn normality_residual(&self) -> f64 {
        let a = &self.matrix;
        let at = a.transpose();
        (a * &at - &at * a).amax()
    }

    /// Normality test scaled by `max(1, ‖A‖²)`.
    pub fn is_normal(&self, tol: f64) -> bool {
        self.normality_residual() <= tol * self.operator_norm().powi(2).max(1.0)
    }

    pub fn inverse(&self) -> Option<DMatrix<f64>> {
        self.matrix.clone().try_inverse()
    }
}

fn symmetrize(m: &DMatrix<f64>) -> DMatrix<f64> {
    let n = m.nrows();
    DMatrix::from_fn(n, n, |i, j| 0.5 * (m[(i, j)] + m[(j, i)]))
}

/// Real normal operator with eigenvalues `spectrum`, conjugated by the
/// orthogonal matrix drawn from `seed`.
///
/// A scalar spectrum `{c, …, c}` yields `c·I` exactly: the similarity is the
/// identity map on multiples of `I`.
pub fn make_normal_from_spectrum(
    spectrum: &Spectrum,
    seed: u64,
) -> Result<LinearOperator, LinopError> {
    let n = spectrum.len();
    let core = block_diagonal_core(spectrum);
    let c = core[(0, 0)];
    let scalar = core == DMatrix::from_diagonal_element(n, n, c);
    let matrix = if scalar {
        core
    } else {
        let q = random_orthogonal(n, seed);
        &q * core * q.transpose()
    };
    let mut op = LinearOperator::from_matrix(matrix)?;
    op.seed = Some(seed);
    Ok(op)
}
