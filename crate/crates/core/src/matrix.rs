//! Dense complex matrices, Hermitian matrices, and the spectral primitives the
//! rest of the crate is written in terms of: eigenvalue margins for the
//! Loewner order, spectral and trace norms, and positive definite square roots.
//!
//! Everything is backed by `nalgebra::DMatrix<Complex64>`. Real inputs are
//! embedded with zero imaginary parts.

use nalgebra::{DMatrix, SVD, SymmetricEigen};
use num_complex::Complex64;

use crate::error::{Error, Result};

/// Default relative tolerance for accepting a matrix as Hermitian.
pub const DEFAULT_ASYM_TOL: f64 = 1e-10;

const EIGEN_MAX_ITER: usize = 100_000;

/// Raw dense storage used throughout the crate.
pub type CMatrix = DMatrix<Complex64>;

/// Anything that can lend out a square complex matrix.
pub trait AsMatrix {
    fn as_matrix(&self) -> &CMatrix;

    fn dim(&self) -> usize {
        self.as_matrix().nrows()
    }
}

impl AsMatrix for CMatrix {
    fn as_matrix(&self) -> &CMatrix {
        self
    }
}

fn check_square_finite(m: &CMatrix) -> Result<()> {
    if m.nrows() != m.ncols() || m.nrows() == 0 {
        return Err(Error::NotSquare { rows: m.nrows(), cols: m.ncols() });
    }
    for j in 0..m.ncols() {
        for i in 0..m.nrows() {
            let z = m[(i, j)];
            if !(z.re.is_finite() && z.im.is_finite()) {
                return Err(Error::NonFinite { row: i, col: j });
            }
        }
    }
    Ok(())
}

pub(crate) fn ensure_same_dim(expected: usize, m: &impl AsMatrix) -> Result<()> {
    let m = m.as_matrix();
    if m.nrows() != expected || m.ncols() != expected {
        return Err(Error::DimensionMismatch { expected, found: format!("{}x{}", m.nrows(), m.ncols()) });
    }
    Ok(())
}

/// Square N×N complex matrix with finite entries.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexMatrix(CMatrix);

impl ComplexMatrix {
    pub fn new(m: CMatrix) -> Result<Self> {
        check_square_finite(&m)?;
        Ok(Self(m))
    }

    /// Builds a matrix from real row-major data.
    pub fn from_real_rows(rows: &[&[f64]]) -> Result<Self> {
        let n = rows.len();
        if rows.iter().any(|r| r.len() != n) {
            return Err(Error::NotSquare { rows: n, cols: rows.first().map_or(0, |r| r.len()) });
        }
        Self::new(CMatrix::from_fn(n, n, |i, j| Complex64::new(rows[i][j], 0.0)))
    }

    pub fn identity(n: usize) -> Self {
        Self(CMatrix::identity(n, n))
    }

    pub fn zeros(n: usize) -> Self {
        Self(CMatrix::zeros(n, n))
    }

    pub fn into_inner(self) -> CMatrix {
        self.0
    }

    pub fn adjoint(&self) -> CMatrix {
        self.0.adjoint()
    }

    /// True if `‖m − m*‖ ≤ tol · max(1, ‖m‖)`.
    pub fn is_hermitian(&self, tol: f64) -> bool {
        asymmetry(&self.0) <= tol * spectral_norm(&self.0).max(1.0)
    }
}

impl AsMatrix for ComplexMatrix {
    fn as_matrix(&self) -> &CMatrix {
        &self.0
    }
}

/// Complex matrix equal to its own conjugate transpose, bit for bit.
#[derive(Debug, Clone, PartialEq)]
pub struct HermitianMatrix(CMatrix);

impl HermitianMatrix {
    /// Symmetrizes `m` without any tolerance check. Used for quantities that
    /// are Hermitian in exact arithmetic and only drift by round-off.
    pub(crate) fn symmetrized(m: &CMatrix) -> Self {
        let n = m.nrows();
        let mut h = CMatrix::zeros(n, n);
        for j in 0..n {
            h[(j, j)] = Complex64::new(m[(j, j)].re, 0.0);
            for i in 0..j {
                let z = (m[(i, j)] + m[(j, i)].conj()) * 0.5;
                h[(i, j)] = z;
                h[(j, i)] = z.conj();
            }
        }
        Self(h)
    }

    /// Builds a Hermitian matrix from real symmetric row-major data.
    pub fn from_real_rows(rows: &[&[f64]]) -> Result<Self> {
        hermitian_project(&ComplexMatrix::from_real_rows(rows)?, DEFAULT_ASYM_TOL)
    }

    pub fn from_diagonal(diag: &[f64]) -> Self {
        let n = diag.len();
        Self(CMatrix::from_fn(
            n,
            n,
            |i, j| {
                if i == j { Complex64::new(diag[i], 0.0) } else { Complex64::new(0.0, 0.0) }
            },
        ))
    }

    pub fn identity(n: usize) -> Self {
        Self(CMatrix::identity(n, n))
    }

    pub fn zeros(n: usize) -> Self {
        Self(CMatrix::zeros(n, n))
    }

    pub fn scale(&self, s: f64) -> Self {
        Self(self.0.map(|z| z * s))
    }

    pub fn add(&self, other: &Self) -> Self {
        Self::symmetrized(&(&self.0 + &other.0))
    }

    pub fn sub(&self, other: &Self) -> Self {
        Self::symmetrized(&(&self.0 - &other.0))
    }

    pub fn to_complex(&self) -> ComplexMatrix {
        ComplexMatrix(self.0.clone())
    }

    pub fn into_inner(self) -> CMatrix {
        self.0
    }

    /// Eigenvalues in ascending order.
    pub fn eigenvalues(&self) -> Result<Vec<f64>> {
        let eig = SymmetricEigen::try_new(self.0.clone(), f64::EPSILON, EIGEN_MAX_ITER)
            .ok_or(Error::NoConvergence("Hermitian eigendecomposition"))?;
        let mut vals: Vec<f64> = eig.eigenvalues.iter().copied().collect();
        vals.sort_by(f64::total_cmp);
        Ok(vals)
    }
}

impl AsMatrix for HermitianMatrix {
    fn as_matrix(&self) -> &CMatrix {
        &self.0
    }
}

fn asymmetry(m: &CMatrix) -> f64 {
    spectral_norm(&(m - m.adjoint()))
}

/// Projects `m` onto the Hermitian matrices, `(m + m*)/2`, after checking
/// that `‖m − m*‖ ≤ asym_tol · max(1, ‖m‖)`.
pub fn hermitian_project(m: &ComplexMatrix, asym_tol: f64) -> Result<HermitianMatrix> {
    let asym = asymmetry(&m.0);
    let allowed = asym_tol * spectral_norm(&m.0).max(1.0);
    if asym > allowed {
        return Err(Error::NotHermitian { asymmetry: asym, allowed });
    }
    Ok(HermitianMatrix::symmetrized(&m.0))
}

pub fn min_eigenvalue(h: &HermitianMatrix) -> Result<f64> {
    Ok(h.eigenvalues()?[0])
}

pub fn max_eigenvalue(h: &HermitianMatrix) -> Result<f64> {
    Ok(*h.eigenvalues()?.last().expect("non-empty matrix"))
}

/// `min_eigenvalue(h) > margin`.
pub fn is_positive_definite(h: &HermitianMatrix, margin: f64) -> Result<bool> {
    Ok(min_eigenvalue(h)? > margin)
}

/// Smallest eigenvalue of `rhs − lhs`. Positive means `lhs < rhs` in the
/// Loewner order; zero or above means `lhs ≤ rhs`.
pub fn loewner_margin(lhs: &HermitianMatrix, rhs: &HermitianMatrix) -> Result<f64> {
    ensure_same_dim(lhs.dim(), rhs)?;
    min_eigenvalue(&rhs.sub(lhs))
}

fn singular_values(m: &CMatrix) -> Vec<f64> {
    // Bidiagonal QR on a finite dense matrix; the iteration cap of zero means
    // "until converged", which nalgebra guarantees terminates for finite input.
    let svd = SVD::try_new(m.clone(), false, false, f64::EPSILON, 0).expect("SVD of a finite matrix converges");
    svd.singular_values.iter().copied().collect()
}

/// Largest singular value.
pub fn spectral_norm(m: &impl AsMatrix) -> f64 {
    singular_values(m.as_matrix()).into_iter().fold(0.0, f64::max)
}

/// Sum of singular values.
pub fn trace_norm(m: &impl AsMatrix) -> f64 {
    singular_values(m.as_matrix()).into_iter().sum()
}

pub fn frobenius_norm(m: &impl AsMatrix) -> f64 {
    m.as_matrix().iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// `‖Q̃^{1/2} m Q̃^{1/2}‖₁`, given the precomputed root `qtilde_half`.
pub fn weighted_trace_norm(m: &impl AsMatrix, qtilde_half: &HermitianMatrix) -> Result<f64> {
    ensure_same_dim(qtilde_half.dim(), m)?;
    let s = qtilde_half.as_matrix();
    Ok(trace_norm(&(s * m.as_matrix() * s)))
}

fn pd_power(h: &HermitianMatrix, power: f64) -> Result<HermitianMatrix> {
    let eig = SymmetricEigen::try_new(h.0.clone(), f64::EPSILON, EIGEN_MAX_ITER)
        .ok_or(Error::NoConvergence("Hermitian eigendecomposition"))?;
    let min = eig.eigenvalues.iter().copied().fold(f64::INFINITY, f64::min);
    if min <= 0.0 {
        return Err(Error::NotPositiveDefinite { min_eigenvalue: min });
    }
    let vecs = &eig.eigenvectors;
    let scaled = CMatrix::from_fn(h.dim(), h.dim(), |i, j| vecs[(i, j)] * eig.eigenvalues[j].powf(power));
    Ok(HermitianMatrix::symmetrized(&(scaled * vecs.adjoint())))
}

/// Positive definite square root `h^{1/2}`.
pub fn sqrt_pd(h: &HermitianMatrix) -> Result<HermitianMatrix> {
    pd_power(h, 0.5)
}

/// Positive definite inverse square root `h^{-1/2}`.
pub fn inv_sqrt_pd(h: &HermitianMatrix) -> Result<HermitianMatrix> {
    pd_power(h, -0.5)
}

/// `c* x c`.
pub(crate) fn congruence(c: &CMatrix, c_adj: &CMatrix, x: &CMatrix) -> CMatrix {
    c_adj * x * c
}
