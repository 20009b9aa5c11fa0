//! Direct solve of `A*XB + B*XA = −Q` by Kronecker vectorization.
//!
//! `vec` stacks columns, and for any `P`, `R`: `vec(P X R) = (Rᵀ ⊗ P) vec(X)`,
//! where `ᵀ` is the plain transpose (no conjugation). The equation becomes
//!
//! ```text
//! (Bᵀ ⊗ A* + Aᵀ ⊗ B*) vec(X) = −vec(Q)
//! ```
//!
//! which is solved by dense LU with partial pivoting. This is O(N⁶) work and
//! only meant as a reference for small instances.

use nalgebra::{DVector, LU};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::{
    AsMatrix, CMatrix, HermitianMatrix, ensure_same_dim, is_positive_definite, spectral_norm, sqrt_pd,
    weighted_trace_norm,
};
use crate::reformulation::{ProblemInstance, equation_residual};

/// Largest N accepted by [`solve_direct`].
pub const MAX_ORACLE_DIM: usize = 100;

/// Reciprocal condition estimates below this are reported as singular.
pub const RCOND_FLOOR: f64 = 1e-14;

#[derive(Debug, Clone)]
pub struct OracleResult {
    pub x: HermitianMatrix,
    /// `equation_residual` of the projected solution.
    pub residual: f64,
    /// `‖X_raw − X_raw*‖` before projection.
    pub hermiticity_defect: f64,
    pub definite: bool,
    /// Estimated reciprocal 1-norm condition number of the Kronecker operator.
    pub rcond: f64,
}

/// `Bᵀ ⊗ A* + Aᵀ ⊗ B*`.
pub fn kronecker_operator(a: &CMatrix, b: &CMatrix) -> CMatrix {
    b.transpose().kronecker(&a.adjoint()) + a.transpose().kronecker(&b.adjoint())
}

fn norm1(m: &CMatrix) -> f64 {
    m.column_iter().map(|c| c.iter().map(|z| z.norm()).sum::<f64>()).fold(0.0, f64::max)
}

/// Hager's estimate of `‖K⁻¹‖₁`, given factorizations of `K` and `K*`.
fn inverse_norm1_estimate(
    lu: &LU<Complex64, nalgebra::Dyn, nalgebra::Dyn>,
    lu_adj: &LU<Complex64, nalgebra::Dyn, nalgebra::Dyn>,
    dim: usize,
) -> Option<f64> {
    let mut x = DVector::from_element(dim, Complex64::new(1.0 / dim as f64, 0.0));
    let mut estimate = 0.0;
    let mut last_j = usize::MAX;
    for _ in 0..5 {
        let y = lu.solve(&x)?;
        estimate = y.iter().map(|z| z.norm()).sum::<f64>();
        let xi = y.map(|z| if z.norm() > 0.0 { z / z.norm() } else { Complex64::new(1.0, 0.0) });
        let z = lu_adj.solve(&xi)?;
        let (j, zmax) = z
            .iter()
            .enumerate()
            .map(|(i, v)| (i, v.norm()))
            .fold((0, -1.0), |acc, cur| if cur.1 > acc.1 { cur } else { acc });
        let ztx = z.dotc(&x).re;
        if zmax <= ztx || j == last_j {
            break;
        }
        last_j = j;
        x.fill(Complex64::new(0.0, 0.0));
        x[j] = Complex64::new(1.0, 0.0);
    }
    Some(estimate)
}

pub fn solve_direct(p: &ProblemInstance) -> Result<OracleResult> {
    let n = p.dim();
    if n > MAX_ORACLE_DIM {
        return Err(Error::OracleTooLarge { n, limit: MAX_ORACLE_DIM });
    }
    let k = kronecker_operator(p.a().as_matrix(), p.b().as_matrix());
    let k_norm = norm1(&k);
    let singular = |rcond| Error::SingularOperator { rcond };
    if k_norm == 0.0 {
        return Err(singular(0.0));
    }
    let lu = k.clone().lu();
    let lu_adj = k.adjoint().lu();
    let inv_norm = inverse_norm1_estimate(&lu, &lu_adj, n * n).ok_or(singular(0.0))?;
    let rcond = 1.0 / (k_norm * inv_norm);
    if rcond.is_nan() || rcond < RCOND_FLOOR {
        return Err(singular(rcond));
    }

    let rhs = DVector::from_iterator(n * n, p.q().as_matrix().iter().map(|z| -z));
    let v = lu.solve(&rhs).ok_or(singular(0.0))?;
    let raw = CMatrix::from_column_slice(n, n, v.as_slice());
    let hermiticity_defect = spectral_norm(&(&raw - raw.adjoint()));
    let x = HermitianMatrix::symmetrized(&raw);
    Ok(OracleResult {
        residual: equation_residual(&x, p)?,
        definite: is_positive_definite(&x, 0.0)?,
        hermiticity_defect,
        rcond,
        x,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ErrorNorm {
    Spectral,
    /// `‖·‖_{1,Q̃}`
    WeightedTrace,
}

/// Distance from `x_approx` to a known reference solution.
pub fn error_against(
    x_approx: &HermitianMatrix,
    reference: &HermitianMatrix,
    norm: ErrorNorm,
    qtilde: &HermitianMatrix,
) -> Result<f64> {
    ensure_same_dim(reference.dim(), x_approx)?;
    let diff = x_approx.as_matrix() - reference.as_matrix();
    match norm {
        ErrorNorm::Spectral => Ok(spectral_norm(&diff)),
        ErrorNorm::WeightedTrace => weighted_trace_norm(&diff, &sqrt_pd(qtilde)?),
    }
}

/// Distance from `x_approx` to the direct solution of `p`.
pub fn true_error(
    x_approx: &HermitianMatrix,
    p: &ProblemInstance,
    norm: ErrorNorm,
    qtilde: &HermitianMatrix,
) -> Result<f64> {
    let oracle = solve_direct(p)?;
    error_against(x_approx, &oracle.x, norm, qtilde)
}
