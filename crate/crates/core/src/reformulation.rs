//! Fixed-point form of `A*XB + B*XA = −Q`.
//!
//! With `U = (A − B + I)/√2`, `V = (A + B + I)/√2` and `W = B − I` the
//! identity
//!
//! ```text
//! V*XV + W*XW − U*XU − B*XB = X + A*XB + B*XA
//! ```
//!
//! holds for every `X` and arbitrary `A`, `B`, so `X` solves the equation iff
//! `X = F(X, X)` with `F(X, Y) = Q + V*XV + W*XW − U*YU − B*YB`.

use std::f64::consts::SQRT_2;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::matrix::{
    AsMatrix, CMatrix, ComplexMatrix, HermitianMatrix, congruence, ensure_same_dim, is_positive_definite,
    min_eigenvalue, spectral_norm,
};

/// The matrices `U`, `V`, `W` derived from `(A, B)`, plus `B` itself and the
/// adjoints needed by the congruences in `F`.
#[derive(Debug, Clone)]
pub struct TransformSet {
    u: CMatrix,
    v: CMatrix,
    w: CMatrix,
    b: CMatrix,
    u_adj: CMatrix,
    v_adj: CMatrix,
    w_adj: CMatrix,
    b_adj: CMatrix,
}

impl TransformSet {
    /// Assembles a set from arbitrary factors, bypassing the `(A, B)`
    /// formulas. Useful for evaluating `F` or δ on hypothetical inputs.
    pub fn from_parts(u: CMatrix, v: CMatrix, w: CMatrix, b: CMatrix) -> Result<Self> {
        let n = u.nrows();
        for m in [&u, &v, &w, &b] {
            ensure_same_dim(n, m)?;
        }
        Ok(Self { u_adj: u.adjoint(), v_adj: v.adjoint(), w_adj: w.adjoint(), b_adj: b.adjoint(), u, v, w, b })
    }

    pub fn dim(&self) -> usize {
        self.u.nrows()
    }

    pub fn u(&self) -> &CMatrix {
        &self.u
    }

    pub fn v(&self) -> &CMatrix {
        &self.v
    }

    pub fn w(&self) -> &CMatrix {
        &self.w
    }

    pub fn b(&self) -> &CMatrix {
        &self.b
    }

    /// `U*XU + B*XB`.
    pub fn lower_part(&self, x: &CMatrix) -> CMatrix {
        congruence(&self.u, &self.u_adj, x) + congruence(&self.b, &self.b_adj, x)
    }

    /// `V*XV + W*XW`.
    pub fn upper_part(&self, x: &CMatrix) -> CMatrix {
        congruence(&self.v, &self.v_adj, x) + congruence(&self.w, &self.w_adj, x)
    }

    /// `UXU* + BXB*` (adjoint-side congruence, as used by condition (a)).
    pub fn lower_part_adjoint(&self, x: &CMatrix) -> CMatrix {
        congruence(&self.u_adj, &self.u, x) + congruence(&self.b_adj, &self.b, x)
    }

    /// `VXV* + WXW*`.
    pub fn upper_part_adjoint(&self, x: &CMatrix) -> CMatrix {
        congruence(&self.v_adj, &self.v, x) + congruence(&self.w_adj, &self.w, x)
    }
}

pub fn compute_transforms(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<TransformSet> {
    let n = a.dim();
    ensure_same_dim(n, b)?;
    let (a, b) = (a.as_matrix(), b.as_matrix());
    let id = CMatrix::identity(n, n);
    let r = Complex64::new(SQRT_2.recip(), 0.0);
    let u = (a - b + &id) * r;
    let v = (a + b + &id) * r;
    let w = b - &id;
    Ok(TransformSet {
        u_adj: u.adjoint(),
        v_adj: v.adjoint(),
        w_adj: w.adjoint(),
        b_adj: b.adjoint(),
        u,
        v,
        w,
        b: b.clone(),
    })
}

/// The triple `(A, B, Q)` with `Q` Hermitian positive definite.
#[derive(Debug, Clone)]
pub struct ProblemInstance {
    a: ComplexMatrix,
    b: ComplexMatrix,
    q: HermitianMatrix,
}

impl ProblemInstance {
    pub fn new(a: ComplexMatrix, b: ComplexMatrix, q: HermitianMatrix) -> Result<Self> {
        let n = a.dim();
        ensure_same_dim(n, &b)?;
        ensure_same_dim(n, &q)?;
        if !is_positive_definite(&q, 0.0)? {
            return Err(Error::NotPositiveDefinite { min_eigenvalue: min_eigenvalue(&q)? });
        }
        Ok(Self { a, b, q })
    }

    pub fn dim(&self) -> usize {
        self.a.dim()
    }

    pub fn a(&self) -> &ComplexMatrix {
        &self.a
    }

    pub fn b(&self) -> &ComplexMatrix {
        &self.b
    }

    pub fn q(&self) -> &HermitianMatrix {
        &self.q
    }

    pub fn transforms(&self) -> TransformSet {
        compute_transforms(&self.a, &self.b).expect("dimensions validated at construction")
    }
}

/// `F(X, Y) = Q + V*XV + W*XW − U*YU − B*YB`, Hermitian-projected.
pub fn apply_f(
    x: &HermitianMatrix,
    y: &HermitianMatrix,
    q: &HermitianMatrix,
    t: &TransformSet,
) -> Result<HermitianMatrix> {
    let n = t.dim();
    ensure_same_dim(n, x)?;
    ensure_same_dim(n, y)?;
    ensure_same_dim(n, q)?;
    let out = q.as_matrix() + t.upper_part(x.as_matrix()) - t.lower_part(y.as_matrix());
    Ok(HermitianMatrix::symmetrized(&out))
}

/// `A*XB + B*XA`.
pub fn lyapunov_operator(x: &CMatrix, a: &CMatrix, b: &CMatrix) -> CMatrix {
    a.adjoint() * x * b + b.adjoint() * x * a
}

/// Spectral norm of the defect `A*XB + B*XA + Q`.
pub fn equation_residual(x: &HermitianMatrix, p: &ProblemInstance) -> Result<f64> {
    ensure_same_dim(p.dim(), x)?;
    let r = lyapunov_operator(x.as_matrix(), p.a.as_matrix(), p.b.as_matrix()) + p.q.as_matrix();
    Ok(spectral_norm(&r))
}

/// Spectral norm of `X − F(X, X)`.
pub fn fixed_point_residual(x: &HermitianMatrix, q: &HermitianMatrix, t: &TransformSet) -> Result<f64> {
    let fx = apply_f(x, x, q, t)?;
    Ok(spectral_norm(&(x.as_matrix() - fx.as_matrix())))
}
