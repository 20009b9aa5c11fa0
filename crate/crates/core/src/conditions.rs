//! Sufficient conditions for a unique positive definite solution, the
//! contraction factor δ, and a pencil-stability diagnostic.
//!
//! A certificate is a pair `(Q̃, M)` of positive definite matrices. The four
//! strict Loewner inequalities are reported as margins: the smallest
//! eigenvalue of each gap matrix. A margin above `strict_tol` counts as
//! satisfied.

use nalgebra::Schur;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::{
    AsMatrix, CMatrix, ComplexMatrix, DEFAULT_ASYM_TOL, HermitianMatrix, ensure_same_dim, inv_sqrt_pd,
    is_positive_definite, min_eigenvalue, spectral_norm,
};
use crate::reformulation::{ProblemInstance, TransformSet};

/// Where a certificate came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Preset {
    Custom,
    /// `Q̃ = Q`, `M = 2Q`, for Hermitian `A`, `B`.
    Cr1,
    /// `Q̃ = M = I`, for Hermitian `A`, `B`.
    Cr2,
}

#[derive(Debug, Clone)]
pub struct CertificateConfig {
    qtilde: HermitianMatrix,
    m_cap: HermitianMatrix,
    preset: Preset,
}

impl CertificateConfig {
    /// A custom certificate. Both matrices must be positive definite.
    pub fn new(qtilde: HermitianMatrix, m_cap: HermitianMatrix) -> Result<Self> {
        ensure_same_dim(qtilde.dim(), &m_cap)?;
        for h in [&qtilde, &m_cap] {
            if !is_positive_definite(h, 0.0)? {
                return Err(Error::NotPositiveDefinite { min_eigenvalue: min_eigenvalue(h)? });
            }
        }
        Ok(Self { qtilde, m_cap, preset: Preset::Custom })
    }

    pub fn qtilde(&self) -> &HermitianMatrix {
        &self.qtilde
    }

    pub fn m_cap(&self) -> &HermitianMatrix {
        &self.m_cap
    }

    pub fn preset(&self) -> Preset {
        self.preset
    }

    pub fn dim(&self) -> usize {
        self.qtilde.dim()
    }
}

fn require_hermitian_pair(p: &ProblemInstance, asym_tol: f64) -> Result<()> {
    if p.a().is_hermitian(asym_tol) && p.b().is_hermitian(asym_tol) {
        Ok(())
    } else {
        Err(Error::PresetRequiresHermitian)
    }
}

/// `Q̃ = Q`, `M = 2Q`.
pub fn preset_cr1(p: &ProblemInstance, asym_tol: f64) -> Result<CertificateConfig> {
    require_hermitian_pair(p, asym_tol)?;
    Ok(CertificateConfig { qtilde: p.q().clone(), m_cap: p.q().scale(2.0), preset: Preset::Cr1 })
}

/// `Q̃ = M = I`.
pub fn preset_cr2(p: &ProblemInstance, asym_tol: f64) -> Result<CertificateConfig> {
    require_hermitian_pair(p, asym_tol)?;
    let id = HermitianMatrix::identity(p.dim());
    Ok(CertificateConfig { qtilde: id.clone(), m_cap: id, preset: Preset::Cr2 })
}

/// Outcome of checking one certificate against one instance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConditionReport {
    /// `λmin(Q̃ − 2(UQ̃U* + BQ̃B*))`
    pub margin_a: f64,
    /// `λmin(Q̃ − 2(VQ̃V* + WQ̃W*))`
    pub margin_b: f64,
    /// `λmin(M − (V*MV + W*MW) − (U*MU + B*MB))`
    pub margin_c: f64,
    /// `λmin(Q − (U*MU + B*MB))`
    pub margin_d_lower: f64,
    /// `λmin(M − (V*MV + W*MW) − Q)`
    pub margin_d_upper: f64,
    pub delta: f64,
    pub all_satisfied: bool,
    pub hermitian_ab: bool,
    pub preset: Preset,
}

impl ConditionReport {
    pub fn margins(&self) -> [f64; 5] {
        [self.margin_a, self.margin_b, self.margin_c, self.margin_d_lower, self.margin_d_upper]
    }
}

fn sandwiched_norm(inner: CMatrix, qtilde_inv_half: &CMatrix) -> f64 {
    spectral_norm(&(qtilde_inv_half * inner * qtilde_inv_half))
}

/// `δ = 2 max{‖Q̃^{-1/2}(VQ̃V* + WQ̃W*)Q̃^{-1/2}‖, ‖Q̃^{-1/2}(UQ̃U* + BQ̃B*)Q̃^{-1/2}‖}`.
pub fn contraction_factor(t: &TransformSet, qtilde: &HermitianMatrix) -> Result<f64> {
    ensure_same_dim(t.dim(), qtilde)?;
    let inv_half = inv_sqrt_pd(qtilde)?;
    let inv_half = inv_half.as_matrix();
    let q = qtilde.as_matrix();
    let upper = sandwiched_norm(t.upper_part_adjoint(q), inv_half);
    let lower = sandwiched_norm(t.lower_part_adjoint(q), inv_half);
    Ok(2.0 * upper.max(lower))
}

pub fn check_theorem(p: &ProblemInstance, c: &CertificateConfig) -> Result<ConditionReport> {
    check_theorem_with(p, c, 0.0, DEFAULT_ASYM_TOL)
}

/// As [`check_theorem`], counting a margin as satisfied only above `strict_tol`.
pub fn check_theorem_with(
    p: &ProblemInstance,
    c: &CertificateConfig,
    strict_tol: f64,
    asym_tol: f64,
) -> Result<ConditionReport> {
    let n = p.dim();
    ensure_same_dim(n, c.qtilde())?;
    let t = p.transforms();
    let qt = c.qtilde.as_matrix();
    let m = c.m_cap.as_matrix();
    let q = p.q().as_matrix();

    let gap = |g: CMatrix| min_eigenvalue(&HermitianMatrix::symmetrized(&g));

    let lower_m = t.lower_part(m);
    let upper_m = t.upper_part(m);
    let margin_a = gap(qt - t.lower_part_adjoint(qt) * Complex64::new(2.0, 0.0))?;
    let margin_b = gap(qt - t.upper_part_adjoint(qt) * Complex64::new(2.0, 0.0))?;
    let margin_c = gap(m - &upper_m - &lower_m)?;
    let margin_d_lower = gap(q - &lower_m)?;
    let margin_d_upper = gap(m - &upper_m - q)?;
    let delta = contraction_factor(&t, &c.qtilde)?;

    let margins = [margin_a, margin_b, margin_c, margin_d_lower, margin_d_upper];
    let all_satisfied = margins.iter().all(|&g| g > strict_tol) && delta < 1.0;
    Ok(ConditionReport {
        margin_a,
        margin_b,
        margin_c,
        margin_d_lower,
        margin_d_upper,
        delta,
        all_satisfied,
        hermitian_ab: p.a().is_hermitian(asym_tol) && p.b().is_hermitian(asym_tol),
        preset: c.preset,
    })
}

/// Condition number above which `A` is treated as singular by
/// [`pencil_stability`].
pub const PENCIL_COND_LIMIT: f64 = 1e12;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PencilReport {
    /// Finite eigenvalues of `λA − B`, i.e. the spectrum of `A⁻¹B`.
    pub eigenvalues: Vec<[f64; 2]>,
    /// `None` when unsupported.
    pub stable: Option<bool>,
    pub supported: bool,
    /// 2-norm condition number of `A`.
    pub condition_a: f64,
}

/// Eigenvalues of the pencil `λA − B`, computed as the spectrum of `A⁻¹B`
/// when `A` is well conditioned.
pub fn pencil_stability(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<PencilReport> {
    pencil_stability_with(a, b, PENCIL_COND_LIMIT)
}

pub fn pencil_stability_with(a: &ComplexMatrix, b: &ComplexMatrix, cond_limit: f64) -> Result<PencilReport> {
    let n = a.dim();
    ensure_same_dim(n, b)?;
    let svd = a.as_matrix().clone().svd(false, false);
    let smax = svd.singular_values.max();
    let smin = svd.singular_values.min();
    let condition_a = if smin > 0.0 { smax / smin } else { f64::INFINITY };
    let unsupported = PencilReport { eigenvalues: Vec::new(), stable: None, supported: false, condition_a };
    if condition_a.is_nan() || condition_a >= cond_limit {
        return Ok(unsupported);
    }
    let Some(a_inv_b) = a.as_matrix().clone().lu().solve(b.as_matrix()) else {
        return Ok(unsupported);
    };
    let schur =
        Schur::try_new(a_inv_b, f64::EPSILON, 100_000).ok_or(Error::NoConvergence("complex Schur decomposition"))?;
    let (_, tri) = schur.unpack();
    let eigs: Vec<Complex64> = (0..n).map(|i| tri[(i, i)]).collect();
    Ok(PencilReport {
        stable: Some(eigs.iter().all(|z| z.re < 0.0)),
        eigenvalues: eigs.iter().map(|z| [z.re, z.im]).collect(),
        supported: true,
        condition_a,
    })
}
