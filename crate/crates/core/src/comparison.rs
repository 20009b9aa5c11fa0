//! Cross-validation of the fixed-point iterates against the direct solution,
//! including the a-priori error bound at every iterate.

use crate::conditions::CertificateConfig;
use crate::error::Result;
use crate::matrix::{AsMatrix, HermitianMatrix, sqrt_pd, weighted_trace_norm};
use crate::oracle::{ErrorNorm, OracleResult, error_against, solve_direct};
use crate::reformulation::ProblemInstance;
use crate::solver::{SolveReport, SolverSettings, a_priori_bound, solve_coupled_with};

/// Absolute slack added to the bound, relative to `max(1, ‖X̂‖_{1,Q̃})`.
pub const BOUND_SLACK: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IterateError {
    pub n: usize,
    /// `‖X_n − X̂‖_{1,Q̃}`
    pub err_x: f64,
    /// `‖Y_n − X̂‖_{1,Q̃}`
    pub err_y: f64,
    pub bound: Option<f64>,
}

impl IterateError {
    pub fn worst(&self) -> f64 {
        self.err_x.max(self.err_y)
    }
}

#[derive(Debug, Clone)]
pub struct Comparison {
    pub solve: SolveReport,
    pub oracle: OracleResult,
    pub per_iterate: Vec<IterateError>,
    /// False when δ ∉ (0, 1) and the bound is undefined.
    pub bound_checked: bool,
    /// True when checked and the bound held at every iterate.
    pub bound_holds: bool,
    pub bound_slack: f64,
    pub true_error_spectral: f64,
    pub true_error_weighted: f64,
}

pub fn compare_with_oracle(p: &ProblemInstance, c: &CertificateConfig, s: &SolverSettings) -> Result<Comparison> {
    let oracle = solve_direct(p)?;
    let half = sqrt_pd(c.qtilde())?;
    let dist = |m: &HermitianMatrix| weighted_trace_norm(&(m.as_matrix() - oracle.x.as_matrix()), &half);

    let mut raw: Vec<Result<(usize, f64, f64)>> = Vec::new();
    let solve = solve_coupled_with(p, c, s, |n, x, y| {
        raw.push(dist(x).and_then(|ex| Ok((n, ex, dist(y)?))));
    })?;

    let bound_checked = solve.delta > 0.0 && solve.delta < 1.0;
    let bound_slack = BOUND_SLACK * dist(&HermitianMatrix::zeros(p.dim()))?.max(1.0);
    let mut per_iterate = Vec::with_capacity(raw.len());
    for r in raw {
        let (n, err_x, err_y) = r?;
        let bound = a_priori_bound(n, solve.delta, solve.d0_weighted).ok();
        per_iterate.push(IterateError { n, err_x, err_y, bound });
    }
    let bound_holds =
        bound_checked && per_iterate.iter().all(|e| e.bound.is_some_and(|b| e.worst() <= b + bound_slack));

    Ok(Comparison {
        true_error_spectral: error_against(&solve.x_hat, &oracle.x, ErrorNorm::Spectral, c.qtilde())?,
        true_error_weighted: dist(&solve.x_hat)?,
        solve,
        oracle,
        per_iterate,
        bound_checked,
        bound_holds,
        bound_slack,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::conditions::preset_cr2;
    use crate::matrix::{ComplexMatrix, DEFAULT_ASYM_TOL};

    #[test]
    fn forced_non_contractive_instance_skips_bound() {
        let p = ProblemInstance::new(
            ComplexMatrix::identity(2),
            ComplexMatrix::from_real_rows(&[&[-0.5, 0.0], &[0.0, -0.5]]).unwrap(),
            HermitianMatrix::identity(2),
        )
        .unwrap();
        let c = preset_cr2(&p, DEFAULT_ASYM_TOL).unwrap();
        let s = SolverSettings { force: true, ..SolverSettings::default() };
        let cmp = compare_with_oracle(&p, &c, &s).unwrap();
        assert!(!cmp.bound_checked);
        assert!(!cmp.bound_holds);
        assert!(cmp.per_iterate.iter().all(|e| e.bound.is_none()));
    }
}
