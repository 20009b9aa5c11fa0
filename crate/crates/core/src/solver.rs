//! Coupled fixed-point iteration
//!
//! ```text
//! X_{n+1} = F(X_n, Y_n),   Y_{n+1} = F(Y_n, X_n),   X_0 = 0,  Y_0 = M
//! ```
//!
//! The default [`Sweep::Sequential`] feeds the fresh `X_{n+1}` into the `Y`
//! update, `Y_{n+1} = F(Y_n, X_{n+1})`. Its iterates are bracketed by the
//! simultaneous ones, `X^sim_n ≤ X_n ≤ X̂ ≤ Y_n ≤ Y^sim_n`, so the bound below
//! carries over, and it roughly doubles the convergence rate.
//!
//! Under the certificate conditions `X_n` increases, `Y_n` decreases, both
//! converge to the unique positive definite solution, and
//! `max{d(X_n, X̂), d(Y_n, X̂)} ≤ δⁿ/(1−δ) · max{d(X_1, X_0), d(Y_1, Y_0)}`
//! in the metric `d(X, Y) = ‖X − Y‖_{1,Q̃}`.

use serde::{Deserialize, Serialize};

use crate::conditions::{CertificateConfig, ConditionReport, check_theorem};
use crate::error::{Error, Result};
use crate::matrix::{
    AsMatrix, HermitianMatrix, ensure_same_dim, loewner_margin, spectral_norm, sqrt_pd, weighted_trace_norm,
};
use crate::reformulation::{ProblemInstance, TransformSet, apply_f, equation_residual, fixed_point_residual};

/// The solver aborts once `E_n` exceeds this multiple of `E_0`.
pub const DIVERGENCE_FACTOR: f64 = 1e6;

/// Order of the two updates within one step.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Sweep {
    /// Both updates read step-n values only.
    Simultaneous,
    /// The `Y` update reads the new `X`.
    #[default]
    Sequential,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolverSettings {
    pub sweep: Sweep,
    /// Stop once `E_n ≤ tol`.
    pub tol: f64,
    /// Iteration cap; in fixed mode, the exact number of steps taken.
    pub max_iter: usize,
    pub record_history: bool,
    /// Run exactly `max_iter` steps, ignoring `tol` for stopping.
    pub fixed_iterations: bool,
    /// Iterate even if the certificate conditions fail.
    pub force: bool,
    /// Loewner slack for the enclosure check.
    pub enclosure_slack: f64,
}

impl Default for SolverSettings {
    fn default() -> Self {
        Self {
            sweep: Sweep::default(),
            tol: 1e-12,
            max_iter: 1000,
            record_history: true,
            fixed_iterations: false,
            force: false,
            enclosure_slack: 1e-9,
        }
    }
}

impl SolverSettings {
    pub fn fixed(iterations: usize) -> Self {
        Self { max_iter: iterations, fixed_iterations: true, ..Self::default() }
    }

    fn validate(&self) -> Result<()> {
        if self.tol.is_nan() || self.tol <= 0.0 || self.max_iter == 0 {
            return Err(Error::Format {
                field: "solver settings".into(),
                message: format!("need tol > 0 and max_iter ≥ 1, got tol = {}, max_iter = {}", self.tol, self.max_iter),
            });
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SolveStatus {
    Converged,
    MaxIterations,
    Diverged,
}

/// One row of the residual history.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ResidualRecord {
    pub i: usize,
    pub e_x: f64,
    pub e_y: f64,
    pub e: f64,
    /// `δ^i/(1−δ)·d0`; absent when δ ∉ (0, 1).
    pub a_priori_bound: Option<f64>,
}

#[derive(Debug, Clone)]
pub struct SolveReport {
    pub x_hat: HermitianMatrix,
    pub y_final: HermitianMatrix,
    pub iterations: usize,
    pub residual_history: Vec<ResidualRecord>,
    pub final_residual: ResidualRecord,
    pub delta: f64,
    /// `max{‖X_1 − X_0‖_{1,Q̃}, ‖Y_1 − Y_0‖_{1,Q̃}}`.
    pub d0_weighted: f64,
    /// Same step sizes in the spectral norm, for display.
    pub d0_spectral: f64,
    pub a_priori_bound_final: Option<f64>,
    pub enclosure_ok: bool,
    pub converged: bool,
    pub status: SolveStatus,
    pub equation_residual_final: f64,
    pub conditions: ConditionReport,
}

/// `δⁿ/(1−δ) · d0`.
pub fn a_priori_bound(n: usize, delta: f64, d0: f64) -> Result<f64> {
    if !(delta > 0.0 && delta < 1.0) {
        return Err(Error::DeltaOutOfRange(delta));
    }
    let exp = i32::try_from(n).unwrap_or(i32::MAX);
    Ok(delta.powi(exp) / (1.0 - delta) * d0)
}

/// `Q − (U*MU + B*MB)` and `Q + (V*MV + W*MW)`.
pub fn enclosure_bounds(
    p: &ProblemInstance,
    c: &CertificateConfig,
    t: &TransformSet,
) -> (HermitianMatrix, HermitianMatrix) {
    let q = p.q().as_matrix();
    let m = c.m_cap().as_matrix();
    let lower = HermitianMatrix::symmetrized(&(q - t.lower_part(m)));
    let upper = HermitianMatrix::symmetrized(&(q + t.upper_part(m)));
    (lower, upper)
}

/// Whether `x_hat` lies in the certified Loewner interval, up to `slack`.
pub fn verify_enclosure(
    x_hat: &HermitianMatrix,
    p: &ProblemInstance,
    c: &CertificateConfig,
    t: &TransformSet,
    slack: f64,
) -> Result<bool> {
    ensure_same_dim(p.dim(), x_hat)?;
    let (lower, upper) = enclosure_bounds(p, c, t);
    Ok(loewner_margin(&lower, x_hat)? >= -slack && loewner_margin(x_hat, &upper)? >= -slack)
}

/// State of the coupled iteration, advanced one step at a time.
#[derive(Debug, Clone)]
pub struct CoupledIteration<'a> {
    sweep: Sweep,
    q: &'a HermitianMatrix,
    t: TransformSet,
    n: usize,
    x: HermitianMatrix,
    y: HermitianMatrix,
}

impl<'a> CoupledIteration<'a> {
    /// Starts from `X_0 = 0`, `Y_0 = M`.
    pub fn new(p: &'a ProblemInstance, c: &CertificateConfig, sweep: Sweep) -> Result<Self> {
        ensure_same_dim(p.dim(), c.m_cap())?;
        Ok(Self { sweep, q: p.q(), t: p.transforms(), n: 0, x: HermitianMatrix::zeros(p.dim()), y: c.m_cap().clone() })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn x(&self) -> &HermitianMatrix {
        &self.x
    }

    pub fn y(&self) -> &HermitianMatrix {
        &self.y
    }

    pub fn transforms(&self) -> &TransformSet {
        &self.t
    }

    /// `(E_n(X), E_n(Y))`.
    pub fn residuals(&self) -> Result<(f64, f64)> {
        Ok((fixed_point_residual(&self.x, self.q, &self.t)?, fixed_point_residual(&self.y, self.q, &self.t)?))
    }

    pub fn step(&mut self) -> Result<()> {
        let x_next = apply_f(&self.x, &self.y, self.q, &self.t)?;
        let y_next = match self.sweep {
            Sweep::Simultaneous => apply_f(&self.y, &self.x, self.q, &self.t)?,
            Sweep::Sequential => apply_f(&self.y, &x_next, self.q, &self.t)?,
        };
        self.x = x_next;
        self.y = y_next;
        self.n += 1;
        Ok(())
    }
}

pub fn solve_coupled(p: &ProblemInstance, c: &CertificateConfig, s: &SolverSettings) -> Result<SolveReport> {
    solve_coupled_with(p, c, s, |_, _, _| {})
}

/// Runs the iteration, calling `observe(n, X_n, Y_n)` for every iterate
/// including `n = 0`.
pub fn solve_coupled_with<O>(
    p: &ProblemInstance,
    c: &CertificateConfig,
    s: &SolverSettings,
    mut observe: O,
) -> Result<SolveReport>
where
    O: FnMut(usize, &HermitianMatrix, &HermitianMatrix),
{
    s.validate()?;
    let conditions = check_theorem(p, c)?;
    if !conditions.all_satisfied && !s.force {
        return Err(Error::ConditionsNotSatisfied);
    }
    let delta = conditions.delta;
    let qtilde_half = sqrt_pd(c.qtilde())?;

    let mut it = CoupledIteration::new(p, c, s.sweep)?;
    let x0 = it.x().clone();
    let y0 = it.y().clone();

    let mut history = Vec::new();
    let mut d0_weighted = None;
    let mut d0_spectral = 0.0;
    let mut e0 = None;
    let status = loop {
        observe(it.n(), it.x(), it.y());
        let (e_x, e_y) = it.residuals()?;
        let e = e_x.max(e_y);
        let e_initial = *e0.get_or_insert(e);
        let record = ResidualRecord {
            i: it.n(),
            e_x,
            e_y,
            e,
            a_priori_bound: d0_weighted.and_then(|d0| a_priori_bound(it.n(), delta, d0).ok()),
        };
        if s.record_history {
            history.push(record);
        }

        if !e.is_finite() || e > DIVERGENCE_FACTOR * e_initial.max(f64::MIN_POSITIVE) {
            break SolveStatus::Diverged;
        }
        if !s.fixed_iterations && e <= s.tol {
            break SolveStatus::Converged;
        }
        if it.n() >= s.max_iter {
            break if e <= s.tol { SolveStatus::Converged } else { SolveStatus::MaxIterations };
        }

        it.step()?;
        if it.n() == 1 {
            let dx = it.x().sub(&x0);
            let dy = it.y().sub(&y0);
            d0_weighted = Some(weighted_trace_norm(&dx, &qtilde_half)?.max(weighted_trace_norm(&dy, &qtilde_half)?));
            d0_spectral = spectral_norm(&dx).max(spectral_norm(&dy));
            if s.record_history {
                // The bound at i = 0 needs d0, which is only known now.
                let d0 = d0_weighted.unwrap_or_default();
                history[0].a_priori_bound = a_priori_bound(0, delta, d0).ok();
            }
        }
    };

    let t = it.transforms().clone();
    let (e_x, e_y) = it.residuals()?;
    let final_residual = ResidualRecord {
        i: it.n(),
        e_x,
        e_y,
        e: e_x.max(e_y),
        a_priori_bound: d0_weighted.and_then(|d0| a_priori_bound(it.n(), delta, d0).ok()),
    };
    let x_hat = it.x().clone();
    let y_final = it.y().clone();
    Ok(SolveReport {
        enclosure_ok: verify_enclosure(&x_hat, p, c, &t, s.enclosure_slack)?,
        equation_residual_final: equation_residual(&x_hat, p)?,
        iterations: final_residual.i,
        a_priori_bound_final: final_residual.a_priori_bound,
        converged: status == SolveStatus::Converged,
        x_hat,
        y_final,
        residual_history: history,
        final_residual,
        delta,
        d0_weighted: d0_weighted.unwrap_or(0.0),
        d0_spectral,
        status,
        conditions,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::conditions::{preset_cr1, preset_cr2};
    use crate::matrix::{ComplexMatrix, DEFAULT_ASYM_TOL};
    use approx::assert_relative_eq;

    fn example1() -> ProblemInstance {
        let a =
            ComplexMatrix::from_real_rows(&[&[-0.95, 0.001, 0.001], &[0.001, -0.95, 0.001], &[0.001, 0.001, -0.95]])
                .unwrap();
        let b =
            ComplexMatrix::from_real_rows(&[&[0.54, -0.002, -0.002], &[-0.002, 0.54, -0.002], &[-0.002, -0.002, 0.54]])
                .unwrap();
        let q =
            HermitianMatrix::from_real_rows(&[&[2.0, 0.02, 0.005], &[0.02, 2.0, 0.02], &[0.005, 0.02, 2.0]]).unwrap();
        ProblemInstance::new(a, b, q).unwrap()
    }

    #[test]
    fn bound_arithmetic() {
        assert_relative_eq!(a_priori_bound(0, 0.5, 1.0).unwrap(), 2.0);
        assert_relative_eq!(a_priori_bound(10, 0.5, 1.0).unwrap(), 2.0 / 1024.0);
        assert_eq!(a_priori_bound(3, 1.0, 1.0).unwrap_err(), Error::DeltaOutOfRange(1.0));
        assert!(a_priori_bound(3, 0.0, 1.0).is_err());
    }

    #[test]
    fn example1_fixed_100() {
        let p = example1();
        let c = preset_cr1(&p, DEFAULT_ASYM_TOL).unwrap();
        let r = solve_coupled(&p, &c, &SolverSettings::fixed(100)).unwrap();
        assert_eq!(r.iterations, 100);
        assert_eq!(r.residual_history.len(), 101);
        assert!(r.final_residual.e <= 1e-12, "{}", r.final_residual.e);
        let printed = [[1.9495, 0.0288, 0.0142], [0.0288, 1.9496, 0.0288], [0.0142, 0.0288, 1.9495]];
        for (i, row) in printed.iter().enumerate() {
            for (j, &v) in row.iter().enumerate() {
                let got = r.x_hat.as_matrix()[(i, j)];
                assert!((got.re - v).abs() <= 1e-4, "({i},{j}) = {got}");
            }
        }
        assert!(r.enclosure_ok);
        assert!(r.converged);
    }

    #[test]
    fn scalar_closed_form() {
        let p = ProblemInstance::new(
            ComplexMatrix::from_real_rows(&[&[-0.95]]).unwrap(),
            ComplexMatrix::from_real_rows(&[&[0.54]]).unwrap(),
            HermitianMatrix::from_diagonal(&[2.0]),
        )
        .unwrap();
        let c = preset_cr1(&p, DEFAULT_ASYM_TOL).unwrap();
        let r = solve_coupled(&p, &c, &SolverSettings::default()).unwrap();
        assert!(r.converged);
        assert_relative_eq!(r.x_hat.as_matrix()[(0, 0)].re, 2.0 / (2.0 * 0.95 * 0.54), max_relative = 1e-11);
    }

    #[test]
    fn tolerance_mode_stops_early() {
        let p = example1();
        let c = preset_cr1(&p, DEFAULT_ASYM_TOL).unwrap();
        let s = SolverSettings { tol: 1e-10, ..SolverSettings::default() };
        let r = solve_coupled(&p, &c, &s).unwrap();
        assert!(r.converged);
        assert!(r.iterations < 100);
        assert!(r.final_residual.e <= 1e-10);
    }

    #[test]
    fn refuses_failing_conditions_unless_forced() {
        let p = ProblemInstance::new(
            ComplexMatrix::identity(2),
            ComplexMatrix::from_real_rows(&[&[-0.5, 0.0], &[0.0, -0.5]]).unwrap(),
            HermitianMatrix::identity(2),
        )
        .unwrap();
        let c = preset_cr2(&p, DEFAULT_ASYM_TOL).unwrap();
        assert_eq!(solve_coupled(&p, &c, &SolverSettings::default()).unwrap_err(), Error::ConditionsNotSatisfied);
        let forced = SolverSettings { force: true, max_iter: 500, ..SolverSettings::default() };
        let r = solve_coupled(&p, &c, &forced).unwrap();
        assert!(!r.converged);
        assert_eq!(r.status, SolveStatus::Diverged);
        assert!(r.a_priori_bound_final.is_none());
    }

    #[test]
    fn enclosure_examples() {
        let p = example1();
        let c = preset_cr1(&p, DEFAULT_ASYM_TOL).unwrap();
        let t = p.transforms();
        let (lower, upper) = enclosure_bounds(&p, &c, &t);
        assert!(verify_enclosure(&lower, &p, &c, &t, 1e-9).unwrap());
        assert!(verify_enclosure(&upper, &p, &c, &t, 1e-9).unwrap());
        let minus_i = HermitianMatrix::identity(3).scale(-1.0);
        assert!(!verify_enclosure(&minus_i, &p, &c, &t, 1e-9).unwrap());
    }

    #[test]
    fn history_without_recording_is_empty() {
        let p = example1();
        let c = preset_cr1(&p, DEFAULT_ASYM_TOL).unwrap();
        let s = SolverSettings { record_history: false, ..SolverSettings::default() };
        let r = solve_coupled(&p, &c, &s).unwrap();
        assert!(r.residual_history.is_empty());
        assert!(r.converged);
    }

    #[test]
    fn invalid_settings_rejected() {
        let p = example1();
        let c = preset_cr1(&p, DEFAULT_ASYM_TOL).unwrap();
        let s = SolverSettings { tol: 0.0, ..SolverSettings::default() };
        assert!(solve_coupled(&p, &c, &s).is_err());
        let s = SolverSettings { max_iter: 0, ..SolverSettings::default() };
        assert!(solve_coupled(&p, &c, &s).is_err());
    }
}
