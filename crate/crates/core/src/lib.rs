//! Hermitian positive definite solutions of the generalized continuous-time
//! Lyapunov equation
//!
//! ```text
//! A*XB + B*XA = −Q
//! ```
//!
//! by a coupled fixed-point iteration on a mixed-monotone map, together with
//! certificate checks, a-priori error bounds, and a direct Kronecker solver
//! used as a reference.
//!
//! ```
//! use gcale_core::{
//!     ComplexMatrix, HermitianMatrix, ProblemInstance, SolverSettings, preset_cr1, solve_coupled,
//! };
//!
//! let a = ComplexMatrix::from_real_rows(&[&[-0.95, 0.0], &[0.0, -0.95]]).unwrap();
//! let b = ComplexMatrix::from_real_rows(&[&[0.54, 0.0], &[0.0, 0.54]]).unwrap();
//! let q = HermitianMatrix::from_diagonal(&[2.0, 2.0]);
//! let problem = ProblemInstance::new(a, b, q).unwrap();
//! let cert = preset_cr1(&problem, 1e-10).unwrap();
//! let report = solve_coupled(&problem, &cert, &SolverSettings::default()).unwrap();
//! assert!(report.converged);
//! ```

pub mod comparison;
pub mod conditions;
pub mod error;
pub mod instances;
pub mod io;
pub mod matrix;
pub mod oracle;
pub mod reformulation;
pub mod solver;

pub use comparison::{Comparison, IterateError, compare_with_oracle};
pub use conditions::{
    CertificateConfig, ConditionReport, PencilReport, Preset, check_theorem, check_theorem_with, contraction_factor,
    pencil_stability, preset_cr1, preset_cr2,
};
pub use error::{Error, Result};
pub use matrix::{
    AsMatrix, CMatrix, ComplexMatrix, DEFAULT_ASYM_TOL, HermitianMatrix, hermitian_project, inv_sqrt_pd,
    is_positive_definite, loewner_margin, min_eigenvalue, spectral_norm, sqrt_pd, trace_norm, weighted_trace_norm,
};
pub use num_complex::Complex64;
pub use oracle::{ErrorNorm, OracleResult, error_against, solve_direct, true_error};
pub use reformulation::{
    ProblemInstance, TransformSet, apply_f, compute_transforms, equation_residual, fixed_point_residual,
};
pub use solver::{
    CoupledIteration, ResidualRecord, SolveReport, SolveStatus, SolverSettings, Sweep, a_priori_bound, solve_coupled,
    solve_coupled_with, verify_enclosure,
};
