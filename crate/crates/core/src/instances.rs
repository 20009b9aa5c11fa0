//! Random matrices and random certificate-satisfying instances.
//!
//! Instances are drawn near the scalar pair `A ≈ a₀I`, `B ≈ b₀I` with
//! `a₀ ∈ [−1, −0.9]`, `b₀ ∈ [0.45, 0.55]`, where every condition holds with
//! room to spare, and the random perturbations are halved until the
//! certificate checks out.

use num_complex::Complex64;
use rand::Rng;

use crate::conditions::{CertificateConfig, check_theorem, preset_cr1, preset_cr2};
use crate::matrix::{CMatrix, ComplexMatrix, DEFAULT_ASYM_TOL, HermitianMatrix, spectral_norm};
use crate::reformulation::ProblemInstance;

/// Entries with real (and, if `complex`, imaginary) parts uniform in [−1, 1].
pub fn random_matrix<R: Rng + ?Sized>(rng: &mut R, n: usize, complex: bool) -> CMatrix {
    CMatrix::from_fn(n, n, |_, _| {
        let re = rng.random_range(-1.0..=1.0);
        let im = if complex { rng.random_range(-1.0..=1.0) } else { 0.0 };
        Complex64::new(re, im)
    })
}

pub fn random_hermitian<R: Rng + ?Sized>(rng: &mut R, n: usize, complex: bool) -> HermitianMatrix {
    HermitianMatrix::symmetrized(&random_matrix(rng, n, complex))
}

/// `G*G` for a random `G`; positive semidefinite, generically definite.
pub fn random_psd<R: Rng + ?Sized>(rng: &mut R, n: usize, complex: bool) -> HermitianMatrix {
    let g = random_matrix(rng, n, complex);
    HermitianMatrix::symmetrized(&(g.adjoint() * g))
}

fn unit_spectral(m: CMatrix) -> CMatrix {
    let s = spectral_norm(&m);
    if s > 0.0 { m / Complex64::new(s, 0.0) } else { m }
}

#[derive(Debug, Clone)]
pub struct GeneratedInstance {
    pub problem: ProblemInstance,
    pub certificate: CertificateConfig,
    /// Number of perturbation halvings before the conditions held.
    pub halvings: usize,
}

const MAX_HALVINGS: usize = 40;

/// Draws an N×N instance together with a certificate that satisfies all
/// conditions. Mixes real and complex data, Hermitian and non-Hermitian
/// `A`, `B`, and the three certificate shapes (`Q̃ = Q`, `Q̃ = I`, preset).
pub fn random_satisfying_instance<R: Rng + ?Sized>(rng: &mut R, n: usize) -> GeneratedInstance {
    let a0 = rng.random_range(-1.0..=-0.9);
    let b0 = rng.random_range(0.45..=0.55);
    let complex = rng.random_bool(0.5);
    let hermitian_ab = rng.random_bool(0.3);
    let shape = rng.random_range(0..3u8);
    let mut q0 = rng.random_range(0.5..=3.0);

    let perturb = |rng: &mut R| {
        if hermitian_ab {
            unit_spectral(random_hermitian(rng, n, complex).into_inner())
        } else {
            unit_spectral(random_matrix(rng, n, complex))
        }
    };
    let pa = perturb(rng);
    let pb = perturb(rng);
    let pq = unit_spectral(random_hermitian(rng, n, complex).into_inner());
    let qtilde_shape = unit_spectral(random_hermitian(rng, n, complex).into_inner());

    // Scalar part of the gap bounds for condition (d): M is scaled so Q sits
    // mid-interval between (u² + b²)M and (1 − v² − w²)M.
    let u2 = (a0 - b0 + 1.0) * (a0 - b0 + 1.0) / 2.0;
    let v2 = (a0 + b0 + 1.0) * (a0 + b0 + 1.0) / 2.0;
    let w2 = (b0 - 1.0) * (b0 - 1.0);
    let kappa = 2.0 / ((u2 + b0 * b0) + (1.0 - v2 - w2));
    if shape == 1 && hermitian_ab {
        // M = I pins the scale of Q.
        q0 = 1.0 / kappa;
    }

    let id = CMatrix::identity(n, n);
    let mut eps = rng.random_range(0.02..=0.1);
    for halvings in 0..=MAX_HALVINGS {
        let scale = |m: &CMatrix, s: f64| m * Complex64::new(s, 0.0);
        let a = ComplexMatrix::new(scale(&id, a0) + scale(&pa, eps)).expect("finite");
        let b = ComplexMatrix::new(scale(&id, b0) + scale(&pb, eps)).expect("finite");
        let q = HermitianMatrix::symmetrized(&scale(&(&id + scale(&pq, (eps * 2.0).min(0.1))), q0));
        let Ok(problem) = ProblemInstance::new(a, b, q) else {
            eps *= 0.5;
            continue;
        };
        let certificate = match shape {
            0 if hermitian_ab => preset_cr1(&problem, DEFAULT_ASYM_TOL),
            1 if hermitian_ab => preset_cr2(&problem, DEFAULT_ASYM_TOL),
            0 => CertificateConfig::new(problem.q().clone(), problem.q().scale(kappa)),
            1 => CertificateConfig::new(HermitianMatrix::identity(n), problem.q().scale(kappa)),
            _ => CertificateConfig::new(
                HermitianMatrix::symmetrized(&(&id + scale(&qtilde_shape, 0.3))),
                problem.q().scale(kappa),
            ),
        };
        if let Ok(certificate) = certificate
            && check_theorem(&problem, &certificate).is_ok_and(|r| r.all_satisfied)
        {
            return GeneratedInstance { problem, certificate, halvings };
        }
        eps *= 0.5;
    }
    panic!("no satisfying instance after {MAX_HALVINGS} halvings (a0 = {a0}, b0 = {b0})");
}
