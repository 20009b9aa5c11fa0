//! Shared fixtures for the benchmarks.

use gcale_core::instances::{GeneratedInstance, random_satisfying_instance};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// A deterministic conditions-satisfying instance of size `n`.
pub fn fixture(n: usize) -> GeneratedInstance {
    let mut rng = ChaCha8Rng::seed_from_u64(0x9ca1e + n as u64);
    random_satisfying_instance(&mut rng, n)
}

#[cfg(test)]
mod tests {
    use super::*;
    use gcale_core::check_theorem;

    #[test]
    fn fixtures_are_deterministic_and_valid() {
        let a = fixture(4);
        let b = fixture(4);
        assert_eq!(a.problem.q(), b.problem.q());
        assert!(check_theorem(&a.problem, &a.certificate).unwrap().all_satisfied);
    }
}
