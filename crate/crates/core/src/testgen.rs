//! Seeded random test instances shared by the unit, property, and acceptance
//! suites. Masses are Dirichlet(1, ..., 1) draws, so likelihood-ratio values
//! are distinct almost surely and argmax structure checks are unambiguous.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::dist::{Distribution, HypothesisPair};

/// Dirichlet(1,...,1) mass vector of length `n` via normalized Exp(1) draws.
fn dirichlet_masses(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    let gammas: Vec<f64> = (0..n).map(|_| -rng.gen::<f64>().max(1e-12).ln()).collect();
    let total: f64 = gammas.iter().sum();
    let mut probs: Vec<f64> = gammas.iter().map(|g| g / total).collect();
    // Renormalize the last coordinate so the sum is exactly within tolerance.
    let sum_head: f64 = probs[..n - 1].iter().sum();
    probs[n - 1] = 1.0 - sum_head;
    probs
}

/// A random discrete hypothesis pair on `n` shared support points with
/// independent Dirichlet-random masses. Deterministic in `seed`.
pub fn random_discrete_pair(seed: u64, n: usize) -> HypothesisPair {
    assert!(n >= 2);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let support: Vec<f64> = (0..n).map(|i| i as f64).collect();
    let p0 = dirichlet_masses(&mut rng, n);
    let p1 = dirichlet_masses(&mut rng, n);
    HypothesisPair::new(
        Distribution::discrete(support.clone(), p0).expect("valid null"),
        Distribution::discrete(support, p1).expect("valid alternative"),
    )
    .expect("shared support implies absolute continuity")
}

/// A random support size in 2..=max, then a random pair on it.
pub fn random_discrete_pair_up_to(seed: u64, max_n: usize) -> HypothesisPair {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x9e37_79b9_7f4a_7c15);
    let n = rng.gen_range(2..=max_n);
    random_discrete_pair(seed, n)
}
