#![allow(dead_code)]

use adp_core::DiscreteDistribution;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Full-support random distribution: components uniform in [0.05, 1], normalised.
pub fn random_dist(rng: &mut impl Rng, len: usize) -> DiscreteDistribution {
    let w: Vec<f64> = (0..len).map(|_| rng.gen_range(0.05..=1.0)).collect();
    DiscreteDistribution::from_weights(&w).unwrap()
}

pub fn random_rows(rng: &mut impl Rng, inputs: usize, outputs: usize) -> Vec<Vec<f64>> {
    (0..inputs)
        .map(|_| random_dist(rng, outputs).probs().to_vec())
        .collect()
}

pub fn rel_err(a: f64, b: f64) -> f64 {
    if a == b {
        0.0
    } else {
        (a - b).abs() / b.abs().max(f64::MIN_POSITIVE)
    }
}
