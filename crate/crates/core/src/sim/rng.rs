//! Random streams. Every draw comes from ChaCha8 seeded with
//! `seed_from_u64(seed)`: codebooks use stream 0, trial `t` of a Monte
//! Carlo run uses stream `t` of the trial seed. Streams never overlap, so
//! the outcome of a trial does not depend on which thread runs it.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn codebook_rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn trial_rng(seed: u64, trial: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial);
    rng
}

pub fn bernoulli<R: Rng>(rng: &mut R, p: f64) -> bool {
    rng.random::<f64>() < p
}

/// Inverse-CDF draw from a probability vector.
pub fn categorical<R: Rng>(rng: &mut R, probs: &[f64]) -> usize {
    let x = rng.random::<f64>();
    let mut acc = 0.0;
    for (i, &p) in probs.iter().enumerate() {
        acc += p;
        if x < acc {
            return i;
        }
    }
    // Rounding left x above the total; fall back to the last supported symbol.
    probs.iter().rposition(|&p| p > 0.0).unwrap_or(0)
}
