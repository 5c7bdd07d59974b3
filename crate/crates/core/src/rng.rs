//! Seeded randomness shared by problem builders and property checks.
//!
//! All seeded streams use ChaCha8 seeded through `seed_from_u64`, which is
//! stable across platforms and releases of `rand_chacha` 0.3.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::operators::Vector;

pub type SeededRng = ChaCha8Rng;

pub fn seeded(seed: u64) -> SeededRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Uniform sample from `[-radius, radius]^dim`.
pub fn uniform_vector(rng: &mut SeededRng, dim: usize, radius: f64) -> Vector {
    Vector::from_fn(dim, |_| rng.gen_range(-radius..=radius))
}

pub fn uniform_matrix(rng: &mut SeededRng, rows: usize, cols: usize, radius: f64) -> Vec<Vec<f64>> {
    (0..rows)
        .map(|_| (0..cols).map(|_| rng.gen_range(-radius..=radius)).collect())
        .collect()
}
