//! Seeded random streams.
//!
//! Every random draw in this crate comes from ChaCha8 (`rand_chacha`),
//! keyed as `ChaCha8Rng::seed_from_u64(seed)` and then switched to an
//! explicit 64-bit stream id with `set_stream`. Independent consumers use
//! distinct stream ids, so results never depend on scheduling order.
//! Gaussian variates are `rand_distr::StandardNormal`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

pub fn stream(seed: u64, stream_id: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream_id);
    rng
}

/// Child seed for item `index`: the first word of stream `index` under `seed`.
pub fn derive_seed(seed: u64, index: u64) -> u64 {
    stream(seed, index).random()
}

pub fn gaussian_vec(rng: &mut impl Rng, n: usize) -> Vec<f64> {
    (0..n).map(|_| rng.sample(StandardNormal)).collect()
}
