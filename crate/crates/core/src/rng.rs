//! Reproducible random streams.
//!
//! Every replicate, sweep point or block batch gets its own ChaCha8 stream
//! keyed by `(seed, index)`. Streams never depend on scheduling order, so
//! results are identical for any worker count.

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// The generator used throughout the crate.
pub type StreamRng = ChaCha8Rng;

/// Independent stream number `index` under the master `seed`.
pub fn stream(seed: u64, index: u64) -> StreamRng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// A child seed for task `index`, for APIs that take a plain seed.
pub fn derive_seed(seed: u64, index: u64) -> u64 {
    stream(seed, index).next_u64()
}
