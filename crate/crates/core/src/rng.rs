//! Counter-based random substreams.
//!
//! Every stochastic draw is keyed by a tuple of counters (episode seed, step,
//! sample, beam, ...). The tuple is hashed into a ChaCha seed and the last
//! counter selects the ChaCha stream, so a work item sees the same numbers
//! no matter which thread evaluates it or in what order.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Purpose tags keep independent consumers of one episode seed apart.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[repr(u64)]
pub enum Purpose {
    Lidar = 1,
    Perception = 2,
    Sampling = 3,
    Test = 0xFF,
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Folds a sequence of counters into one 64-bit key.
pub fn derive_key(seed: u64, counters: &[u64]) -> u64 {
    counters
        .iter()
        .fold(splitmix64(seed), |acc, &c| splitmix64(acc ^ splitmix64(c)))
}

/// RNG for the work item `(seed, purpose, major)`, stream `minor`.
pub fn substream(seed: u64, purpose: Purpose, major: u64, minor: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(derive_key(seed, &[purpose as u64, major]));
    rng.set_stream(minor);
    rng
}
