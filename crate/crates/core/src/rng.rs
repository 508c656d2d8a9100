//! Seeded random streams.
//!
//! Everything random in the crate draws from ChaCha20. Independent substreams
//! of a master seed use ChaCha's 64-bit stream id, so batch `k` of a
//! Monte-Carlo run sees the same numbers regardless of scheduling.

use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;

/// Name of the generator, recorded in reports.
pub const GENERATOR: &str = "ChaCha20";

pub fn from_seed(seed: u64) -> ChaCha20Rng {
    ChaCha20Rng::seed_from_u64(seed)
}

/// Stream `stream` of the master seed. Stream 0 equals `from_seed(seed)`.
pub fn substream(seed: u64, stream: u64) -> ChaCha20Rng {
    let mut r = ChaCha20Rng::seed_from_u64(seed);
    r.set_stream(stream);
    r
}
