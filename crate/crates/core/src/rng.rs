//! Seeded random streams.
//!
//! Every sampled quantity gets its own ChaCha20 stream: the master seed keys
//! the generator and the item index selects the stream. Draws are therefore
//! independent of evaluation order and thread count.

use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;

/// Identifier written into output headers.
pub const RNG_ALGORITHM: &str = "chacha20-stream/rand_distr-0.5-binomial";

/// Generator for item `index` under `master_seed`.
pub fn stream_rng(master_seed: u64, index: u64) -> ChaCha20Rng {
    let mut rng = ChaCha20Rng::seed_from_u64(master_seed);
    rng.set_stream(index);
    rng
}
