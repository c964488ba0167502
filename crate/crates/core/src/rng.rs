//! Counter-based random streams.
//!
//! Every replicate owns the ChaCha stream keyed by `(seed, replicate)`, so the
//! draws a replicate sees do not depend on which worker runs it or in what
//! order replicates complete.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type StreamRng = ChaCha8Rng;

pub fn stream_rng(seed: u64, stream: u64) -> StreamRng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}
