//! Counter-based random stream derivation.
//!
//! Every (grid point, system, batch) work item owns a ChaCha stream derived
//! from the master seed and its indices, so results are independent of
//! scheduling and worker count.

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

const POINT_BITS: u32 = 20;
const SYSTEM_BITS: u32 = 4;
const BATCH_BITS: u32 = 40;

/// Derives the stream for one work item.
///
/// Panics if an index exceeds its field width (20/4/40 bits); sweeps stay
/// far below these.
pub fn stream_rng(master_seed: u64, point: u64, system: u64, batch: u64) -> ChaCha8Rng {
    assert!(point < 1 << POINT_BITS, "point index {point} too large");
    assert!(system < 1 << SYSTEM_BITS, "system index {system} too large");
    assert!(batch < 1 << BATCH_BITS, "batch index {batch} too large");
    let stream = (point << (SYSTEM_BITS + BATCH_BITS)) | (system << BATCH_BITS) | batch;
    let mut rng = ChaCha8Rng::seed_from_u64(master_seed);
    rng.set_stream(stream);
    rng
}
