//! Seed derivation for reproducible parallel sampling.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Seed used by every command when none is given.
pub const DEFAULT_SEED: u64 = 0x5eed_2024;

/// SplitMix64 finalizer over `(base, stream)`.
pub fn derive(base: u64, stream: u64) -> u64 {
    let mut z = base ^ stream.wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Independent generator for work item `stream`; results do not depend on
/// which worker runs the item.
pub fn stream_rng(base: u64, stream: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(derive(base, stream))
}
