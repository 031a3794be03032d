use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Counter-based generator keyed by `(master_seed, stream)`.
///
/// Every sample index gets its own ChaCha stream, so a sample's draws never
/// depend on which thread produced it or on how indices were batched.
pub fn stream_rng(master_seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(master_seed);
    rng.set_stream(stream);
    rng
}

/// Derives an independent master seed for a secondary experiment (validation
/// pairs, witnesses) from the campaign seed. SplitMix64 finalizer.
pub fn derived_seed(master_seed: u64, tag: u64) -> u64 {
    let mut z = master_seed ^ tag.wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}
