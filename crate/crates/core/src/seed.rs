//! Deterministic seed derivation for nested randomized stages.
//!
//! Every randomized stage (sketch restarts, per-group denoising) draws
//! its generator from a seed derived from the master seed and the stage
//! coordinates, so a whole pipeline run is reproducible from one value.

/// SplitMix64 finalizer.
fn mix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Derive a child seed from a master seed and two stage coordinates.
pub fn derive_seed(master: u64, a: u64, b: u64) -> u64 {
    mix(mix(mix(master) ^ a) ^ b)
}
