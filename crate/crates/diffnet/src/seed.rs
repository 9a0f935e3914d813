//! Deterministic seed derivation.
//!
//! Every stochastic entry point takes an explicit 64-bit seed. Child seeds
//! for panels, trials, and replicas are derived with a splitmix64 chain so
//! that runs are reproducible and independent of execution order.

/// splitmix64 finalizer; a good 64-bit mixer.
pub fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Derives a child seed from a base seed and a list of tag values
/// (experiment kind, panel index, trial index, ...).
pub fn derive_seed(base: u64, tags: &[u64]) -> u64 {
    let mut state = splitmix64(base ^ 0x6a09_e667_f3bc_c908);
    for &tag in tags {
        state = splitmix64(state ^ splitmix64(tag));
    }
    state
}

/// FNV-1a hash of a string, for turning names into seed tags.
pub fn tag(name: &str) -> u64 {
    let mut hash = 0xcbf2_9ce4_8422_2325u64;
    for byte in name.bytes() {
        hash ^= byte as u64;
        hash = hash.wrapping_mul(0x0000_0100_0000_01b3);
    }
    hash
}
