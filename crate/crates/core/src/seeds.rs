//! Deterministic seed derivation.
//!
//! Every stochastic component takes an explicit 64-bit seed. Sub-streams are
//! derived by mixing, never by sharing RNG state, so results are independent
//! of thread interleaving and call order.

/// One round of splitmix64.
fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e3779b97f4a7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
    z ^ (z >> 31)
}

/// Derive a child seed from a parent seed and a salt.
pub fn mix(seed: u64, salt: u64) -> u64 {
    splitmix64(splitmix64(seed) ^ salt.wrapping_mul(0xff51afd7ed558ccd))
}

/// Derive a child seed from a parent seed and a string label.
pub fn mix_str(seed: u64, label: &str) -> u64 {
    let mut h: u64 = 0xcbf29ce484222325;
    for b in label.as_bytes() {
        h ^= u64::from(*b);
        h = h.wrapping_mul(0x100000001b3);
    }
    mix(seed, h)
}
