//! Deterministic seed derivation for per-item random streams.

/// Mixes a master seed with an item index into an independent 64-bit seed.
///
/// The mix is the splitmix64 finalizer applied to
/// `master XOR (index * 0x9E3779B97F4A7C15)`, so any single item's stream
/// can be reproduced in isolation from `(master, index)` alone.
pub fn derive_seed(master: u64, index: u64) -> u64 {
    let mut z = master ^ index.wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}
