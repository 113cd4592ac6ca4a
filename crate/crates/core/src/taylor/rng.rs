//! Counter-based SplitMix64.
//!
//! The n-th output is `mix(seed + (n + 1)·γ)` with γ = 0x9E3779B97F4A7C15 and the
//! standard SplitMix64 finaliser, so any index is reachable without replaying the stream
//! and outputs are identical on every platform.

pub const GOLDEN_GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;

pub fn mix(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// The n-th 64-bit output for `seed`.
pub fn splitmix64_at(seed: u64, n: u64) -> u64 {
    mix(seed.wrapping_add(n.wrapping_add(1).wrapping_mul(GOLDEN_GAMMA)))
}

/// Top 53 bits of the n-th output as an integer; the uniform variate is this times 2^-53.
pub fn unit_mantissa(seed: u64, n: u64) -> u64 {
    splitmix64_at(seed, n) >> 11
}

pub fn unit_f64(seed: u64, n: u64) -> f64 {
    unit_mantissa(seed, n) as f64 * (-53f64).exp2()
}
