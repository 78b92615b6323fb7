//! Seed derivation. Every derived seed is a pure function of its inputs, so
//! runs are reproducible no matter how work is scheduled.

/// SplitMix64 finaliser.
#[inline]
pub fn mix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Combines two values into a decorrelated seed.
#[inline]
pub fn combine(a: u64, b: u64) -> u64 {
    mix64(mix64(a) ^ b.rotate_left(17) ^ 0x6a09_e667_f3bc_c908)
}

/// FNV-1a over a byte string, for stable tags such as method names.
pub fn tag(bytes: &[u8]) -> u64 {
    bytes.iter().fold(0xcbf2_9ce4_8422_2325, |h, &b| {
        (h ^ u64::from(b)).wrapping_mul(0x0000_0100_0000_01b3)
    })
}

/// Seed keyed on the exact bit patterns of a weight vector.
pub fn weight_seed(run_seed: u64, lambdas: &[f64]) -> u64 {
    lambdas.iter().fold(mix64(run_seed), |h, &l| {
        // -0.0 and 0.0 are the same weight
        let bits = if l == 0.0 { 0 } else { l.to_bits() };
        combine(h, bits)
    })
}
