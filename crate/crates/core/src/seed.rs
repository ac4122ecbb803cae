//! Seed derivation for independent, reproducible random streams.
//!
//! Every random draw in the crate goes through a [`ChaCha12Rng`] seeded
//! from an explicit 64-bit seed. Sub-streams (one per vehicle, per window,
//! per replication, ...) are derived with SplitMix64 so that changing one
//! stream index never perturbs another stream.

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha12Rng;

/// One SplitMix64 step, the standard 64-bit mixer.
fn splitmix64(state: u64) -> u64 {
    let mut z = state.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Derives a sub-seed from a master seed and a path of stream indices.
pub fn derive_seed(master: u64, path: &[u64]) -> u64 {
    let mut s = splitmix64(master);
    for &p in path {
        s = splitmix64(s ^ p);
    }
    s
}

/// A ChaCha12 generator for the given master seed and stream path.
pub fn rng_for(master: u64, path: &[u64]) -> ChaCha12Rng {
    ChaCha12Rng::seed_from_u64(derive_seed(master, path))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn derived_seeds_are_stable_and_distinct() {
        let a = derive_seed(42, &[0, 1]);
        let b = derive_seed(42, &[0, 1]);
        let c = derive_seed(42, &[0, 2]);
        let d = derive_seed(42, &[1, 0]);
        assert_eq!(a, b);
        assert_ne!(a, c);
        assert_ne!(a, d);
        assert_ne!(c, d);
    }

    #[test]
    fn rng_streams_are_reproducible() {
        use rand::Rng;
        let mut r1 = rng_for(7, &[3]);
        let mut r2 = rng_for(7, &[3]);
        let xs: Vec<u64> = (0..8).map(|_| r1.random()).collect();
        let ys: Vec<u64> = (0..8).map(|_| r2.random()).collect();
        assert_eq!(xs, ys);
    }
}
