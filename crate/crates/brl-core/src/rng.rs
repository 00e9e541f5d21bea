//! Seed derivation for reproducible, parallelizable generation.
//!
//! Every randomized operation takes a `u64` master seed and derives
//! per-item streams with [`derive_seed`], so items can be generated in any
//! order (or in parallel) without changing the output.

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// splitmix64 mixing step; a fixed, portable bijection on u64.
fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Mix a stream index into a master seed.
pub fn derive_seed(master: u64, stream: u64) -> u64 {
    splitmix64(splitmix64(master) ^ splitmix64(stream.wrapping_add(0x5851_F42D_4C95_7F2D)))
}

/// Deterministic RNG for a (master seed, stream) pair.
///
/// ChaCha8 is used because its output is stable across platforms and
/// library versions, which byte-level reproducibility tests rely on.
pub fn rng_for(master: u64, stream: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(derive_seed(master, stream))
}

/// Deterministic RNG directly from a seed.
pub fn rng_from(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    #[test]
    fn derive_seed_is_deterministic_and_spreads() {
        assert_eq!(derive_seed(7, 0), derive_seed(7, 0));
        assert_ne!(derive_seed(7, 0), derive_seed(7, 1));
        assert_ne!(derive_seed(7, 0), derive_seed(8, 0));
    }

    #[test]
    fn rng_streams_are_independent_of_draw_order() {
        let a: f64 = rng_for(3, 10).random();
        // Drawing from stream 9 first must not perturb stream 10.
        let _ = rng_for(3, 9).random::<f64>();
        let b: f64 = rng_for(3, 10).random();
        assert_eq!(a, b);
    }
}
