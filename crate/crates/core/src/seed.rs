//! Counter-based seed derivation.
//!
//! Every random stream in an experiment is addressed by a tuple of indices
//! (branch, model, network, run, ...) and derived from the master seed by
//! hashing, never by drawing seeds sequentially from a parent stream. A stream
//! therefore depends only on its address, so results do not depend on how work
//! units are scheduled across threads.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// The generator used for every simulation stream.
pub type SimRng = ChaCha8Rng;

#[inline]
fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Hash a master seed and an index path into a child seed.
pub fn derive_seed(master: u64, path: &[u64]) -> u64 {
    // length prefix keeps [a] and [a, 0] apart
    let mut h = splitmix64(master ^ 0x6A09_E667_F3BC_C908);
    h = splitmix64(h ^ path.len() as u64);
    for &p in path {
        h = splitmix64(h ^ splitmix64(p));
    }
    h
}

/// A fresh generator for the stream at `path` under `master`.
pub fn stream(master: u64, path: &[u64]) -> SimRng {
    SimRng::seed_from_u64(derive_seed(master, path))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    #[test]
    fn paths_are_distinct() {
        let a = derive_seed(7, &[1]);
        let b = derive_seed(7, &[1, 0]);
        let c = derive_seed(7, &[0, 1]);
        let d = derive_seed(8, &[1]);
        assert!(a != b && a != c && b != c && a != d);
    }

    #[test]
    fn streams_are_reproducible() {
        let x: u64 = stream(42, &[3, 4]).random();
        let y: u64 = stream(42, &[3, 4]).random();
        assert_eq!(x, y);
    }
}
