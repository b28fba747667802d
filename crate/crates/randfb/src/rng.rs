//! Deterministic seed derivation for reproducible substreams.
//!
//! Every randomized component of the crate draws from a generator obtained
//! through [`substream`], keyed by a root seed and a path of indices
//! (domain tag, grid index, trial index, ...). Results therefore depend
//! only on the seed and the logical position of the draw, never on
//! execution order or thread count.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Derives a child seed from a root seed and a path of indices.
pub fn derive_seed(seed: u64, path: &[u64]) -> u64 {
    let mut state = splitmix64(seed ^ 0xA076_1D64_78BD_642F);
    for &p in path {
        state = splitmix64(state ^ splitmix64(p.wrapping_add(0x8EBC_6AF0_9C88_C6E3)));
    }
    state
}

/// Seeded generator for the substream identified by `path` under `seed`.
pub fn substream(seed: u64, path: &[u64]) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(derive_seed(seed, path))
}

/// Domain tags keeping unrelated substreams apart even at equal seeds.
pub(crate) mod domain {
    pub const BROWNIAN: u64 = 1;
    pub const FILTER: u64 = 2;
    pub const CHI2_TRIAL: u64 = 3;
    pub const ENERGY_TRIAL: u64 = 4;
    pub const DEVIATION_TRIAL: u64 = 5;
    pub const FRAME_TRIAL: u64 = 6;
    pub const CONDITION_TRIAL: u64 = 7;
    pub const FRAME_SANDWICH: u64 = 8;
}
