//! Counter-based, splittable randomness.
//!
//! Every random quantity attached to a vertex is a pure function of
//! `(seed, stream, path from the root)`. A vertex key is derived from its
//! parent's key and its sibling index with the SplitMix64 finalizer, so the
//! value seen at a vertex never depends on the order in which the tree is
//! visited, on the truncation depth, or on how work is split across threads.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub(crate) const GOLDEN_GAMMA: u64 = 0x9e37_79b9_7f4a_7c15;

/// Stream tags. Distinct tags give independent families of keys.
pub mod stream {
    pub const GW_SHAPE: u64 = 0x4757_5f53_4841_5045;
    pub const ENVIRONMENT: u64 = 0x454e_565f_4100_0001;
    pub const PASSAGE: u64 = 0x4650_505f_5800_0002;
    pub const PERCOLATION: u64 = 0x5045_5243_0000_0003;
    pub const WALK: u64 = 0x5741_4c4b_0000_0004;
    pub const POPULATION: u64 = 0x504f_5044_594e_0005;
    pub const REPLICATE: u64 = 0x5245_504c_0000_0006;
    pub const CONDITIONING: u64 = 0x434f_4e44_0000_0007;
}

/// SplitMix64 output function.
#[inline]
pub fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Key of the root vertex for a given seed and stream.
#[inline]
pub fn root_key(seed: u64, stream: u64) -> u64 {
    mix64(seed ^ mix64(stream.wrapping_add(GOLDEN_GAMMA)))
}

/// Key of the `index`-th child of a vertex with key `parent`.
#[inline]
pub fn child_key(parent: u64, index: usize) -> u64 {
    mix64(parent.wrapping_add(GOLDEN_GAMMA.wrapping_mul(index as u64 + 1)))
}

/// Uniform draw in `[0, 1)` carried by a key (53 high bits).
#[inline]
pub fn unit(key: u64) -> f64 {
    (key >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

/// Derived seed for replicate or trial `index` of an experiment.
#[inline]
pub fn derive(seed: u64, stream: u64, index: u64) -> u64 {
    child_key(root_key(seed, stream), index as usize)
}

/// Sequential generator for walks and population dynamics.
pub fn sequential(seed: u64, stream: u64, index: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(derive(seed, stream, index))
}
