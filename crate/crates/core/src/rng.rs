//! Seeded random streams.
//!
//! Every random draw in the crate comes from a ChaCha8 stream addressed by a
//! `(seed, stream)` pair. ChaCha is counter based, so stream `i` of a seed is
//! independent of how many draws other streams made; trials that run in
//! parallel are therefore reproducible bit for bit.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::linalg::C64;

pub type Rng = ChaCha8Rng;

/// Stream ids at or above this value are reserved for internal sub-streams
/// (e.g. coefficient draws in a trial that also draws points).
pub const AUX_STREAM_BASE: u64 = 1 << 48;

pub fn stream(seed: u64, stream: u64) -> Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Standard complex Gaussian with independent `N(0, 1)` parts.
pub fn complex_gaussian(r: &mut Rng) -> C64 {
    let re: f64 = StandardNormal.sample(r);
    let im: f64 = StandardNormal.sample(r);
    C64::new(re, im)
}

/// `v` distinct indices below `n`, uniformly, sorted.
pub fn random_support(r: &mut Rng, n: usize, v: usize) -> Vec<usize> {
    let mut s = rand::seq::index::sample(r, n, v.min(n)).into_vec();
    s.sort_unstable();
    s
}
