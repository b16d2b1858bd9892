//! Random streams.
//!
//! One root seed fans out into independent ChaCha8 streams, one per
//! (purpose, user) pair, selected with the cipher's stream id. Uniform
//! variates are built directly from raw 64-bit outputs so that sequences do
//! not depend on any distribution code outside this module. The generator
//! crate is pinned to an exact version in the manifest; golden files rely on
//! that.

use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub type SimRng = ChaCha8Rng;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stream {
    Mobility = 0,
    Channel = 1,
    /// Walkers used by the distance-distribution diagnostic.
    Probe = 2,
}

pub fn substream(seed: u64, stream: Stream, index: u64) -> SimRng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(((stream as u64) << 32) | (index & 0xffff_ffff));
    rng
}

/// Uniform on [0, 1) with 53 bits of precision.
pub fn uniform01<R: RngCore + ?Sized>(rng: &mut R) -> f64 {
    (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

/// Uniform on [lo, hi). Returns `lo` exactly when the interval is degenerate.
pub fn uniform<R: RngCore + ?Sized>(rng: &mut R, lo: f64, hi: f64) -> f64 {
    lo + (hi - lo) * uniform01(rng)
}
