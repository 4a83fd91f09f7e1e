//! Random number generator plumbing.
//!
//! Every stochastic routine in the crate is driven by [`ChainRng`] seeded
//! from a caller-supplied `u64`, so identical seeds give identical results
//! on every platform. Independent substreams (one per matrix row, per
//! replicate, per posterior draw) are derived with [`derive_seed`], which
//! lets row updates run in parallel while producing bit-identical output to
//! the sequential schedule.

use rand::SeedableRng;

/// The deterministic generator used throughout the crate.
pub type ChainRng = rand_chacha::ChaCha8Rng;

/// Derive an independent substream seed from a master seed and stream index.
///
/// SplitMix64 finalizer applied to `master + golden_gamma * (stream + 1)`;
/// the +1 keeps stream 0 from echoing the master seed itself.
pub fn derive_seed(master: u64, stream: u64) -> u64 {
    let mut z = master.wrapping_add(0x9E37_79B9_7F4A_7C15u64.wrapping_mul(stream.wrapping_add(1)));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Generator for the given substream of a master seed.
pub fn substream(master: u64, stream: u64) -> ChainRng {
    ChainRng::seed_from_u64(derive_seed(master, stream))
}
