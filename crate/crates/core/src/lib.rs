//! Semantic coded transmission simulator: importance-aware image coding over
//! a fading OFDM-like channel, with digital and analog chains, a classical
//! baseline and semantic error correction.

pub mod allocation;
pub mod analog;
pub mod correction;
pub mod digital;
pub mod error;
pub mod harness;
pub mod semantics;
pub mod source_io;

pub use error::{Error, Result};

/// Independent seed for sub-stream `stream` of a trial seeded with `base`
/// (SplitMix64 finalizer).
pub fn derive_seed(base: u64, stream: u64) -> u64 {
    let mut z = base ^ stream.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}
