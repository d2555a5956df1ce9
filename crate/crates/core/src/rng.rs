//! Counter-based random streams.
//!
//! Every random draw in the lab comes from a ChaCha20 stream keyed by a 64-bit seed and a
//! 64-bit stream id. Stream ids carry `(trial, slot)` so that samples never depend on the
//! order in which trials or unitaries are generated.

use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;

pub type LabRng = ChaCha20Rng;

/// Slot reserved for the spectral engine's start vectors within a trial.
pub const SPECTRAL_SLOT: u32 = u32::MAX;

/// The stream for `(seed, trial, slot)`.
pub fn stream(seed: u64, trial: u32, slot: u32) -> LabRng {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    rng.set_stream(((trial as u64) << 32) | slot as u64);
    rng
}

/// A stream for one-off use, e.g. tests and examples.
pub fn seeded(seed: u64) -> LabRng {
    ChaCha20Rng::seed_from_u64(seed)
}
