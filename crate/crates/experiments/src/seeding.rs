//! Deterministic per-trial random streams.
//!
//! Every Monte-Carlo trial gets its own ChaCha stream keyed by
//! `(master_seed, study, cell, trial)`, so results are independent of how
//! trials are scheduled across worker threads and identical for any worker
//! count.

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Builds the RNG for one trial of one grid cell of one study.
///
/// The four indices are packed little-endian into the 32-byte ChaCha key,
/// so distinct coordinates can never collide.
pub fn trial_rng(master_seed: u64, study: u64, cell: u64, trial: u64) -> ChaCha8Rng {
    let mut key = [0u8; 32];
    for (slot, word) in [master_seed, study, cell, trial].into_iter().enumerate() {
        key[slot * 8..(slot + 1) * 8].copy_from_slice(&word.to_le_bytes());
    }
    ChaCha8Rng::from_seed(key)
}
