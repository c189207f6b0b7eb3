//! Derivation of independent, reproducible random streams from a master seed.
//!
//! Every randomized operation in this crate draws from a stream derived from
//! `(master seed, label)`. Labels are short strings such as `"column/DOB"` or
//! `"iteration/3"`, so the stream consumed by one column, record, or retry is
//! independent of every other and of evaluation order. Derivation goes through
//! SHA-256, which keeps the byte output identical across platforms and
//! architectures.

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha20Rng;
use sha2::{Digest, Sha256};

fn derive_key(master_seed: u64, label: &str) -> [u8; 32] {
    let mut hasher = Sha256::new();
    hasher.update(master_seed.to_le_bytes());
    hasher.update([0x1f]); // separator so (seed, label) pairs cannot collide
    hasher.update(label.as_bytes());
    hasher.finalize().into()
}

/// A ChaCha20 stream keyed by `(master_seed, label)`.
pub fn rng_for(master_seed: u64, label: &str) -> ChaCha20Rng {
    ChaCha20Rng::from_seed(derive_key(master_seed, label))
}

/// A 64-bit sub-seed for `(master_seed, label)`, for handing a whole
/// sub-computation its own master seed.
pub fn subseed(master_seed: u64, label: &str) -> u64 {
    let key = derive_key(master_seed, label);
    u64::from_le_bytes(key[..8].try_into().unwrap())
}
