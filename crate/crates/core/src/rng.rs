//! Seed threading. Every random choice draws from a ChaCha stream keyed by
//! the run seed and a label, so sub-computations replay independently.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Mixes a seed with a label (FNV-1a over the label, then splitmix64).
pub fn derive_seed(seed: u64, label: &str) -> u64 {
    let mut h: u64 = 0xcbf29ce484222325;
    for b in label.bytes() {
        h ^= b as u64;
        h = h.wrapping_mul(0x100000001b3);
    }
    splitmix(seed ^ h)
}

fn splitmix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e3779b97f4a7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
    z ^ (z >> 31)
}

pub fn seeded(seed: u64, label: &str) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(derive_seed(seed, label))
}

/// Seed for attempt number `attempt` of a retried construction.
pub fn attempt_seed(seed: u64, label: &str, attempt: usize) -> u64 {
    derive_seed(seed, &format!("{label}#{attempt}"))
}
