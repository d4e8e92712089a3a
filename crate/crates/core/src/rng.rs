//! Seed derivation and stream construction.
//!
//! Every random quantity in the crate flows from a `u64` seed through
//! ChaCha8. Replication streams are derived from
//! `(master_seed, scenario_id, replication_index)` with a splitmix64-based
//! mix, so runs are order-independent and per-replication replay needs only
//! the derived seed.

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// splitmix64 step: advances `state` and returns the next output word.
pub fn splitmix64(state: &mut u64) -> u64 {
    *state = state.wrapping_add(0x9E37_79B9_7F4A_7C15);
    let mut z = *state;
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

fn fnv1a(bytes: &[u8]) -> u64 {
    let mut h = 0xcbf2_9ce4_8422_2325u64;
    for &b in bytes {
        h ^= b as u64;
        h = h.wrapping_mul(0x0000_0100_0000_01B3);
    }
    h
}

/// Stable seed for one replication of one scenario.
pub fn replication_seed(master_seed: u64, scenario_id: &str, replication: u64) -> u64 {
    let mut state = master_seed
        ^ fnv1a(scenario_id.as_bytes()).rotate_left(17)
        ^ replication.wrapping_mul(0x9E37_79B9_7F4A_7C15);
    splitmix64(&mut state);
    splitmix64(&mut state)
}

/// Domain-separated sub-seed, e.g. independent streams for design, signal
/// and noise within one replication.
pub fn stream_seed(base: u64, label: &str) -> u64 {
    let mut state = base ^ fnv1a(label.as_bytes());
    splitmix64(&mut state);
    splitmix64(&mut state)
}

/// Expands a `u64` seed into a ChaCha8 generator without relying on
/// `seed_from_u64` internals: the 256-bit key is a splitmix64 chain.
pub fn rng_from_seed(seed: u64) -> ChaCha8Rng {
    let mut state = seed;
    let mut key = [0u8; 32];
    for chunk in key.chunks_exact_mut(8) {
        chunk.copy_from_slice(&splitmix64(&mut state).to_le_bytes());
    }
    ChaCha8Rng::from_seed(key)
}
