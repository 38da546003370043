//! Counter-based random streams.
//!
//! Every random draw in this crate is keyed by `(domain, a, b, c)`; the key
//! is packed injectively into a ChaCha8 seed. Distinct keys give independent
//! streams, so samplers are pure functions of their key and can run
//! concurrently without shared state.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub const DOMAIN_EDGE_WEIGHTS: u64 = 0x464c_4950_0001;
pub const DOMAIN_SPIN_INIT: u64 = 0x464c_4950_0002;
pub const DOMAIN_PIVOT: u64 = 0x464c_4950_0003;
pub const DOMAIN_WORD_CHUNK: u64 = 0x464c_4950_0004;

pub fn keyed_rng(domain: u64, a: u64, b: u64, c: u64) -> ChaCha8Rng {
    let mut seed = [0u8; 32];
    seed[0..8].copy_from_slice(&domain.to_le_bytes());
    seed[8..16].copy_from_slice(&a.to_le_bytes());
    seed[16..24].copy_from_slice(&b.to_le_bytes());
    seed[24..32].copy_from_slice(&c.to_le_bytes());
    ChaCha8Rng::from_seed(seed)
}
