//! Counter-based seed streams.
//!
//! Every random trial draws from its own ChaCha stream keyed by
//! `(master, domain, index)`, so results do not depend on the order in which
//! trials are scheduled.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Domains separate the streams used by unrelated samplers under one master seed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[repr(u64)]
pub enum Domain {
    States = 1,
    Maps = 2,
    Search = 3,
    Bases = 4,
    Matrices = 5,
    Probes = 6,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SeedStream {
    master: u64,
}

impl SeedStream {
    pub fn new(master: u64) -> Self {
        Self { master }
    }

    pub fn master(&self) -> u64 {
        self.master
    }

    pub fn rng(&self, domain: Domain, index: u64) -> ChaCha8Rng {
        let mut seed = [0u8; 32];
        seed[..8].copy_from_slice(&self.master.to_le_bytes());
        seed[8..16].copy_from_slice(&(domain as u64).to_le_bytes());
        seed[16..24].copy_from_slice(&index.to_le_bytes());
        ChaCha8Rng::from_seed(seed)
    }

    /// Derives an independent child stream, e.g. one per trial of an outer loop.
    pub fn child(&self, domain: Domain, index: u64) -> SeedStream {
        use rand::RngCore;
        SeedStream::new(self.rng(domain, index).next_u64())
    }
}
