//! Seeded, counter-based random streams.
//!
//! A run is identified by `(master_seed, cell, run)`; these three words are
//! packed verbatim into the ChaCha8 key, so distinct triples never share a
//! key. Within a run every agent owns one ChaCha stream per [`Purpose`], so
//! the draws an agent consumes for one purpose never shift the draws it
//! consumes for another. That keeps e.g. mutation noise identical between a
//! variant that selects partners and one that does not.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type Rng = ChaCha8Rng;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct RunKey {
    pub master_seed: u64,
    pub cell: u64,
    pub run: u64,
}

impl RunKey {
    pub fn new(master_seed: u64, cell: u64, run: u64) -> Self {
        Self { master_seed, cell, run }
    }

    fn key(&self) -> [u8; 32] {
        let mut k = [0u8; 32];
        k[0..8].copy_from_slice(&self.master_seed.to_le_bytes());
        k[8..16].copy_from_slice(&self.cell.to_le_bytes());
        k[16..24].copy_from_slice(&self.run.to_le_bytes());
        k[24..32].copy_from_slice(b"netee-v1");
        k
    }

    pub fn stream(&self, agent: usize, purpose: Purpose) -> Rng {
        let mut rng = ChaCha8Rng::from_seed(self.key());
        rng.set_stream((agent as u64) << 2 | purpose as u64);
        rng
    }

    pub fn agent_streams(&self, agent: usize) -> AgentRng {
        AgentRng {
            select: self.stream(agent, Purpose::Select),
            crossover: self.stream(agent, Purpose::Crossover),
            mutate: self.stream(agent, Purpose::Mutate),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[repr(u64)]
pub enum Purpose {
    Init = 0,
    Select = 1,
    Crossover = 2,
    Mutate = 3,
}

/// The per-agent random state carried across generations.
#[derive(Debug, Clone, PartialEq)]
pub struct AgentRng {
    /// Random-partner draws.
    pub select: Rng,
    /// Crossover-probability gate, then per-gene uniform-crossover draws.
    pub crossover: Rng,
    pub mutate: Rng,
}

/// Plain seeded generator for data synthesis and shuffles.
pub fn seeded(seed: u64) -> Rng {
    ChaCha8Rng::seed_from_u64(seed)
}
