//! Named random sub-streams derived from the single run seed.
//!
//! Each concern draws from its own ChaCha stream, so adding channel noise or
//! switching strategy never perturbs target placement or trajectories.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[repr(u64)]
pub enum Stream {
    Topology = 1,
    Mobility = 2,
    Channel = 3,
    Loss = 4,
}

pub type SimRng = ChaCha8Rng;

pub fn stream(seed: u64, which: Stream) -> SimRng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(which as u64);
    rng
}
