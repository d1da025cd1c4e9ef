//! Seed derivation for reproducible, order-independent sampling.
//!
//! Every task (job, replication, restart) gets its own generator seeded from
//! `(master seed, stream, index)`, so results do not depend on the order in
//! which tasks are run.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type TaskRng = ChaCha8Rng;

fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9e37_79b9_7f4a_7c15);
    x = (x ^ (x >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    x ^ (x >> 31)
}

/// Mixes a master seed with a stream tag and task index.
pub fn derive(master: u64, stream: u64, index: u64) -> u64 {
    splitmix64(splitmix64(splitmix64(master) ^ stream) ^ index)
}

pub fn task_rng(master: u64, stream: u64, index: u64) -> TaskRng {
    TaskRng::seed_from_u64(derive(master, stream, index))
}

/// Stream tags, one per kind of task.
pub mod stream {
    pub const JOB: u64 = 1;
    pub const DRIFT: u64 = 2;
    pub const RESTART: u64 = 3;
    pub const REPLICATION: u64 = 4;
}
