//! Seeded random streams.
//!
//! Every Monte Carlo replica draws from its own ChaCha8 stream: replica `r`
//! of seed `s` uses key `s` and stream id `r`. ChaCha is counter based, so
//! streams are disjoint and results do not depend on how replicas are
//! scheduled across threads.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type ReplicaRng = ChaCha8Rng;

/// Stream `replica` of the generator keyed by `seed`.
pub fn replica_rng(seed: u64, replica: u64) -> ReplicaRng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(replica);
    rng
}

/// Derives a sub-seed for a named stage of an experiment so that stages
/// sharing a top-level seed stay independent.
pub fn derive_seed(seed: u64, stage: u64) -> u64 {
    // splitmix64 finalizer
    let mut z = seed ^ stage.wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Splits `total` work items into fixed blocks of `block` items, runs
/// `work(rng, block_index, items)` on each block in parallel with stream
/// `block_index` of `seed`, and returns the per-block results in block
/// order. The output does not depend on the number of worker threads.
pub fn run_blocks<A, F>(total: u64, block: u64, seed: u64, work: F) -> Vec<A>
where
    A: Send,
    F: Fn(&mut ReplicaRng, u64, u64) -> A + Sync,
{
    use rayon::prelude::*;
    assert!(block > 0, "block size must be positive");
    let blocks = total.div_ceil(block);
    (0..blocks)
        .into_par_iter()
        .map(|b| {
            let items = block.min(total - b * block);
            let mut rng = replica_rng(seed, b);
            work(&mut rng, b, items)
        })
        .collect()
}

/// Runs `work(state, rng, r)` for every replica `r` in parallel, each with
/// stream `r` of `seed`. `init` builds reusable per-thread scratch state.
/// Results come back in replica order.
pub fn run_replicas<S, A, I, F>(replicas: u64, seed: u64, init: I, work: F) -> Vec<A>
where
    A: Send,
    I: Fn() -> S + Sync,
    F: Fn(&mut S, &mut ReplicaRng, u64) -> A + Sync,
{
    use rayon::prelude::*;
    (0..replicas)
        .into_par_iter()
        .map_init(&init, |state, r| {
            let mut rng = replica_rng(seed, r);
            work(state, &mut rng, r)
        })
        .collect()
}
