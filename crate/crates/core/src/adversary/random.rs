//! Seeded random inputs.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::model::{NeedMode, SizeMode, Slot, Trace};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Each slot `1..=t` independently brings, with probability `p`, K/2
/// unit-need jobs plus one need-K job, and otherwise just one need-K job.
pub fn rand_lb_trace(k: u32, t: u32, p: f64, seed: u64) -> Trace {
    let mut rng = rng(seed);
    let mut trace = Trace::empty(k, NeedMode::PowerOfTwo, SizeMode::Unit);
    for s in 1..=t {
        if rng.random_bool(p.clamp(0.0, 1.0)) {
            for _ in 0..k / 2 {
                trace.push(s, 1, 1);
            }
        }
        trace.push(s, 1, k);
    }
    trace
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum NeedDist {
    /// Uniform over `{1, 2, 4, …, K}`.
    UniformPow2,
    /// Need K with probability `p`; otherwise uniform over the smaller powers.
    Spike(f64),
}

impl NeedDist {
    pub fn sample<R: Rng>(&self, k: u32, rng: &mut R) -> u32 {
        let levels = k.trailing_zeros() + 1;
        match *self {
            NeedDist::UniformPow2 => 1 << rng.random_range(0..levels),
            NeedDist::Spike(p) => {
                if levels == 1 || rng.random_bool(p.clamp(0.0, 1.0)) {
                    k
                } else {
                    1 << rng.random_range(0..levels - 1)
                }
            }
        }
    }
}

/// `arr · horizon` unit-size jobs with i.i.d. uniform arrival slots in
/// `[1, horizon]`.
pub fn stochastic_trace(k: u32, arr: u32, horizon: u32, dist: NeedDist, seed: u64) -> Trace {
    let mut rng = rng(seed);
    let n = arr as usize * horizon as usize;
    let mut jobs: Vec<(Slot, u32)> = (0..n)
        .map(|_| {
            let a = rng.random_range(1..=horizon.max(1));
            (a, dist.sample(k, &mut rng))
        })
        .collect();
    jobs.sort_by_key(|j| j.0);
    Trace::unit(k, jobs)
}
