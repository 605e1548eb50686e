//! Test-only reference implementations, written independently of the crate's
//! search code, plus shared proptest strategies.

#![allow(dead_code)]

use mjsched::model::{NeedMode, SizeMode, Trace};
use proptest::prelude::*;

/// Minimum total flow by assigning each job an explicit set of service
/// slots. Jobs are placed one at a time into a per-slot load table; a job of
/// size `w` arriving at `a` takes `w` distinct slots `≥ a` and pays
/// `last − a + 1`. Plain branch and bound, no memo.
pub fn brute_opt(trace: &Trace) -> u64 {
    let jobs: Vec<(u32, u32, u32)> = trace.jobs().iter().map(|j| (j.arrival, j.size, j.need)).collect();
    if jobs.is_empty() {
        return 0;
    }
    let last = jobs.iter().map(|j| j.0).max().unwrap();
    let total: u32 = jobs.iter().map(|j| j.1).sum();
    let horizon = (last + total) as usize;
    let mut load = vec![0u32; horizon + 1];
    let mut best = u64::MAX;
    place(&jobs, 0, trace.k(), &mut load, 0, &mut best);
    best
}

fn place(jobs: &[(u32, u32, u32)], i: usize, k: u32, load: &mut [u32], cost: u64, best: &mut u64) {
    if i == jobs.len() {
        *best = (*best).min(cost);
        return;
    }
    let lower: u64 = jobs[i..].iter().map(|j| u64::from(j.1)).sum();
    if cost + lower >= *best {
        return;
    }
    let (a, w, s) = jobs[i];
    let mut chosen = Vec::with_capacity(w as usize);
    choose(jobs, i, k, load, cost, best, a as usize, w, s, a, &mut chosen);
}

#[allow(clippy::too_many_arguments)]
fn choose(
    jobs: &[(u32, u32, u32)],
    i: usize,
    k: u32,
    load: &mut [u32],
    cost: u64,
    best: &mut u64,
    from: usize,
    left: u32,
    need: u32,
    arrival: u32,
    chosen: &mut Vec<usize>,
) {
    if left == 0 {
        let last = *chosen.last().unwrap() as u64;
        place(jobs, i + 1, k, load, cost + last - u64::from(arrival) + 1, best);
        return;
    }
    for t in from..load.len() {
        if load.len() - t < left as usize {
            break;
        }
        if load[t] + need > k {
            continue;
        }
        load[t] += need;
        chosen.push(t);
        choose(jobs, i, k, load, cost, best, t + 1, left - 1, need, arrival, chosen);
        chosen.pop();
        load[t] -= need;
    }
}

/// Whether every job can run from its arrival without interruption.
pub fn serves_immediately(trace: &Trace) -> bool {
    let mut load = std::collections::BTreeMap::<u32, u32>::new();
    for j in trace.jobs() {
        for t in j.arrival..j.arrival + j.size {
            *load.entry(t).or_default() += j.need;
        }
    }
    load.values().all(|&l| l <= trace.k())
}

/// Every subset of `needs` as a bitmask, with its need sum.
pub fn subsets(needs: &[u32]) -> impl Iterator<Item = (u32, u64)> + '_ {
    (0u32..1 << needs.len()).map(move |m| {
        let sum = (0..needs.len())
            .filter(|i| m >> i & 1 == 1)
            .map(|i| u64::from(needs[i]))
            .sum();
        (m, sum)
    })
}

pub fn has_exact_subset(needs: &[u32], k: u32) -> bool {
    subsets(needs).any(|(_, s)| s == u64::from(k))
}

pub fn max_fitting_cardinality(needs: &[u32], k: u32) -> u32 {
    subsets(needs)
        .filter(|&(_, s)| s <= u64::from(k))
        .map(|(m, _)| m.count_ones())
        .max()
        .unwrap_or(0)
}

fn log2(k: u32) -> u32 {
    31 - k.leading_zeros()
}

/// Power-of-two unit trace on `k` servers.
pub fn unit_trace(k: u32, max_jobs: usize, max_arrival: u32) -> impl Strategy<Value = Trace> {
    prop::collection::vec((1..=max_arrival, 0..=log2(k)), 0..=max_jobs)
        .prop_map(move |v| Trace::unit(k, v.into_iter().map(|(a, e)| (a, 1 << e))))
}

/// Unit trace with any need in `[1, k]`.
pub fn general_trace(k: u32, max_jobs: usize, max_arrival: u32) -> impl Strategy<Value = Trace> {
    prop::collection::vec((1..=max_arrival, 1..=k), 0..=max_jobs).prop_map(move |v| {
        Trace::new(k, NeedMode::General, SizeMode::Unit, v.into_iter().map(|(a, s)| (a, 1, s)))
    })
}

/// Power-of-two weighted trace.
pub fn weighted_trace(k: u32, max_jobs: usize, max_arrival: u32, max_size: u32) -> impl Strategy<Value = Trace> {
    prop::collection::vec((1..=max_arrival, 1..=max_size, 0..=log2(k)), 0..=max_jobs).prop_map(move |v| {
        Trace::new(
            k,
            NeedMode::PowerOfTwo,
            SizeMode::Weighted,
            v.into_iter().map(|(a, w, e)| (a, w, 1 << e)),
        )
    })
}
