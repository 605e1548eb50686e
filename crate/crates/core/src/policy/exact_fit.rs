//! Exact-fit subset search for power-of-two needs.

/// Node cap for the backtracking fallback.
pub const DEFAULT_NODE_BUDGET: u64 = 1 << 20;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SearchInconclusive;

/// Indices of a subset of `needs` summing to exactly `k`, if one exists.
///
/// Largest-first greedy settles every power-of-two input; backtracking covers
/// whatever the greedy pass misses.
pub fn exact_fit_subset(needs: &[u32], k: u32) -> Option<Vec<usize>> {
    exact_fit_subset_bounded(needs, k, DEFAULT_NODE_BUDGET).unwrap_or(None)
}

/// As [`exact_fit_subset`] but reports when the search budget runs out.
pub fn exact_fit_subset_bounded(
    needs: &[u32],
    k: u32,
    budget: u64,
) -> Result<Option<Vec<usize>>, SearchInconclusive> {
    let target = u64::from(k);
    let mut order: Vec<usize> = (0..needs.len()).collect();
    order.sort_by_key(|&i| std::cmp::Reverse(needs[i]));

    let mut picked = Vec::new();
    let mut sum = 0u64;
    for &i in &order {
        let s = u64::from(needs[i]);
        if sum + s <= target {
            sum += s;
            picked.push(i);
        }
    }
    if sum == target {
        picked.sort_unstable();
        return Ok(Some(picked));
    }
    let total: u64 = needs.iter().map(|&s| u64::from(s)).sum();
    if total < target {
        return Ok(None);
    }

    // suffix sums for pruning
    let mut suffix = vec![0u64; order.len() + 1];
    for p in (0..order.len()).rev() {
        suffix[p] = suffix[p + 1] + u64::from(needs[order[p]]);
    }
    let mut nodes = 0u64;
    let mut stack = Vec::new();
    match backtrack(needs, &order, &suffix, 0, target, &mut stack, &mut nodes, budget) {
        Some(true) => {
            stack.sort_unstable();
            Ok(Some(stack))
        }
        Some(false) => Ok(None),
        None => Err(SearchInconclusive),
    }
}

#[allow(clippy::too_many_arguments)]
fn backtrack(
    needs: &[u32],
    order: &[usize],
    suffix: &[u64],
    pos: usize,
    left: u64,
    stack: &mut Vec<usize>,
    nodes: &mut u64,
    budget: u64,
) -> Option<bool> {
    *nodes += 1;
    if *nodes > budget {
        return None;
    }
    if left == 0 {
        return Some(true);
    }
    if pos == order.len() || suffix[pos] < left {
        return Some(false);
    }
    let i = order[pos];
    let s = u64::from(needs[i]);
    if s <= left {
        stack.push(i);
        if backtrack(needs, order, suffix, pos + 1, left - s, stack, nodes, budget)? {
            return Some(true);
        }
        stack.pop();
    }
    // skip every remaining copy of this value; taking a later copy instead is symmetric
    let mut next = pos + 1;
    while next < order.len() && needs[order[next]] == needs[i] {
        next += 1;
    }
    backtrack(needs, order, suffix, next, left, stack, nodes, budget)
}
