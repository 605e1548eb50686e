//! Deterministic lower-bound inputs.

use crate::model::{NeedMode, SizeMode, Slot, Trace};

fn empty(k: u32) -> Trace {
    Trace::empty(k, NeedMode::PowerOfTwo, SizeMode::Unit)
}

fn push_units(trace: &mut Trace, slot: Slot, count: u32) {
    for _ in 0..count {
        trace.push(slot, 1, 1);
    }
}

/// K/2 unit-need jobs at slot 1 and one need-K job in each of slots `1..=t`.
pub fn sfa_lb_trace(k: u32, t: u32) -> Trace {
    let mut trace = empty(k);
    push_units(&mut trace, 1, k / 2);
    for s in 1..=t {
        trace.push(s, 1, k);
    }
    trace
}

/// K/2 unit-need jobs at every odd slot up to `t` and two need-K jobs in
/// every slot `1..=t`.
pub fn sfa_gap_trace(k: u32, t: u32) -> Trace {
    let mut trace = empty(k);
    for s in 1..=t {
        if s % 2 == 1 {
            push_units(&mut trace, s, k / 2);
        }
        trace.push(s, 1, k);
        trace.push(s, 1, k);
    }
    trace
}

/// Odd slots `2ℓ+1` bring one need-K and two need-K/4 jobs, even slots
/// `2ℓ+2` bring two need-K/4 jobs (`ℓ < l1`); then two need-K/2 jobs arrive
/// at each slot `2·l1 + n`, `n < l2`.
pub fn greedy_lb_trace(k: u32, l1: u32, l2: u32) -> Trace {
    let mut trace = empty(k);
    for l in 0..l1 {
        trace.push(2 * l + 1, 1, k);
        trace.push(2 * l + 1, 1, k / 4);
        trace.push(2 * l + 1, 1, k / 4);
        trace.push(2 * l + 2, 1, k / 4);
        trace.push(2 * l + 2, 1, k / 4);
    }
    for n in 0..l2 {
        trace.push(2 * l1 + n, 1, k / 2);
        trace.push(2 * l1 + n, 1, k / 2);
    }
    trace
}

/// Quiet stretch of `gap` slots after `end`, then two need-K/2 jobs in each
/// of the following `l` slots.
pub fn append_drain_tail(trace: &mut Trace, end: Slot, gap: u32, l: u32) {
    let k = trace.k();
    for i in 1..=l {
        let s = end + gap + i;
        trace.push(s, 1, k / 2);
        trace.push(s, 1, k / 2);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::validate_trace;

    fn at(trace: &Trace, s: Slot) -> Vec<u32> {
        trace.arrivals_at(s).map(|j| j.need).collect()
    }

    #[test]
    fn sfa_lb_shape() {
        let t = sfa_lb_trace(8, 3);
        assert_eq!(t.len(), 7);
        assert_eq!(at(&t, 1), vec![1, 1, 1, 1, 8]);
        assert_eq!(at(&t, 2), vec![8]);
        assert_eq!(at(&t, 3), vec![8]);
        let t = sfa_lb_trace(2, 1);
        assert_eq!(at(&t, 1), vec![1, 2]);
        for (k, tt) in [(4, 7), (16, 20), (32, 1)] {
            assert_eq!(sfa_lb_trace(k, tt).len() as u32, k / 2 + tt);
        }
    }

    #[test]
    fn sfa_gap_shape() {
        let t = sfa_gap_trace(8, 3);
        assert_eq!(at(&t, 1), vec![1, 1, 1, 1, 8, 8]);
        assert_eq!(at(&t, 2), vec![8, 8]);
        assert_eq!(at(&t, 3), vec![1, 1, 1, 1, 8, 8]);
    }

    #[test]
    fn greedy_lb_shape() {
        let t = greedy_lb_trace(8, 2, 2);
        assert_eq!(t.len(), 14);
        assert_eq!(at(&t, 1), vec![8, 2, 2]);
        assert_eq!(at(&t, 2), vec![2, 2]);
        assert_eq!(at(&t, 4), vec![2, 2, 4, 4]);
        assert_eq!(at(&t, 5), vec![4, 4]);
        assert_eq!(t.last_arrival(), Some(5));
    }

    #[test]
    fn drain_tail() {
        let mut t = sfa_lb_trace(8, 2);
        append_drain_tail(&mut t, 2, 3, 2);
        assert_eq!(at(&t, 6), vec![4, 4]);
        assert_eq!(at(&t, 7), vec![4, 4]);
        assert!(at(&t, 5).is_empty());
    }

    #[test]
    fn all_valid() {
        for t in [sfa_lb_trace(16, 5), sfa_gap_trace(16, 5), greedy_lb_trace(16, 3, 4)] {
            assert!(validate_trace(&t).is_empty());
        }
    }
}
