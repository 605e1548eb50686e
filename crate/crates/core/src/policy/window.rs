//! Job orderings and window sets.
//!
//! A window set `S_i` starts at rank `i` of an ordering and takes as many
//! consecutive jobs as fit in `K` servers. RA, RA-E and RA-Size all pick
//! among window sets; they differ only in the ordering and in what they do
//! with the leftover jobs.

use crate::engine::{Pending, SystemState};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OrderKey {
    /// `(need, arrival, id)`.
    ByNeed,
    /// `(remaining size × need, arrival, id)`.
    ByEffectiveSize,
}

pub fn order_jobs(state: &SystemState, key: OrderKey) -> Vec<&Pending> {
    let mut v: Vec<&Pending> = state.iter().collect();
    match key {
        OrderKey::ByNeed => v.sort_by_key(|p| (p.need(), p.arrival(), p.id())),
        OrderKey::ByEffectiveSize => {
            v.sort_by_key(|p| (p.effective_size(), p.arrival(), p.id()))
        }
    }
    v
}

/// Jobs in `(arrival, id)` order.
pub fn order_by_arrival(state: &SystemState) -> Vec<&Pending> {
    // the state iterates by id already; a stable sort keeps that as tie-break
    let mut v: Vec<&Pending> = state.iter().collect();
    v.sort_by_key(|p| p.arrival());
    v
}

/// Half-open rank range `[start, start + len)` of an ordering.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct WindowSet {
    pub start: usize,
    pub len: usize,
    pub need_sum: u64,
}

impl WindowSet {
    pub fn end(&self) -> usize {
        self.start + self.len
    }

    pub fn members<'a, 'p>(&self, ordered: &'a [&'p Pending]) -> &'a [&'p Pending] {
        &ordered[self.start..self.end()]
    }

    pub fn is_exact(&self, k: u32) -> bool {
        self.need_sum == u64::from(k)
    }
}

/// Lazily yields `S_1, S_2, …` with a two-pointer sweep; each step is
/// amortised O(1).
pub struct Windows<'a, 'p> {
    ordered: &'a [&'p Pending],
    k: u64,
    start: usize,
    end: usize,
    sum: u64,
}

impl Iterator for Windows<'_, '_> {
    type Item = WindowSet;

    fn next(&mut self) -> Option<WindowSet> {
        let n = self.ordered.len();
        if self.start >= n {
            return None;
        }
        if self.end < self.start {
            self.end = self.start;
            self.sum = 0;
        }
        while self.end < n && self.sum + u64::from(self.ordered[self.end].need()) <= self.k {
            self.sum += u64::from(self.ordered[self.end].need());
            self.end += 1;
        }
        let w = WindowSet {
            start: self.start,
            len: self.end - self.start,
            need_sum: self.sum,
        };
        if self.end > self.start {
            self.sum -= u64::from(self.ordered[self.start].need());
        }
        self.start += 1;
        Some(w)
    }
}

pub fn windows<'a, 'p>(ordered: &'a [&'p Pending], k: u32) -> Windows<'a, 'p> {
    Windows {
        ordered,
        k: u64::from(k),
        start: 0,
        end: 0,
        sum: 0,
    }
}

/// One window set per start rank.
pub fn window_sets(ordered: &[&Pending], k: u32) -> Vec<WindowSet> {
    windows(ordered, k).collect()
}

/// The window at the smallest start rank whose needs sum to exactly `k`.
pub fn first_exact_window(ordered: &[&Pending], k: u32) -> Option<WindowSet> {
    windows(ordered, k).find(|w| w.is_exact(k))
}

/// The maximal fitting prefix `S_1`, or an empty window.
pub fn leading_window(ordered: &[&Pending], k: u32) -> WindowSet {
    windows(ordered, k).next().unwrap_or(WindowSet {
        start: 0,
        len: 0,
        need_sum: 0,
    })
}

/// Remaining effective size `w'_j(t)` and its size class.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EffectiveSize {
    pub id: crate::model::JobId,
    pub effective: u64,
    /// `a` with `effective ∈ [2^a, 2^(a+1))`.
    pub class: u32,
}

pub fn size_class(effective: u64) -> u32 {
    debug_assert!(effective > 0);
    63 - effective.leading_zeros()
}

pub fn effective_size_view(state: &SystemState) -> Vec<EffectiveSize> {
    state
        .iter()
        .map(|p| {
            let effective = p.effective_size();
            EffectiveSize {
                id: p.id(),
                effective,
                class: size_class(effective),
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn state(needs: &[u32]) -> SystemState {
        SystemState::from_specs(1, needs.iter().map(|&s| (1, 1, s)))
    }

    fn spans(ws: &[WindowSet]) -> Vec<(usize, usize)> {
        ws.iter().map(|w| (w.start + 1, w.end())).collect()
    }

    #[test]
    fn orders_by_need_then_arrival() {
        let s = state(&[4, 1, 2, 1]);
        let needs: Vec<u32> = order_jobs(&s, OrderKey::ByNeed).iter().map(|p| p.need()).collect();
        assert_eq!(needs, vec![1, 1, 2, 4]);

        let s = SystemState::from_specs(3, [(3, 1, 2), (1, 1, 2)]);
        let ids: Vec<u32> = order_jobs(&s, OrderKey::ByNeed).iter().map(|p| p.id().0).collect();
        assert_eq!(ids, vec![1, 0]);
    }

    #[test]
    fn orders_by_effective_size() {
        let s = SystemState::from_specs(1, [(1, 1, 4), (1, 2, 1)]);
        let ids: Vec<u32> = order_jobs(&s, OrderKey::ByEffectiveSize)
            .iter()
            .map(|p| p.id().0)
            .collect();
        assert_eq!(ids, vec![1, 0]);
    }

    #[test]
    fn six_window_sets_of_first_ra_example() {
        let s = state(&[1, 1, 1, 1, 2, 4]);
        let o = order_jobs(&s, OrderKey::ByNeed);
        let ws = window_sets(&o, 8);
        assert_eq!(spans(&ws), vec![(1, 5), (2, 5), (3, 6), (4, 6), (5, 6), (6, 6)]);
        assert_eq!(first_exact_window(&o, 8).unwrap().start, 2);
    }

    #[test]
    fn window_sets_of_second_ra_example() {
        let s = state(&[1, 1, 1, 1, 2, 8]);
        let o = order_jobs(&s, OrderKey::ByNeed);
        let ws = window_sets(&o, 8);
        assert_eq!(ws.len(), 6);
        assert_eq!(spans(&ws)[2], (3, 5));
        assert_eq!(spans(&ws)[5], (6, 6));
        assert_eq!(first_exact_window(&o, 8).unwrap().start, 5);
    }

    #[test]
    fn single_full_width_job() {
        let s = state(&[8]);
        let o = order_jobs(&s, OrderKey::ByNeed);
        let ws = window_sets(&o, 8);
        assert_eq!(ws, vec![WindowSet { start: 0, len: 1, need_sum: 8 }]);
    }

    #[test]
    fn size_classes_are_half_open() {
        assert_eq!(size_class(1), 0);
        assert_eq!(size_class(2), 1);
        assert_eq!(size_class(3), 1);
        assert_eq!(size_class(4), 2);
        assert_eq!(size_class(7), 2);
        let s = SystemState::from_specs(1, [(1, 3, 2)]);
        assert_eq!(effective_size_view(&s)[0].class, 2);
    }
}
