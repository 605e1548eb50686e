//! Slot-selection rules. Each is a pure function of the remaining set.

use crate::engine::{Pending, SystemState};
use crate::model::{JobId, SlotDecision};

use super::window::{first_exact_window, leading_window, order_by_arrival, order_jobs, OrderKey};

fn ids(jobs: &[&Pending]) -> Vec<JobId> {
    jobs.iter().map(|p| p.id()).collect()
}

/// Admits jobs in the given order while they still fit, skipping the ones
/// that do not.
fn admit_while_fits<'p>(jobs: impl IntoIterator<Item = &'p Pending>, capacity: u64) -> (Vec<JobId>, u64) {
    let mut used = 0u64;
    let mut out = Vec::new();
    for p in jobs {
        let s = u64::from(p.need());
        if used + s <= capacity {
            used += s;
            out.push(p.id());
        }
    }
    (out, used)
}

/// Window rule shared by RA and RA-Size: the earliest exact-fit window, else
/// the leading window.
fn window_rule(state: &SystemState, k: u32, key: OrderKey) -> SlotDecision {
    let ordered = order_jobs(state, key);
    let w = first_exact_window(&ordered, k).unwrap_or_else(|| leading_window(&ordered, k));
    SlotDecision::single(ids(w.members(&ordered)))
}

/// RA: smallest needs first, preferring windows that occupy all K servers.
pub fn ra_select(state: &SystemState, k: u32) -> SlotDecision {
    window_rule(state, k, OrderKey::ByNeed)
}

/// RA-Size: RA over the remaining-effective-size ordering.
pub fn ra_size_select(state: &SystemState, k: u32) -> SlotDecision {
    window_rule(state, k, OrderKey::ByEffectiveSize)
}

/// ServerFilling: take the shortest earliest-arrived prefix whose needs reach
/// K, then admit its jobs largest need first while they fit.
pub fn sfa_select(state: &SystemState, k: u32) -> SlotDecision {
    let by_arrival = order_by_arrival(state);
    let mut sum = 0u64;
    let mut cut = by_arrival.len();
    for (i, p) in by_arrival.iter().enumerate() {
        sum += u64::from(p.need());
        if sum >= u64::from(k) {
            cut = i + 1;
            break;
        }
    }
    let mut prefix: Vec<&Pending> = by_arrival[..cut].to_vec();
    prefix.sort_by_key(|p| (std::cmp::Reverse(p.need()), p.arrival(), p.id()));
    SlotDecision::single(admit_while_fits(prefix, u64::from(k)).0)
}

/// Greedy: the longest fitting prefix of the by-need ordering.
pub fn greedy_select(state: &SystemState, k: u32) -> SlotDecision {
    let ordered = order_jobs(state, OrderKey::ByNeed);
    let w = leading_window(&ordered, k);
    SlotDecision::single(ids(w.members(&ordered)))
}

/// RA-E on two K-server banks.
///
/// With an exact-fit window the reserved bank runs it and the free bank runs
/// the leading window of the leftover jobs. Otherwise the reserved bank runs
/// the leading window and the free bank runs the smallest job outside it.
pub fn rae_select(state: &SystemState, k: u32) -> SlotDecision {
    let ordered = order_jobs(state, OrderKey::ByNeed);
    match first_exact_window(&ordered, k) {
        Some(w) => {
            let rest: Vec<&Pending> = ordered[..w.start]
                .iter()
                .chain(&ordered[w.end()..])
                .copied()
                .collect();
            let free = leading_window(&rest, k);
            SlotDecision::split(ids(w.members(&ordered)), ids(free.members(&rest)))
        }
        None => {
            let lead = leading_window(&ordered, k);
            let free = ordered.get(lead.end()).map(|p| vec![p.id()]).unwrap_or_default();
            SlotDecision::split(ids(lead.members(&ordered)), free)
        }
    }
}

fn split_units(state: &SystemState) -> (Vec<&Pending>, Vec<&Pending>) {
    order_by_arrival(state).into_iter().partition(|p| p.need() == 1)
}

/// Waiting rule θ = 0: serve unit-need jobs as soon as any are present and
/// nothing else alongside them; otherwise first-come-first-served admission.
pub fn theta0_select(state: &SystemState, k: u32) -> SlotDecision {
    let (units, _) = split_units(state);
    if units.is_empty() {
        let (ids, _) = admit_while_fits(order_by_arrival(state), u64::from(k));
        SlotDecision::single(ids)
    } else {
        SlotDecision::single(ids(&units[..units.len().min(k as usize)]))
    }
}

/// Waiting rule θ = T: hold unit-need jobs until K of them can go together;
/// serve larger jobs first-come-first-served meanwhile.
pub fn theta_t_select(state: &SystemState, k: u32) -> SlotDecision {
    let (units, others) = split_units(state);
    if units.len() >= k as usize {
        SlotDecision::single(ids(&units[..k as usize]))
    } else if !others.is_empty() {
        SlotDecision::single(admit_while_fits(others, u64::from(k)).0)
    } else {
        SlotDecision::single(ids(&units))
    }
}

/// Serve every unit-need job immediately, then fill leftover capacity with
/// the other jobs in arrival order.
pub fn immediate_unit_select(state: &SystemState, k: u32) -> SlotDecision {
    let (units, others) = split_units(state);
    let take = units.len().min(k as usize);
    let mut chosen = ids(&units[..take]);
    let (fill, _) = admit_while_fits(others, u64::from(k) - take as u64);
    chosen.extend(fill);
    SlotDecision::single(chosen)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn state(needs: &[u32]) -> SystemState {
        SystemState::from_specs(1, needs.iter().map(|&s| (1, 1, s)))
    }

    fn needs_of(state: &SystemState, ids: &[JobId]) -> Vec<u32> {
        let mut v: Vec<u32> = ids.iter().map(|&i| state.get(i).unwrap().need()).collect();
        v.sort_unstable();
        v
    }

    fn raw(ids: &[JobId]) -> Vec<u32> {
        let mut v: Vec<u32> = ids.iter().map(|i| i.0).collect();
        v.sort_unstable();
        v
    }

    #[test]
    fn ra_first_example_takes_last_four() {
        let s = state(&[1, 1, 1, 1, 2, 4]);
        let d = ra_select(&s, 8);
        assert_eq!(raw(&d.reserved), vec![2, 3, 4, 5]);
        assert!(d.free.is_empty());
    }

    #[test]
    fn ra_second_example_takes_full_width_job() {
        let s = state(&[1, 1, 1, 1, 2, 8]);
        assert_eq!(raw(&ra_select(&s, 8).reserved), vec![5]);
    }

    #[test]
    fn ra_falls_back_to_leading_window() {
        let s = state(&[1, 1]);
        assert_eq!(raw(&ra_select(&s, 8).reserved), vec![0, 1]);
        assert!(ra_select(&SystemState::default(), 8).is_empty());
    }

    #[test]
    fn sfa_lower_bound_first_slot_serves_big_job() {
        let s = state(&[1, 1, 1, 1, 8]);
        assert_eq!(needs_of(&s, &sfa_select(&s, 8).reserved), vec![8]);
    }

    #[test]
    fn sfa_insufficient_work_serves_everything() {
        let s = state(&[1, 1, 1, 1]);
        assert_eq!(sfa_select(&s, 8).reserved.len(), 4);
    }

    #[test]
    fn sfa_fills_prefix_largest_first() {
        // arrivals in order: needs 1,1,2,4,8
        let s = SystemState::from_specs(5, [(1, 1, 1), (2, 1, 1), (3, 1, 2), (4, 1, 4), (5, 1, 8)]);
        let d = sfa_select(&s, 8);
        assert_eq!(raw(&d.reserved), vec![0, 1, 2, 3]);
        // admitted largest first
        assert_eq!(d.reserved, vec![JobId(3), JobId(2), JobId(0), JobId(1)]);
    }

    #[test]
    fn greedy_examples() {
        let s = state(&[1, 1, 2, 4, 8]);
        assert_eq!(needs_of(&s, &greedy_select(&s, 8).reserved), vec![1, 1, 2, 4]);
        let s = state(&[2, 2, 8]);
        assert_eq!(needs_of(&s, &greedy_select(&s, 8).reserved), vec![2, 2]);
        let s = state(&[8]);
        assert_eq!(greedy_select(&s, 8).reserved, vec![JobId(0)]);
    }

    #[test]
    fn rae_first_example() {
        let s = state(&[1, 1, 1, 1, 2, 4]);
        let d = rae_select(&s, 8);
        assert_eq!(raw(&d.reserved), vec![2, 3, 4, 5]);
        assert_eq!(raw(&d.free), vec![0, 1]);
    }

    #[test]
    fn rae_second_example() {
        let s = state(&[1, 1, 1, 3, 6]);
        let d = rae_select(&s, 8);
        assert_eq!(raw(&d.reserved), vec![0, 1, 2, 3]);
        assert_eq!(raw(&d.free), vec![4]);
    }

    #[test]
    fn rae_everything_fits_leaves_free_bank_idle() {
        let s = state(&[1, 2, 3]);
        let d = rae_select(&s, 8);
        assert_eq!(d.reserved.len(), 3);
        assert!(d.free.is_empty());
    }

    #[test]
    fn ra_size_prefers_exact_window_over_small_effective_size() {
        // (w, s) = (1, 8) and (3, 1)
        let s = SystemState::from_specs(1, [(1, 1, 8), (1, 3, 1)]);
        assert_eq!(raw(&ra_size_select(&s, 8).reserved), vec![0]);
        let s = SystemState::from_specs(1, [(1, 5, 2)]);
        assert_eq!(raw(&ra_size_select(&s, 8).reserved), vec![0]);
    }

    #[test]
    fn ra_size_equals_ra_on_unit_sizes() {
        let s = state(&[4, 1, 2, 1, 8, 2, 1]);
        assert_eq!(ra_size_select(&s, 8), ra_select(&s, 8));
    }

    #[test]
    fn waiting_rules() {
        let s = state(&[1, 1, 1, 1, 8]);
        assert_eq!(needs_of(&s, &theta0_select(&s, 8).reserved), vec![1, 1, 1, 1]);
        assert_eq!(needs_of(&s, &theta_t_select(&s, 8).reserved), vec![8]);
        assert_eq!(needs_of(&s, &immediate_unit_select(&s, 8).reserved), vec![1, 1, 1, 1]);

        let s = state(&[1, 1, 1, 1, 1, 1, 1, 1, 1, 8]);
        assert_eq!(theta_t_select(&s, 8).reserved.len(), 8);

        // immediate-unit fills around the units, θ=0 does not
        let s = state(&[1, 1, 4, 2]);
        assert_eq!(needs_of(&s, &immediate_unit_select(&s, 8).reserved), vec![1, 1, 2, 4]);
        assert_eq!(needs_of(&s, &theta0_select(&s, 8).reserved), vec![1, 1]);
        // θ=T with only a few units and nothing else serves them
        let s = state(&[1, 1]);
        assert_eq!(theta_t_select(&s, 8).reserved.len(), 2);
    }
}
