//! The adaptive adversary against deterministic policies.
//!
//! Slot 1 seeds one need-K job and K/2 unit-need jobs. During the main
//! phase a slot in which the policy serves a need-K job is full and is
//! followed by one need-K arrival; any other slot is wasted and is followed
//! by K/2 unit-need jobs plus one need-K job. After slot `T` the input
//! either drains (a quiet stretch then `L` slots of two need-K/2 jobs) when
//! `t1 ≥ √T`, or simply stops.

use crate::engine::{advance_slot, run_loop, RunResult, SystemState};
use crate::error::Result;
use crate::model::{Banks, NeedMode, SizeMode, Slot, Trace};
use crate::policy::Policy;

use super::fixed::append_drain_tail;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AdversaryClass {
    Full,
    Wasted,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Phase {
    Main,
    Drain,
    Tail,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TranscriptEntry {
    pub slot: Slot,
    /// Needs of the jobs that arrived in this slot.
    pub arrivals: Vec<u32>,
    pub class: AdversaryClass,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AdaptiveSession {
    pub k: u32,
    pub t: u32,
    pub l: u32,
    pub t1: u32,
    pub phase: Phase,
    pub transcript: Vec<TranscriptEntry>,
}

impl AdaptiveSession {
    /// Length of the quiet stretch before the drain arrivals.
    pub fn gap(&self) -> u32 {
        self.t1.div_ceil(2)
    }
}

#[derive(Debug, Clone)]
pub struct AdaptiveOutcome {
    pub trace: Trace,
    pub run: RunResult,
    pub t1: u32,
    pub session: AdaptiveSession,
}

fn seed_slot(trace: &mut Trace, slot: Slot, units: bool) {
    let k = trace.k();
    if units {
        for _ in 0..k / 2 {
            trace.push(slot, 1, 1);
        }
    }
    trace.push(slot, 1, k);
}

/// Plays the adversary against `policy` for `t` main-phase slots and
/// returns the realised trace, the policy's full run on it, and `t1`.
pub fn adaptive_det_lb<P: Policy + ?Sized>(
    policy: &P,
    banks: Banks,
    k: u32,
    t: u32,
    l: u32,
) -> Result<AdaptiveOutcome> {
    let mut trace = Trace::empty(k, NeedMode::PowerOfTwo, SizeMode::Unit);
    seed_slot(&mut trace, 1, true);
    let mut state = SystemState::start(&trace);
    let mut transcript = Vec::with_capacity(t as usize);
    let mut t1 = 0;

    for slot in 1..=t {
        let decision = policy.select(&state, k);
        let full = decision
            .all()
            .any(|id| state.get(id).is_some_and(|p| p.need() == k));
        let class = if full {
            AdversaryClass::Full
        } else {
            t1 += 1;
            AdversaryClass::Wasted
        };
        transcript.push(TranscriptEntry {
            slot,
            arrivals: trace.arrivals_at(slot).map(|j| j.need).collect(),
            class,
        });
        if slot < t {
            seed_slot(&mut trace, slot + 1, class == AdversaryClass::Wasted);
        }
        state = advance_slot(state, &decision, &trace, banks)?.0;
    }

    let drain = t1 > 0 && u64::from(t1) * u64::from(t1) >= u64::from(t);
    let session = AdaptiveSession {
        k,
        t,
        l,
        t1,
        phase: if drain { Phase::Drain } else { Phase::Tail },
        transcript,
    };
    if drain {
        append_drain_tail(&mut trace, t, session.gap(), l);
    }

    let run = run_loop(&trace, banks, true, |s| Ok(policy.select(s, k)))?;
    Ok(AdaptiveOutcome {
        trace,
        run,
        t1,
        session,
    })
}

/// Post-hoc check that every main-phase arrival follows the rule for the
/// previous slot's class, that the tail matches the recorded phase, and
/// that `t1` counts the wasted slots.
pub fn verify_transcript(trace: &Trace, session: &AdaptiveSession) -> bool {
    let k = session.k;
    let needs = |s: Slot| {
        let mut v: Vec<u32> = trace.arrivals_at(s).map(|j| j.need).collect();
        v.sort_unstable();
        v
    };
    let with_units = {
        let mut v = vec![1; (k / 2) as usize];
        v.push(k);
        v
    };
    if session.t > 0 && needs(1) != with_units {
        return false;
    }
    for w in session.transcript.windows(2) {
        let expected = match w[0].class {
            AdversaryClass::Full => vec![k],
            AdversaryClass::Wasted => with_units.clone(),
        };
        if needs(w[1].slot) != expected {
            return false;
        }
    }
    let wasted = session
        .transcript
        .iter()
        .filter(|e| e.class == AdversaryClass::Wasted)
        .count() as u32;
    if wasted != session.t1 {
        return false;
    }
    let after: Vec<_> = trace.jobs().iter().filter(|j| j.arrival > session.t).collect();
    match session.phase {
        Phase::Tail | Phase::Main => after.is_empty(),
        Phase::Drain => {
            let gap = session.gap();
            after.len() as u32 == 2 * session.l
                && (1..=session.l).all(|i| needs(session.t + gap + i) == vec![k / 2, k / 2])
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engine::SystemState;
    use crate::model::SlotDecision;
    use crate::policy::PolicyKind;

    fn big_first(state: &SystemState, k: u32) -> SlotDecision {
        let big = state.iter().filter(|p| p.need() == k).map(|p| p.id()).next();
        match big {
            Some(id) => SlotDecision::single(vec![id]),
            None => {
                let mut left = k;
                let ids = state
                    .iter()
                    .filter(|p| p.need() <= left && {
                        left -= p.need();
                        true
                    })
                    .map(|p| p.id())
                    .collect();
                SlotDecision::single(ids)
            }
        }
    }

    fn units_first(state: &SystemState, k: u32) -> SlotDecision {
        let units: Vec<_> = state.iter().filter(|p| p.need() == 1).map(|p| p.id()).collect();
        if units.len() >= (k / 2) as usize {
            SlotDecision::single(units.into_iter().take(k as usize).collect())
        } else {
            big_first(state, k)
        }
    }

    #[test]
    fn always_full_policy_never_wastes() {
        let out = adaptive_det_lb(&big_first, Banks::One, 8, 10, 5).unwrap();
        assert_eq!(out.t1, 0);
        for s in 2..=10 {
            let needs: Vec<u32> = out.trace.arrivals_at(s).map(|j| j.need).collect();
            assert_eq!(needs, vec![8]);
        }
        assert_eq!(out.session.phase, Phase::Tail);
        assert!(verify_transcript(&out.trace, &out.session));
    }

    #[test]
    fn always_wasting_policy() {
        let out = adaptive_det_lb(&units_first, Banks::One, 8, 9, 4).unwrap();
        assert_eq!(out.t1, 9);
        for s in 1..=9 {
            assert_eq!(out.trace.arrivals_at(s).filter(|j| j.need == 1).count(), 4);
        }
        assert_eq!(out.session.phase, Phase::Drain);
        assert_eq!(out.session.gap(), 5);
        assert_eq!(out.trace.arrivals_at(15).count(), 2);
        assert!(verify_transcript(&out.trace, &out.session));
    }

    #[test]
    fn tampered_trace_fails_verification() {
        let out = adaptive_det_lb(&PolicyKind::Ra, Banks::One, 8, 6, 3).unwrap();
        assert!(verify_transcript(&out.trace, &out.session));
        let bad = out.trace.with_job(3, 1, 1);
        assert!(!verify_transcript(&bad, &out.session));
    }

    #[test]
    fn rerun_reproduces_co_simulation() {
        for p in [PolicyKind::Ra, PolicyKind::Sfa, PolicyKind::Greedy] {
            let out = adaptive_det_lb(&p, Banks::One, 8, 12, 6).unwrap();
            let log = out.run.log.as_ref().unwrap();
            for e in &out.session.transcript {
                let rec = &log[e.slot as usize - 1];
                let full = rec
                    .decision
                    .all()
                    .any(|id| out.trace.job(id).unwrap().need == 8);
                assert_eq!(full, e.class == AdversaryClass::Full);
            }
        }
    }
}
