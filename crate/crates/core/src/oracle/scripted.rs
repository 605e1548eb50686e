//! Hand-built offline schedules for the lower-bound inputs.

use std::fmt;
use std::str::FromStr;

use crate::adversary::{greedy_lb_trace, sfa_gap_trace, sfa_lb_trace};
use crate::engine::{check_schedule, run_loop};
use crate::error::{Error, Result};
use crate::model::{Banks, JobId, SlotDecision, Trace};
use crate::policy::{immediate_unit_select, theta_t_select};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scenario {
    SfaLb { k: u32, t: u32 },
    SfaGap { k: u32, t: u32 },
    GreedyLb { k: u32, l1: u32, l2: u32 },
    /// Trace realised by the adaptive adversary with `t1` wasted slots.
    DetLb { k: u32, t: u32, t1: u32 },
}

impl Scenario {
    pub fn name(&self) -> &'static str {
        match self {
            Scenario::SfaLb { .. } => "sfa-lb",
            Scenario::SfaGap { .. } => "sfa-gap",
            Scenario::GreedyLb { .. } => "greedy-lb",
            Scenario::DetLb { .. } => "det-lb",
        }
    }
}

impl fmt::Display for Scenario {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Scenario names accepted on the command line, including generator-only ones.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ScenarioName {
    SfaLb,
    SfaGap,
    GreedyLb,
    DetLb,
    RandLb,
    Stochastic,
}

impl FromStr for ScenarioName {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        Ok(match s {
            "sfa-lb" => ScenarioName::SfaLb,
            "sfa-gap" => ScenarioName::SfaGap,
            "greedy-lb" => ScenarioName::GreedyLb,
            "det-lb" => ScenarioName::DetLb,
            "rand-lb" => ScenarioName::RandLb,
            "stochastic" => ScenarioName::Stochastic,
            _ => return Err(format!("unknown scenario `{s}`")),
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ScriptedSchedule {
    pub schedule: Vec<SlotDecision>,
    /// The closed-form upper bound claimed for this schedule, if any.
    pub bound: Option<u64>,
    /// Flow of the schedule as measured by the independent validator.
    pub flow: u64,
    pub feasible: bool,
}

fn mismatch(scenario: Scenario, reason: impl Into<String>) -> Error {
    Error::ScenarioMismatch {
        scenario: scenario.name().to_string(),
        reason: reason.into(),
    }
}

fn same_jobs(trace: &Trace, expected: &Trace) -> bool {
    let key = |t: &Trace| {
        let mut v: Vec<_> = t.jobs().iter().map(|j| (j.arrival, j.size, j.need)).collect();
        v.sort_unstable();
        v
    };
    trace.k() == expected.k() && key(trace) == key(expected)
}

/// Schedule produced by running a selection rule on the trace.
fn rule_schedule<F>(trace: &Trace, rule: F) -> Result<Vec<SlotDecision>>
where
    F: Fn(&crate::engine::SystemState, u32) -> SlotDecision,
{
    let k = trace.k();
    let run = run_loop(trace, Banks::One, true, |s| Ok(rule(s, k)))?;
    Ok(run
        .log
        .expect("recorded")
        .into_iter()
        .map(|r| r.decision)
        .collect())
}

/// Big job at its odd arrival slot, the four quarter jobs of each pair of
/// slots together in the even slot, each half-need pair one slot after it
/// arrives.
fn greedy_b_schedule(trace: &Trace, l1: u32, l2: u32) -> Vec<SlotDecision> {
    let k = trace.k();
    let horizon = (2 * l1).max(2 * l1 + l2);
    let mut schedule = vec![SlotDecision::default(); horizon as usize];
    for j in trace.jobs() {
        let slot = if j.need == k {
            j.arrival
        } else if j.need == k / 4 && j.arrival <= 2 * l1 {
            j.arrival + (j.arrival % 2)
        } else {
            j.arrival + 1
        };
        schedule[slot as usize - 1].reserved.push(j.id);
    }
    for d in &mut schedule {
        d.reserved.sort_unstable_by_key(|id: &JobId| id.0);
    }
    schedule
}

/// The offline schedule used against each lower-bound input.
pub fn scripted_offline(scenario: Scenario, trace: &Trace) -> Result<ScriptedSchedule> {
    let (schedule, bound) = match scenario {
        Scenario::SfaLb { k, t } => {
            if !same_jobs(trace, &sfa_lb_trace(k, t)) {
                return Err(mismatch(scenario, "jobs differ from the generated input"));
            }
            let bound = u64::from(k / 2) + 2 * u64::from(t) + 1;
            (rule_schedule(trace, immediate_unit_select)?, Some(bound))
        }
        Scenario::SfaGap { k, t } => {
            if !same_jobs(trace, &sfa_gap_trace(k, t)) {
                return Err(mismatch(scenario, "jobs differ from the generated input"));
            }
            (rule_schedule(trace, theta_t_select)?, None)
        }
        Scenario::GreedyLb { k, l1, l2 } => {
            if !same_jobs(trace, &greedy_lb_trace(k, l1, l2)) {
                return Err(mismatch(scenario, "jobs differ from the generated input"));
            }
            let bound = 4 * u64::from(l1) + 2 * u64::from(l2);
            (greedy_b_schedule(trace, l1, l2), Some(bound))
        }
        Scenario::DetLb { k, t, t1 } => {
            if trace.k() != k {
                return Err(mismatch(scenario, "server count differs"));
            }
            let mut first: Vec<u32> = trace.arrivals_at(1).map(|j| j.need).collect();
            first.sort_unstable();
            let mut seed = vec![1; (k / 2) as usize];
            seed.push(k);
            if t > 0 && first != seed {
                return Err(mismatch(scenario, "slot 1 must hold K/2 unit jobs and one need-K job"));
            }
            if trace.jobs().iter().any(|j| ![1, k / 2, k].contains(&j.need)) {
                return Err(mismatch(scenario, "needs outside {1, K/2, K}"));
            }
            if t1 == 0 {
                let bound = u64::from(t) + 1 + u64::from(k / 2);
                (rule_schedule(trace, immediate_unit_select)?, Some(bound))
            } else {
                (rule_schedule(trace, theta_t_select)?, None)
            }
        }
    };
    let check = check_schedule(trace, &schedule, Banks::One);
    Ok(ScriptedSchedule {
        schedule,
        bound,
        flow: check.flow_total,
        feasible: check.feasible,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sfa_lb_b_schedule() {
        let trace = sfa_lb_trace(8, 50);
        let s = scripted_offline(Scenario::SfaLb { k: 8, t: 50 }, &trace).unwrap();
        assert!(s.feasible);
        assert_eq!(s.bound, Some(105));
        assert_eq!(s.flow, 4 + 2 * 50);
        assert!(s.flow <= 105);
        assert_eq!(s.schedule[0].reserved.len(), 4);
    }

    #[test]
    fn greedy_lb_b_schedule() {
        let trace = greedy_lb_trace(8, 4, 6);
        let s = scripted_offline(Scenario::GreedyLb { k: 8, l1: 4, l2: 6 }, &trace).unwrap();
        assert!(s.feasible);
        assert_eq!(s.bound, Some(28));
        // bigs 1 each, quarter jobs 2+2+1+1 per pair of slots, half pairs 2 each
        assert_eq!(s.flow, 7 * 4 + 4 * 6);
    }

    #[test]
    fn det_lb_t1_zero_bound() {
        let trace = sfa_lb_trace(8, 10);
        let s = scripted_offline(Scenario::DetLb { k: 8, t: 10, t1: 0 }, &trace).unwrap();
        assert!(s.feasible);
        assert_eq!(s.bound, Some(10 + 1 + 4));
    }

    #[test]
    fn sfa_gap_pairing_keeps_units_low() {
        let (k, t) = (8, 11);
        let trace = sfa_gap_trace(k, t);
        let s = scripted_offline(Scenario::SfaGap { k, t }, &trace).unwrap();
        assert!(s.feasible);
        let run = crate::engine::replay(&trace, &s.schedule, Banks::One).unwrap();
        let rec = run.record(t).unwrap();
        let units = rec
            .remaining
            .iter()
            .filter(|(id, _)| trace.job(*id).unwrap().need == 1)
            .count() as u32;
        assert!(units <= t);
    }

    #[test]
    fn mismatched_trace_rejected() {
        let trace = sfa_lb_trace(8, 5);
        let err = scripted_offline(Scenario::SfaLb { k: 8, t: 6 }, &trace).unwrap_err();
        assert!(matches!(err, Error::ScenarioMismatch { .. }));
        let err = scripted_offline(Scenario::GreedyLb { k: 8, l1: 1, l2: 1 }, &trace).unwrap_err();
        assert!(matches!(err, Error::ScenarioMismatch { .. }));
    }
}
