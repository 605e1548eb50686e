//! Offline optimum on small instances.
//!
//! Total flow equals `Σ_t n(t)`, so the search minimises the number of jobs
//! held per slot. Jobs that agree on `(remaining size, need)` are
//! interchangeable for that objective and are merged into counted classes;
//! within a class the witness serves the earliest arrival first.

mod scripted;

use std::collections::HashMap;

use crate::engine::{replay, RunResult, SystemState};
use crate::error::{Error, Result};
use crate::model::{Banks, JobId, SizeMode, Slot, SlotDecision, Trace};

pub use scripted::{scripted_offline, Scenario, ScenarioName, ScriptedSchedule};

/// Latest slot any optimal schedule can still be busy in: at least one job
/// fits per slot, so the last arrival plus the total size is enough.
pub fn makespan_bound(trace: &Trace) -> Slot {
    match trace.last_arrival() {
        None => 0,
        Some(a) => a + trace.total_size() as Slot,
    }
}

pub const DEFAULT_NODE_BUDGET: u64 = 10_000_000;
pub const MAX_UNIT_JOBS: usize = 12;
pub const MAX_WEIGHTED_JOBS: usize = 7;
pub const MAX_WEIGHTED_TOTAL: u64 = 12;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OracleConfig {
    pub node_budget: u64,
    /// Skip the instance-size guideline.
    pub allow_large: bool,
}

impl Default for OracleConfig {
    fn default() -> Self {
        OracleConfig {
            node_budget: DEFAULT_NODE_BUDGET,
            allow_large: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct OracleResult {
    pub opt_flow: u64,
    /// Entry `i` is slot `i + 1`.
    pub witness: Vec<SlotDecision>,
    /// n_OPT(t) from slot 1.
    pub per_slot_remaining: Vec<u32>,
    /// V_OPT(t): Σ remaining size × need over R(t⁻).
    pub per_slot_volume: Vec<u64>,
    /// The witness replayed through the engine, with its slot log.
    pub run: RunResult,
    pub nodes_explored: u64,
}

impl OracleResult {
    pub fn remaining_at(&self, slot: Slot) -> u32 {
        self.run.count_at(slot)
    }
}

/// `(remaining, need)` with a multiplicity; classes kept sorted.
type Class = (u32, u32, u32);
type Key = (Slot, Vec<Class>);

struct Search<'t> {
    trace: &'t Trace,
    k: u32,
    last_arrival: Slot,
    budget: u64,
    nodes: u64,
    memo: HashMap<Key, (u64, Vec<u32>)>,
}

fn classes_of(state: &SystemState) -> Vec<Class> {
    let mut v: Vec<(u32, u32)> = state.iter().map(|p| (p.remaining, p.need())).collect();
    v.sort_unstable();
    let mut out: Vec<Class> = Vec::new();
    for (r, s) in v {
        match out.last_mut() {
            Some(c) if c.0 == r && c.1 == s => c.2 += 1,
            _ => out.push((r, s, 1)),
        }
    }
    out
}

/// Every count vector that fits in `k` and cannot take one more job.
fn maximal_choices(classes: &[Class], k: u32) -> Vec<Vec<u32>> {
    fn rec(classes: &[Class], i: usize, left: u32, cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if i == classes.len() {
            let maximal = classes
                .iter()
                .zip(cur.iter())
                .all(|(&(_, s, n), &c)| c == n || s > left);
            if maximal {
                out.push(cur.clone());
            }
            return;
        }
        let (_, s, n) = classes[i];
        let most = n.min(left / s);
        for c in (0..=most).rev() {
            cur.push(c);
            rec(classes, i + 1, left - c * s, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(classes, 0, k, &mut Vec::with_capacity(classes.len()), &mut out);
    out
}

/// Remaining classes after serving `counts` from each class once.
fn serve(classes: &[Class], counts: &[u32]) -> Vec<(u32, u32, u32)> {
    let mut next: Vec<Class> = Vec::with_capacity(classes.len() + 1);
    for (&(r, s, n), &c) in classes.iter().zip(counts) {
        if n > c {
            next.push((r, s, n - c));
        }
        if c > 0 && r > 1 {
            next.push((r - 1, s, c));
        }
    }
    next
}

fn merge(mut v: Vec<Class>) -> Vec<Class> {
    v.sort_unstable();
    let mut out: Vec<Class> = Vec::with_capacity(v.len());
    for (r, s, n) in v {
        match out.last_mut() {
            Some(c) if c.0 == r && c.1 == s => c.2 += n,
            _ => out.push((r, s, n)),
        }
    }
    out
}

impl Search<'_> {
    fn key_slot(&self, t: Slot) -> Slot {
        if t >= self.last_arrival {
            Slot::MAX
        } else {
            t
        }
    }

    fn arrivals(&self, t: Slot) -> Vec<Class> {
        self.trace
            .arrivals_at(t)
            .map(|j| (j.size, j.need, 1))
            .collect()
    }

    /// Minimal `Σ_{t' ≥ t} n(t')` from slot `t` holding `classes` (arrivals of
    /// slot `t` included).
    fn cost(&mut self, t: Slot, classes: Vec<Class>) -> Result<u64> {
        if classes.is_empty() {
            return match self.trace.next_arrival_after(t) {
                None => Ok(0),
                Some(next) => {
                    let arr = merge(self.arrivals(next));
                    self.cost(next, arr)
                }
            };
        }
        let key = (self.key_slot(t), classes);
        if let Some((c, _)) = self.memo.get(&key) {
            return Ok(*c);
        }
        self.nodes += 1;
        if self.nodes > self.budget {
            return Err(Error::TooLarge(format!(
                "search exceeded {} nodes",
                self.budget
            )));
        }
        let classes = &key.1;
        let held: u64 = classes.iter().map(|c| u64::from(c.2)).sum();
        let incoming = self.arrivals(t + 1);
        let mut best: Option<(u64, Vec<u32>)> = None;
        for choice in maximal_choices(classes, self.k) {
            let mut next = serve(classes, &choice);
            next.extend(incoming.iter().copied());
            let c = self.cost(t + 1, merge(next))?;
            if best.as_ref().is_none_or(|(b, _)| c < *b) {
                best = Some((c, choice));
            }
        }
        let (c, choice) = best.expect("a non-empty state has a maximal choice");
        let total = held + c;
        self.memo.insert(key, (total, choice));
        Ok(total)
    }
}

fn check_size(trace: &Trace) -> Result<()> {
    let n = trace.len();
    match trace.size_mode() {
        SizeMode::Unit if n > MAX_UNIT_JOBS => Err(Error::TooLarge(format!(
            "{n} jobs (limit {MAX_UNIT_JOBS} unit jobs)"
        ))),
        SizeMode::Weighted if n > MAX_WEIGHTED_JOBS => Err(Error::TooLarge(format!(
            "{n} jobs (limit {MAX_WEIGHTED_JOBS} weighted jobs)"
        ))),
        SizeMode::Weighted if trace.total_size() > MAX_WEIGHTED_TOTAL => Err(Error::TooLarge(
            format!("total size {} (limit {MAX_WEIGHTED_TOTAL})", trace.total_size()),
        )),
        _ => Ok(()),
    }
}

/// Exact minimum total flow on `trace.k()` servers.
pub fn opt_flow_time(trace: &Trace, config: &OracleConfig) -> Result<OracleResult> {
    if !config.allow_large {
        check_size(trace)?;
    }
    let k = trace.k();
    let mut search = Search {
        trace,
        k,
        last_arrival: trace.last_arrival().unwrap_or(0),
        budget: config.node_budget,
        nodes: 0,
        memo: HashMap::new(),
    };
    let start = SystemState::start(trace);
    let opt_flow = search.cost(1, classes_of(&start))?;

    // walk the memo forward, mapping class counts onto concrete jobs
    let mut witness = Vec::new();
    let mut state = start;
    while !state.is_empty() || trace.next_arrival_after(state.slot()).is_some() {
        if state.is_empty() {
            let next = trace.next_arrival_after(state.slot()).expect("loop condition");
            witness.extend((state.slot()..next).map(|_| SlotDecision::default()));
            state = state.skip_to(next, trace);
            continue;
        }
        let classes = classes_of(&state);
        let key = (search.key_slot(state.slot()), classes);
        let (_, counts) = search
            .memo
            .get(&key)
            .cloned()
            .expect("every reachable state was expanded");
        let mut chosen: Vec<JobId> = Vec::new();
        for (&(r, s, _), &c) in key.1.iter().zip(&counts) {
            let mut members: Vec<_> = state
                .iter()
                .filter(|p| p.remaining == r && p.need() == s)
                .map(|p| (p.arrival(), p.id()))
                .collect();
            members.sort_unstable();
            chosen.extend(members.iter().take(c as usize).map(|m| m.1));
        }
        let decision = SlotDecision::single(chosen);
        let (next, _) = crate::engine::advance_slot(state, &decision, trace, Banks::One)?;
        witness.push(decision);
        state = next;
    }

    let run = replay(trace, &witness, Banks::One)?;
    debug_assert_eq!(run.flow_total, opt_flow);
    let per_slot_volume = run
        .log
        .as_ref()
        .expect("replay records")
        .iter()
        .map(|r| {
            r.remaining
                .iter()
                .map(|&(id, rem)| u64::from(rem) * u64::from(trace.job(id).expect("job").need))
                .sum()
        })
        .collect();
    Ok(OracleResult {
        opt_flow,
        per_slot_remaining: run.per_slot_count.clone(),
        per_slot_volume,
        witness,
        run,
        nodes_explored: search.nodes,
    })
}
