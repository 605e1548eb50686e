//! Slot mechanics: the remaining-job set, one-slot advancement, slot
//! classification, and an independent schedule validator.

use std::collections::{BTreeMap, HashSet};
use std::fmt;

use crate::error::{Error, Result};
use crate::harness::MonitorReport;
use crate::model::{Bank, Banks, Job, JobId, Slot, SlotClass, SlotDecision, Trace};

/// A job still in the system together with its remaining service.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Pending {
    pub job: Job,
    pub remaining: u32,
}

impl Pending {
    pub fn id(&self) -> JobId {
        self.job.id
    }

    pub fn need(&self) -> u32 {
        self.job.need
    }

    pub fn arrival(&self) -> Slot {
        self.job.arrival
    }

    /// Remaining size times need.
    pub fn effective_size(&self) -> u64 {
        u64::from(self.remaining) * u64::from(self.job.need)
    }
}

/// The remaining set R(t⁻): carried-over jobs plus the arrivals of slot `t`.
///
/// Iteration is by job id so runs are reproducible bit for bit.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SystemState {
    slot: Slot,
    pending: BTreeMap<JobId, Pending>,
    arrived: usize,
}

impl SystemState {
    /// State at the start of slot 1.
    pub fn start(trace: &Trace) -> Self {
        let mut s = SystemState {
            slot: 1,
            ..Default::default()
        };
        s.admit_arrivals(trace);
        s
    }

    /// Arbitrary state at `slot` holding `jobs` with their full sizes.
    pub fn from_jobs<I>(slot: Slot, jobs: I) -> Self
    where
        I: IntoIterator<Item = Job>,
    {
        let mut s = SystemState {
            slot,
            ..Default::default()
        };
        for job in jobs {
            s.admit(job);
        }
        s
    }

    /// Convenience for examples: jobs `(arrival, size, need)` with ids in order.
    pub fn from_specs<I>(slot: Slot, specs: I) -> Self
    where
        I: IntoIterator<Item = (Slot, u32, u32)>,
    {
        SystemState::from_jobs(
            slot,
            specs
                .into_iter()
                .enumerate()
                .map(|(i, (arrival, size, need))| Job {
                    id: JobId(i as u32),
                    arrival,
                    size,
                    need,
                }),
        )
    }

    fn admit(&mut self, job: Job) {
        self.arrived += 1;
        self.pending.insert(
            job.id,
            Pending {
                job,
                remaining: job.size,
            },
        );
    }

    fn admit_arrivals(&mut self, trace: &Trace) {
        for job in trace.arrivals_at(self.slot) {
            self.admit(*job);
        }
    }

    pub fn slot(&self) -> Slot {
        self.slot
    }

    /// n(t) = |R(t⁻)|.
    pub fn len(&self) -> usize {
        self.pending.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pending.is_empty()
    }

    /// Count of jobs with arrival at or before the current slot.
    pub fn arrivals_seen(&self) -> usize {
        self.arrived
    }

    pub fn iter(&self) -> impl Iterator<Item = &Pending> + '_ {
        self.pending.values()
    }

    pub fn get(&self, id: JobId) -> Option<&Pending> {
        self.pending.get(&id)
    }

    /// Σ remaining size × need.
    pub fn volume(&self) -> u64 {
        self.iter().map(Pending::effective_size).sum()
    }

    pub fn total_need(&self) -> u64 {
        self.iter().map(|p| u64::from(p.need())).sum()
    }

    pub fn remaining_sizes(&self) -> Vec<(JobId, u32)> {
        self.iter().map(|p| (p.id(), p.remaining)).collect()
    }

    /// Moves an empty system forward to `slot` and admits its arrivals.
    pub fn skip_to(mut self, slot: Slot, trace: &Trace) -> Self {
        debug_assert!(self.is_empty() && slot > self.slot);
        self.slot = slot;
        self.admit_arrivals(trace);
        self
    }

    fn need_sum(&self, ids: &[JobId]) -> u64 {
        ids.iter()
            .filter_map(|id| self.pending.get(id))
            .map(|p| u64::from(p.need()))
            .sum()
    }
}

/// Checks that `decision` only names present jobs, names each at most once
/// and fits both banks.
pub fn validate_decision(
    state: &SystemState,
    decision: &SlotDecision,
    k: u32,
    banks: Banks,
) -> Result<()> {
    let slot = state.slot;
    let mut seen = HashSet::with_capacity(decision.len());
    for id in decision.all() {
        if !state.pending.contains_key(&id) {
            return Err(Error::UnknownJob { slot, job: id });
        }
        if !seen.insert(id) {
            return Err(Error::DuplicateJob { slot, job: id });
        }
    }
    for (bank, ids) in [(Bank::Reserved, &decision.reserved), (Bank::Free, &decision.free)] {
        let used = state.need_sum(ids);
        let capacity = banks.capacity(bank, k);
        if used > u64::from(capacity) {
            return Err(Error::CapacityExceeded {
                slot,
                bank,
                used,
                capacity,
            });
        }
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Departure {
    pub id: JobId,
    pub slot: Slot,
}

/// Serves `decision` in the current slot and returns R((t+1)⁻) together with
/// the jobs that left at the end of slot `t`.
pub fn advance_slot(
    mut state: SystemState,
    decision: &SlotDecision,
    trace: &Trace,
    banks: Banks,
) -> Result<(SystemState, Vec<Departure>)> {
    validate_decision(&state, decision, trace.k(), banks)?;
    let slot = state.slot;
    let mut departures = Vec::new();
    for id in decision.all() {
        let p = state.pending.get_mut(&id).expect("validated");
        p.remaining -= 1;
        if p.remaining == 0 {
            state.pending.remove(&id);
            departures.push(Departure { id, slot });
        }
    }
    departures.sort_by_key(|d| d.id);
    state.slot += 1;
    state.admit_arrivals(trace);
    Ok((state, departures))
}

/// Full iff the reserved bank is exactly saturated.
pub fn classify_slot(decision: &SlotDecision, state: &SystemState, k: u32) -> SlotClass {
    if state.need_sum(&decision.reserved) == u64::from(k) {
        SlotClass::Full
    } else {
        SlotClass::Relaxed
    }
}

/// What a run looked like at one slot boundary.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SlotRecord {
    pub slot: Slot,
    /// R(t⁻) as `(id, remaining size)`, sorted by id.
    pub remaining: Vec<(JobId, u32)>,
    pub decision: SlotDecision,
    pub class: SlotClass,
}

/// Outcome of running a policy (or replaying a schedule) to completion.
///
/// Per-slot vectors are indexed from slot 1, so entry `i` describes slot
/// `i + 1`. Flow time of job `j` is `d_j - a_j + 1`; summed over jobs this
/// equals `Σ_t n(t)`.
#[derive(Debug, Clone, PartialEq)]
pub struct RunResult {
    pub k: u32,
    pub banks: Banks,
    pub departures: BTreeMap<JobId, Slot>,
    pub flow_total: u64,
    pub per_slot_count: Vec<u32>,
    pub slot_class: Vec<SlotClass>,
    pub monitor_reports: Vec<MonitorReport>,
    pub log: Option<Vec<SlotRecord>>,
}

impl RunResult {
    pub fn job_count(&self) -> usize {
        self.departures.len()
    }

    pub fn last_slot(&self) -> Slot {
        self.per_slot_count.len() as Slot
    }

    pub fn mean_flow(&self) -> f64 {
        if self.departures.is_empty() {
            0.0
        } else {
            self.flow_total as f64 / self.departures.len() as f64
        }
    }

    pub fn full_slots(&self) -> usize {
        self.slot_class
            .iter()
            .filter(|c| **c == SlotClass::Full)
            .count()
    }

    /// n(t) at `slot`, zero outside the run.
    pub fn count_at(&self, slot: Slot) -> u32 {
        slot.checked_sub(1)
            .and_then(|i| self.per_slot_count.get(i as usize))
            .copied()
            .unwrap_or(0)
    }

    /// Departure slots in ascending order.
    pub fn sorted_departure_slots(&self) -> Vec<Slot> {
        let mut d: Vec<Slot> = self.departures.values().copied().collect();
        d.sort_unstable();
        d
    }

    /// Number of jobs departed by the end of each slot `1..=upto`.
    pub fn cumulative_departures(&self, upto: Slot) -> Vec<u32> {
        let mut per = vec![0u32; upto as usize];
        for &d in self.departures.values() {
            if d <= upto {
                per[d as usize - 1] += 1;
            }
        }
        let mut acc = 0;
        for v in per.iter_mut() {
            acc += *v;
            *v = acc;
        }
        per
    }

    pub fn record(&self, slot: Slot) -> Option<&SlotRecord> {
        let log = self.log.as_ref()?;
        slot.checked_sub(1).and_then(|i| log.get(i as usize))
    }
}

/// Drives the slot loop, asking `choose` for each non-empty slot's decision.
pub(crate) fn run_loop<F>(trace: &Trace, banks: Banks, record: bool, mut choose: F) -> Result<RunResult>
where
    F: FnMut(&SystemState) -> Result<SlotDecision>,
{
    let k = trace.k();
    let last_arrival = trace.last_arrival().unwrap_or(0);
    let cap = 2 * (u64::from(last_arrival) + trace.total_size()) + 64;

    let mut departures = BTreeMap::new();
    let mut flow_total = 0u64;
    let mut per_slot_count = Vec::new();
    let mut slot_class = Vec::new();
    let mut log = record.then(Vec::new);

    let mut state = SystemState::start(trace);
    loop {
        if state.is_empty() {
            let Some(next) = trace.next_arrival_after(state.slot) else {
                break;
            };
            for s in state.slot..next {
                per_slot_count.push(0);
                slot_class.push(SlotClass::Relaxed);
                if let Some(log) = log.as_mut() {
                    log.push(SlotRecord {
                        slot: s,
                        remaining: Vec::new(),
                        decision: SlotDecision::default(),
                        class: SlotClass::Relaxed,
                    });
                }
            }
            state = state.skip_to(next, trace);
            continue;
        }
        if u64::from(state.slot) > cap {
            return Err(Error::Stalled(state.slot));
        }
        let decision = choose(&state)?;
        let class = classify_slot(&decision, &state, k);
        per_slot_count.push(state.len() as u32);
        slot_class.push(class);
        if let Some(log) = log.as_mut() {
            log.push(SlotRecord {
                slot: state.slot,
                remaining: state.remaining_sizes(),
                decision: decision.clone(),
                class,
            });
        }
        let (next, left) = advance_slot(state, &decision, trace, banks)?;
        for d in left {
            let job = trace.job(d.id).expect("departed job is in the trace");
            flow_total += job.flow_time(d.slot);
            departures.insert(d.id, d.slot);
        }
        state = next;
    }

    Ok(RunResult {
        k,
        banks,
        departures,
        flow_total,
        per_slot_count,
        slot_class,
        monitor_reports: Vec::new(),
        log,
    })
}

/// Replays a fixed schedule (entry `i` is slot `i + 1`) through the engine.
pub fn replay(trace: &Trace, schedule: &[SlotDecision], banks: Banks) -> Result<RunResult> {
    run_loop(trace, banks, true, |state| {
        let i = state.slot() as usize - 1;
        match schedule.get(i) {
            Some(d) => Ok(d.clone()),
            None => Err(Error::Stalled(state.slot())),
        }
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Offense {
    pub slot: Slot,
    pub reason: String,
}

impl fmt::Display for Offense {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "slot {}: {}", self.slot, self.reason)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ScheduleCheck {
    pub feasible: bool,
    /// Flow of the jobs that completed; the full objective when feasible.
    pub flow_total: u64,
    pub departures: BTreeMap<JobId, Slot>,
    pub first_offense: Option<Offense>,
}

/// Validates a schedule against a trace without going through the engine.
///
/// Feasible iff every slot respects bank capacities, no job is served before
/// its arrival or after it completed, and every job gets exactly its size in
/// service.
pub fn check_schedule(trace: &Trace, schedule: &[SlotDecision], banks: Banks) -> ScheduleCheck {
    let k = trace.k();
    let mut served = vec![0u32; trace.len()];
    let mut departures = BTreeMap::new();
    let mut offense: Option<Offense> = None;

    'slots: for (i, decision) in schedule.iter().enumerate() {
        let slot = i as Slot + 1;
        let mut seen = HashSet::new();
        for (bank, ids) in [(Bank::Reserved, &decision.reserved), (Bank::Free, &decision.free)] {
            let mut used = 0u64;
            for &id in ids {
                let Some(job) = trace.job(id) else {
                    offense = Some(Offense {
                        slot,
                        reason: format!("unknown job {id}"),
                    });
                    break 'slots;
                };
                let reason = if !seen.insert(id) {
                    Some(format!("job {id} selected twice"))
                } else if job.arrival > slot {
                    Some(format!("job {id} served before its arrival {}", job.arrival))
                } else if served[id.0 as usize] >= job.size {
                    Some(format!("job {id} served after completing"))
                } else {
                    None
                };
                if let Some(reason) = reason {
                    offense = Some(Offense { slot, reason });
                    break 'slots;
                }
                used += u64::from(job.need);
                served[id.0 as usize] += 1;
                if served[id.0 as usize] == job.size {
                    departures.insert(id, slot);
                }
            }
            let capacity = banks.capacity(bank, k);
            if used > u64::from(capacity) {
                offense = Some(Offense {
                    slot,
                    reason: format!("{bank} bank uses {used} of {capacity} servers"),
                });
                break 'slots;
            }
        }
    }

    if offense.is_none() {
        if let Some(job) = trace.jobs().iter().find(|j| served[j.id.0 as usize] < j.size) {
            offense = Some(Offense {
                slot: schedule.len() as Slot,
                reason: format!(
                    "job {} incomplete ({} of {} slots)",
                    job.id, served[job.id.0 as usize], job.size
                ),
            });
        }
    }

    let flow_total = departures
        .iter()
        .map(|(id, &d)| trace.job(*id).expect("known job").flow_time(d))
        .sum();
    ScheduleCheck {
        feasible: offense.is_none(),
        flow_total,
        departures,
        first_offense: offense,
    }
}
