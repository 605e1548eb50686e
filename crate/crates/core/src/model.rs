//! Jobs, traces and per-slot decisions.
//!
//! Time is slotted and slots are numbered from 1. Arrivals are accounted at
//! the start of a slot and departures at its end, so a job with arrival `a`
//! that departs at the end of slot `d` has flow time `d - a + 1`.

use std::fmt;

pub type Slot = u32;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct JobId(pub u32);

impl fmt::Display for JobId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// One arriving unit of work.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Job {
    pub id: JobId,
    /// First slot in which the job may be served.
    pub arrival: Slot,
    /// Slots of service required.
    pub size: u32,
    /// Servers required concurrently while in service.
    pub need: u32,
}

impl Job {
    /// Flow time if the job leaves at the end of `departure`.
    pub fn flow_time(&self, departure: Slot) -> u64 {
        u64::from(departure) + 1 - u64::from(self.arrival)
    }

    /// `size * need`, the job's total server-slot volume.
    pub fn volume(&self) -> u64 {
        u64::from(self.size) * u64::from(self.need)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum NeedMode {
    /// K and every need are powers of two.
    PowerOfTwo,
    /// Needs anywhere in `1..=K`.
    General,
}

impl NeedMode {
    pub fn tag(self) -> &'static str {
        match self {
            NeedMode::PowerOfTwo => "p2",
            NeedMode::General => "gen",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SizeMode {
    Unit,
    Weighted,
}

impl SizeMode {
    pub fn tag(self) -> &'static str {
        match self {
            SizeMode::Unit => "unit",
            SizeMode::Weighted => "weighted",
        }
    }
}

pub fn is_power_of_two(x: u32) -> bool {
    x != 0 && x & (x - 1) == 0
}

/// A complete input: the job multiset plus the server count `k`.
///
/// Job ids are assigned in insertion order. An arrival-ordered index is kept
/// alongside so per-slot arrival lookups are logarithmic.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Trace {
    k: u32,
    need_mode: NeedMode,
    size_mode: SizeMode,
    jobs: Vec<Job>,
    by_arrival: Vec<usize>,
}

impl Trace {
    pub fn empty(k: u32, need_mode: NeedMode, size_mode: SizeMode) -> Self {
        Trace {
            k,
            need_mode,
            size_mode,
            jobs: Vec::new(),
            by_arrival: Vec::new(),
        }
    }

    /// Builds a trace from `(arrival, size, need)` triples.
    pub fn new<I>(k: u32, need_mode: NeedMode, size_mode: SizeMode, jobs: I) -> Self
    where
        I: IntoIterator<Item = (Slot, u32, u32)>,
    {
        let mut trace = Trace::empty(k, need_mode, size_mode);
        for (arrival, size, need) in jobs {
            trace.push(arrival, size, need);
        }
        trace
    }

    /// Power-of-two, unit-size trace from `(arrival, need)` pairs.
    pub fn unit<I>(k: u32, jobs: I) -> Self
    where
        I: IntoIterator<Item = (Slot, u32)>,
    {
        Trace::new(
            k,
            NeedMode::PowerOfTwo,
            SizeMode::Unit,
            jobs.into_iter().map(|(a, s)| (a, 1, s)),
        )
    }

    pub fn push(&mut self, arrival: Slot, size: u32, need: u32) -> JobId {
        let id = JobId(self.jobs.len() as u32);
        self.jobs.push(Job {
            id,
            arrival,
            size,
            need,
        });
        let idx = self.jobs.len() - 1;
        // ids grow with insertion, so (arrival, id) order only needs the arrival key
        let pos = self
            .by_arrival
            .partition_point(|&i| self.jobs[i].arrival <= arrival);
        self.by_arrival.insert(pos, idx);
        id
    }

    pub fn k(&self) -> u32 {
        self.k
    }

    pub fn need_mode(&self) -> NeedMode {
        self.need_mode
    }

    pub fn size_mode(&self) -> SizeMode {
        self.size_mode
    }

    pub fn jobs(&self) -> &[Job] {
        &self.jobs
    }

    pub fn len(&self) -> usize {
        self.jobs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.jobs.is_empty()
    }

    pub fn job(&self, id: JobId) -> Option<&Job> {
        self.jobs.get(id.0 as usize)
    }

    /// Jobs in `(arrival, id)` order.
    pub fn jobs_by_arrival(&self) -> impl Iterator<Item = &Job> + '_ {
        self.by_arrival.iter().map(move |&i| &self.jobs[i])
    }

    pub fn arrivals_at(&self, slot: Slot) -> impl Iterator<Item = &Job> + '_ {
        let lo = self
            .by_arrival
            .partition_point(|&i| self.jobs[i].arrival < slot);
        let hi = self
            .by_arrival
            .partition_point(|&i| self.jobs[i].arrival <= slot);
        self.by_arrival[lo..hi].iter().map(move |&i| &self.jobs[i])
    }

    /// Earliest arrival strictly after `slot`.
    pub fn next_arrival_after(&self, slot: Slot) -> Option<Slot> {
        let pos = self
            .by_arrival
            .partition_point(|&i| self.jobs[i].arrival <= slot);
        self.by_arrival.get(pos).map(|&i| self.jobs[i].arrival)
    }

    pub fn last_arrival(&self) -> Option<Slot> {
        self.by_arrival.last().map(|&i| self.jobs[i].arrival)
    }

    pub fn total_size(&self) -> u64 {
        self.jobs.iter().map(|j| u64::from(j.size)).sum()
    }

    pub fn max_size(&self) -> u32 {
        self.jobs.iter().map(|j| j.size).max().unwrap_or(0)
    }

    /// Copy of this trace with one extra job appended.
    pub fn with_job(&self, arrival: Slot, size: u32, need: u32) -> Trace {
        let mut t = self.clone();
        t.push(arrival, size, need);
        t
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Rule {
    ServerCountZero,
    ServerCountNotPowerOfTwo,
    ArrivalBeforeFirstSlot,
    SizeZero,
    SizeNotUnit,
    NeedOutOfRange,
    NeedNotPowerOfTwo,
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Rule::ServerCountZero => "K must be at least 1",
            Rule::ServerCountNotPowerOfTwo => "K not power of two",
            Rule::ArrivalBeforeFirstSlot => "arrival must be at least 1",
            Rule::SizeZero => "size must be at least 1",
            Rule::SizeNotUnit => "size must be 1 in unit mode",
            Rule::NeedOutOfRange => "need outside [1, K]",
            Rule::NeedNotPowerOfTwo => "need not power of two",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Violation {
    /// `None` for trace-level rules.
    pub job: Option<JobId>,
    pub rule: Rule,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.job {
            Some(id) => write!(f, "job {id}: {}", self.rule),
            None => write!(f, "trace: {}", self.rule),
        }
    }
}

/// Every broken job or trace invariant; empty when the trace is well formed.
pub fn validate_trace(trace: &Trace) -> Vec<Violation> {
    let mut out = Vec::new();
    let k = trace.k();
    let p2 = trace.need_mode() == NeedMode::PowerOfTwo;
    if k == 0 {
        out.push(Violation {
            job: None,
            rule: Rule::ServerCountZero,
        });
    } else if p2 && !is_power_of_two(k) {
        out.push(Violation {
            job: None,
            rule: Rule::ServerCountNotPowerOfTwo,
        });
    }
    for job in trace.jobs() {
        let mut flag = |rule| {
            out.push(Violation {
                job: Some(job.id),
                rule,
            })
        };
        if job.arrival == 0 {
            flag(Rule::ArrivalBeforeFirstSlot);
        }
        if job.size == 0 {
            flag(Rule::SizeZero);
        } else if trace.size_mode() == SizeMode::Unit && job.size != 1 {
            flag(Rule::SizeNotUnit);
        }
        if job.need == 0 || job.need > k {
            flag(Rule::NeedOutOfRange);
        } else if p2 && !is_power_of_two(job.need) {
            flag(Rule::NeedNotPowerOfTwo);
        }
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Bank {
    Reserved,
    Free,
}

impl fmt::Display for Bank {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Bank::Reserved => "reserved",
            Bank::Free => "free",
        })
    }
}

/// Number of K-server banks available to the scheduler.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Banks {
    One,
    Two,
}

impl Banks {
    pub fn count(self) -> u32 {
        match self {
            Banks::One => 1,
            Banks::Two => 2,
        }
    }

    pub fn from_count(n: u32) -> Option<Banks> {
        match n {
            1 => Some(Banks::One),
            2 => Some(Banks::Two),
            _ => None,
        }
    }

    pub fn capacity(self, bank: Bank, k: u32) -> u32 {
        match (self, bank) {
            (_, Bank::Reserved) | (Banks::Two, Bank::Free) => k,
            (Banks::One, Bank::Free) => 0,
        }
    }
}

/// Jobs served in one slot. Single-bank policies leave `free` empty.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
pub struct SlotDecision {
    pub reserved: Vec<JobId>,
    pub free: Vec<JobId>,
}

impl SlotDecision {
    pub fn single(reserved: Vec<JobId>) -> Self {
        SlotDecision {
            reserved,
            free: Vec::new(),
        }
    }

    pub fn split(reserved: Vec<JobId>, free: Vec<JobId>) -> Self {
        SlotDecision { reserved, free }
    }

    pub fn is_empty(&self) -> bool {
        self.reserved.is_empty() && self.free.is_empty()
    }

    pub fn len(&self) -> usize {
        self.reserved.len() + self.free.len()
    }

    pub fn all(&self) -> impl Iterator<Item = JobId> + '_ {
        self.reserved.iter().chain(self.free.iter()).copied()
    }

    pub fn contains(&self, id: JobId) -> bool {
        self.reserved.contains(&id) || self.free.contains(&id)
    }

    /// Both banks with ids sorted, for comparisons that ignore selection order.
    pub fn normalized(&self) -> SlotDecision {
        let mut r = self.reserved.clone();
        let mut f = self.free.clone();
        r.sort_unstable();
        f.sort_unstable();
        SlotDecision::split(r, f)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SlotClass {
    /// All K reserved-bank servers busy.
    Full,
    Relaxed,
}
