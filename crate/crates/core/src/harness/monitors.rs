//! Runtime checks of the structural bounds behind the ratio guarantees.

use std::fmt;
use std::str::FromStr;

use crate::engine::{RunResult, SlotRecord};
use crate::error::{Error, Result};
use crate::model::{Banks, JobId, SizeMode, Slot, SlotClass, Trace};
use crate::oracle::OracleResult;
use crate::policy::{size_class, Policy};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FirstViolation {
    pub slot: Slot,
    /// Quantities at the offending slot plus a digest of the remaining set.
    pub details: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MonitorReport {
    pub name: String,
    pub holds: bool,
    pub first_violation: Option<FirstViolation>,
}

impl MonitorReport {
    fn pass(name: &str) -> Self {
        MonitorReport {
            name: name.to_string(),
            holds: true,
            first_violation: None,
        }
    }

    fn fail(name: &str, slot: Slot, details: String) -> Self {
        MonitorReport {
            name: name.to_string(),
            holds: false,
            first_violation: Some(FirstViolation { slot, details }),
        }
    }

    /// `name,holds,first_violation_slot`
    pub fn csv_line(&self) -> String {
        let slot = self
            .first_violation
            .as_ref()
            .map(|v| v.slot.to_string())
            .unwrap_or_default();
        format!("{},{},{}", self.name, self.holds, slot)
    }
}

impl fmt::Display for MonitorReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.csv_line())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum MonitorKind {
    Relaxed,
    FullBound,
    VolumeDrift,
    Work,
    Dominance,
}

impl MonitorKind {
    pub const ALL: [MonitorKind; 5] = [
        MonitorKind::Relaxed,
        MonitorKind::FullBound,
        MonitorKind::VolumeDrift,
        MonitorKind::Work,
        MonitorKind::Dominance,
    ];

    pub fn name(self) -> &'static str {
        match self {
            MonitorKind::Relaxed => "relaxed",
            MonitorKind::FullBound => "full-bound",
            MonitorKind::VolumeDrift => "volume-drift",
            MonitorKind::Work => "work",
            MonitorKind::Dominance => "dominance",
        }
    }

    pub fn needs_oracle(self) -> bool {
        matches!(
            self,
            MonitorKind::FullBound | MonitorKind::VolumeDrift | MonitorKind::Dominance
        )
    }
}

impl FromStr for MonitorKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        MonitorKind::ALL
            .into_iter()
            .find(|m| m.name() == s)
            .ok_or_else(|| Error::UnknownName {
                kind: "monitor",
                name: s.to_string(),
            })
    }
}

/// FNV-1a over `(id, remaining)` pairs.
pub fn state_digest(remaining: &[(JobId, u32)]) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for &(id, r) in remaining {
        for b in id.0.to_le_bytes().into_iter().chain(r.to_le_bytes()) {
            h ^= u64::from(b);
            h = h.wrapping_mul(0x0100_0000_01b3);
        }
    }
    h
}

fn digest_at(run: &RunResult, slot: Slot) -> String {
    match run.record(slot) {
        Some(r) => format!("digest={:016x}", state_digest(&r.remaining)),
        None => "digest=none".to_string(),
    }
}

fn slots(run: &RunResult) -> impl Iterator<Item = (Slot, u32, SlotClass)> + '_ {
    run.per_slot_count
        .iter()
        .zip(&run.slot_class)
        .enumerate()
        .map(|(i, (&n, &c))| (i as Slot + 1, n, c))
}

/// Every relaxed slot holds at most K jobs.
pub fn monitor_relaxed(run: &RunResult) -> MonitorReport {
    const NAME: &str = "relaxed";
    let k = run.k;
    for (t, n, c) in slots(run) {
        if c == SlotClass::Relaxed && n > k {
            return MonitorReport::fail(NAME, t, format!("n={n} K={k} {}", digest_at(run, t)));
        }
    }
    MonitorReport::pass(NAME)
}

/// Every full slot holds at most `K − 1 + 2·n_OPT(t)` jobs.
pub fn monitor_full_bound(run: &RunResult, opt: &OracleResult) -> MonitorReport {
    const NAME: &str = "full-bound";
    let k = u64::from(run.k);
    for (t, n, c) in slots(run) {
        if c != SlotClass::Full {
            continue;
        }
        let n_opt = u64::from(opt.remaining_at(t));
        if u64::from(n) > k - 1 + 2 * n_opt {
            return MonitorReport::fail(
                NAME,
                t,
                format!("n={n} n_opt={n_opt} K={k} {}", digest_at(run, t)),
            );
        }
    }
    MonitorReport::pass(NAME)
}

/// Per-class volumes of one remaining set: index `a` holds the volume of
/// class `a` jobs.
fn class_volumes(
    remaining: &[(JobId, u32)],
    trace: &Trace,
    weighted: bool,
    classes: usize,
) -> Vec<u64> {
    let mut v = vec![0u64; classes];
    for &(id, rem) in remaining {
        let need = u64::from(trace.job(id).expect("job in trace").need);
        let eff = u64::from(rem) * need;
        let class = if weighted { size_class(eff) } else { size_class(need) };
        v[class as usize] += eff;
    }
    v
}

fn remaining_at(run: &RunResult, t: Slot) -> &[(JobId, u32)] {
    run.record(t).map(|r: &SlotRecord| r.remaining.as_slice()).unwrap_or(&[])
}

/// At every full slot and every class threshold `a`, the policy's volume in
/// classes `≤ a` exceeds the optimum's by at most `K − 1` (unit sizes, classes
/// by need) or `(K − 1)·2^{a+1}` (weighted, classes by remaining effective
/// size).
pub fn monitor_volume_drift(run: &RunResult, opt: &OracleResult, trace: &Trace) -> MonitorReport {
    const NAME: &str = "volume-drift";
    let k = i128::from(run.k);
    let weighted = trace.size_mode() == SizeMode::Weighted;
    let top = u64::from(trace.k()) * u64::from(trace.max_size().max(1));
    let classes = size_class(top.max(1)) as usize + 1;
    for (t, _, c) in slots(run) {
        if c != SlotClass::Full {
            continue;
        }
        let mine = class_volumes(remaining_at(run, t), trace, weighted, classes);
        let theirs = class_volumes(remaining_at(&opt.run, t), trace, weighted, classes);
        let (mut acc_m, mut acc_o) = (0i128, 0i128);
        for a in 0..classes {
            acc_m += i128::from(mine[a]);
            acc_o += i128::from(theirs[a]);
            let bound = if weighted { (k - 1) << (a + 1) } else { k - 1 };
            let delta = acc_m - acc_o;
            if delta > bound {
                return MonitorReport::fail(
                    NAME,
                    t,
                    format!("a={a} dV={delta} bound={bound} {}", digest_at(run, t)),
                );
            }
        }
    }
    MonitorReport::pass(NAME)
}

/// Two-bank work check: whenever the remaining needs total at least K, at
/// least K servers across both banks are busy; otherwise every remaining
/// job is served.
pub fn monitor_work(run: &RunResult, trace: &Trace) -> MonitorReport {
    const NAME: &str = "work";
    let k = u64::from(run.k);
    let need = |id: JobId| u64::from(trace.job(id).expect("job").need);
    let Some(log) = run.log.as_ref() else {
        return MonitorReport::fail(NAME, 0, "run has no slot log".to_string());
    };
    for rec in log {
        if rec.remaining.is_empty() {
            continue;
        }
        let total: u64 = rec.remaining.iter().map(|&(id, _)| need(id)).sum();
        let busy: u64 = rec.decision.all().map(need).sum();
        let ok = if total >= k {
            busy >= k
        } else {
            rec.decision.len() == rec.remaining.len()
        };
        if !ok {
            let reserved: u64 = rec.decision.reserved.iter().map(|&id| need(id)).sum();
            return MonitorReport::fail(
                NAME,
                rec.slot,
                format!(
                    "total_need={total} reserved={reserved} free={} K={k} digest={:016x}",
                    busy - reserved,
                    state_digest(&rec.remaining)
                ),
            );
        }
    }
    MonitorReport::pass(NAME)
}

/// The k-th departure of the run is no later than the k-th departure of the
/// optimum, for every k; also checks the implied flow comparison.
pub fn monitor_dominance(run: &RunResult, opt: &OracleResult) -> MonitorReport {
    const NAME: &str = "dominance";
    let mine = run.sorted_departure_slots();
    let theirs = opt.run.sorted_departure_slots();
    if mine.len() != theirs.len() {
        return MonitorReport::fail(
            NAME,
            0,
            format!("departure counts differ: {} vs {}", mine.len(), theirs.len()),
        );
    }
    for (i, (&d, &o)) in mine.iter().zip(&theirs).enumerate() {
        if d > o {
            return MonitorReport::fail(
                NAME,
                d,
                format!("departure #{} at {d} after optimum's {o}", i + 1),
            );
        }
    }
    if run.flow_total > opt.opt_flow {
        let last = run.last_slot();
        return MonitorReport::fail(
            NAME,
            last,
            format!("flow {} > optimum {}", run.flow_total, opt.opt_flow),
        );
    }
    MonitorReport::pass(NAME)
}

/// Runs `policy` on `base` and on `base` plus one extra job and checks that
/// the cumulative departure count never drops.
pub fn monitor_augmentation<P: Policy + ?Sized>(
    policy: &P,
    banks: Banks,
    base: &Trace,
    extra: (Slot, u32, u32),
) -> Result<MonitorReport> {
    const NAME: &str = "augmentation";
    let (a, w, s) = extra;
    let bigger = base.with_job(a, w, s);
    let k = base.k();
    let r1 = crate::engine::run_loop(base, banks, false, |st| Ok(policy.select(st, k)))?;
    let r2 = crate::engine::run_loop(&bigger, banks, false, |st| Ok(policy.select(st, k)))?;
    let horizon = r1.last_slot().max(r2.last_slot());
    let c1 = r1.cumulative_departures(horizon);
    let c2 = r2.cumulative_departures(horizon);
    for (i, (x, y)) in c1.iter().zip(&c2).enumerate() {
        if y < x {
            return Ok(MonitorReport::fail(
                NAME,
                i as Slot + 1,
                format!("departed {y} with the extra job vs {x} without"),
            ));
        }
    }
    Ok(MonitorReport::pass(NAME))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::SlotClass;

    fn fake_run(k: u32, counts: Vec<u32>, classes: Vec<SlotClass>) -> RunResult {
        RunResult {
            k,
            banks: Banks::One,
            departures: Default::default(),
            flow_total: counts.iter().map(|&c| u64::from(c)).sum(),
            per_slot_count: counts,
            slot_class: classes,
            monitor_reports: Vec::new(),
            log: None,
        }
    }

    #[test]
    fn relaxed_monitor_flags_fake_run() {
        let run = fake_run(4, vec![3, 5], vec![SlotClass::Relaxed, SlotClass::Relaxed]);
        let r = monitor_relaxed(&run);
        assert!(!r.holds);
        assert_eq!(r.first_violation.unwrap().slot, 2);
        let run = fake_run(4, vec![9, 2], vec![SlotClass::Full, SlotClass::Relaxed]);
        assert!(monitor_relaxed(&run).holds);
        assert!(monitor_relaxed(&fake_run(4, vec![], vec![])).holds);
    }

    #[test]
    fn csv_line_format() {
        assert_eq!(MonitorReport::pass("relaxed").csv_line(), "relaxed,true,");
        assert_eq!(
            MonitorReport::fail("work", 7, String::new()).csv_line(),
            "work,false,7"
        );
    }

    #[test]
    fn digest_is_order_sensitive_and_stable() {
        let a = [(JobId(0), 1), (JobId(1), 2)];
        let b = [(JobId(1), 2), (JobId(0), 1)];
        assert_eq!(state_digest(&a), state_digest(&a));
        assert_ne!(state_digest(&a), state_digest(&b));
    }

    #[test]
    fn monitor_names_parse() {
        for m in MonitorKind::ALL {
            assert_eq!(m.name().parse::<MonitorKind>().unwrap(), m);
        }
    }
}
