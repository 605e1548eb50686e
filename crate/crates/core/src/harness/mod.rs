//! Simulation driver, monitors, ratios and experiment sweeps.

mod experiment;
mod monitors;

use num_rational::Ratio;

use crate::engine::{run_loop, RunResult};
use crate::error::{Error, Result};
use crate::model::{validate_trace, Banks, Trace};
use crate::oracle::{opt_flow_time, OracleConfig, OracleResult};
use crate::policy::{Policy, PolicyKind};

pub use experiment::{
    preset, run_experiment, theta_ratio_experiment, write_csv, ExpKind, ExperimentConfig,
    ExperimentRow, ParamValue, ThetaRow, CSV_HEADER, DEFAULT_TRIALS, PRESETS,
};
pub use monitors::{
    monitor_augmentation, monitor_dominance, monitor_full_bound, monitor_relaxed,
    monitor_volume_drift, monitor_work, state_digest, FirstViolation, MonitorKind, MonitorReport,
};

fn check_run(trace: &Trace, policy: PolicyKind, banks: Banks) -> Result<()> {
    let violations = validate_trace(trace);
    if let Some(v) = violations.first() {
        return Err(Error::InvalidTrace(v.to_string()));
    }
    policy.check_trace(trace)?;
    if policy == PolicyKind::RaE && banks != Banks::Two {
        return Err(Error::PolicyModeMismatch {
            policy: policy.name().to_string(),
            reason: "needs two server banks".to_string(),
        });
    }
    Ok(())
}

/// Runs `policy` to completion without monitors or slot log.
pub fn run_policy(trace: &Trace, policy: PolicyKind, banks: Banks) -> Result<RunResult> {
    check_run(trace, policy, banks)?;
    run_loop(trace, banks, false, |s| Ok(policy.select(s, trace.k())))
}

/// Runs any selection rule, recording the slot log.
pub fn run_recorded<P: Policy + ?Sized>(trace: &Trace, policy: &P, banks: Banks) -> Result<RunResult> {
    run_loop(trace, banks, true, |s| Ok(policy.select(s, trace.k())))
}

/// Runs `policy` and attaches the requested monitor reports. Monitors that
/// compare against the optimum solve the instance first.
pub fn simulate(
    trace: &Trace,
    policy: PolicyKind,
    banks: Banks,
    monitors: &[MonitorKind],
) -> Result<RunResult> {
    check_run(trace, policy, banks)?;
    let mut run = run_recorded(trace, &policy, banks)?;
    let opt = if monitors.iter().any(|m| m.needs_oracle()) {
        Some(opt_flow_time(trace, &OracleConfig::default())?)
    } else {
        None
    };
    let reports = monitors
        .iter()
        .map(|m| attach(*m, &run, trace, opt.as_ref()))
        .collect();
    run.monitor_reports = reports;
    Ok(run)
}

fn attach(m: MonitorKind, run: &RunResult, trace: &Trace, opt: Option<&OracleResult>) -> MonitorReport {
    match m {
        MonitorKind::Relaxed => monitor_relaxed(run),
        MonitorKind::Work => monitor_work(run, trace),
        MonitorKind::FullBound => monitor_full_bound(run, opt.expect("oracle solved")),
        MonitorKind::VolumeDrift => monitor_volume_drift(run, opt.expect("oracle solved"), trace),
        MonitorKind::Dominance => monitor_dominance(run, opt.expect("oracle solved")),
    }
}

/// `F_policy / F_OPT` as an exact fraction; the optimum always uses one bank.
pub fn competitive_ratio(
    trace: &Trace,
    policy: PolicyKind,
    banks: Banks,
    config: &OracleConfig,
) -> Result<Ratio<u64>> {
    let run = run_policy(trace, policy, banks)?;
    let opt = opt_flow_time(trace, config)?;
    Ok(flow_ratio(run.flow_total, opt.opt_flow))
}

/// `num / den`, with the empty instance counted as ratio 1.
pub fn flow_ratio(num: u64, den: u64) -> Ratio<u64> {
    if den == 0 {
        Ratio::from_integer(1)
    } else {
        Ratio::new(num, den)
    }
}
