//! Monte-Carlo sweeps over the random input generators.

use std::fmt::Write as _;

use rayon::prelude::*;

use crate::adversary::{append_drain_tail, rand_lb_trace, stochastic_trace, NeedDist};
use crate::engine::RunResult;
use crate::error::Result;
use crate::model::{Banks, Trace};
use crate::policy::PolicyKind;

use super::run_policy;

pub const DEFAULT_TRIALS: u32 = 200;
pub const CSV_HEADER: &str = "scenario,K,param,policy,trials,mean_per_job_flow";
pub const PRESETS: [&str; 5] = ["fig1", "fig2", "fig3", "fig4", "fig5"];

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ExpKind {
    /// Uniform power-of-two needs; the swept parameter is the arrival rate.
    Uniform { horizon: u32 },
    /// Spiked needs at a fixed rate; the swept parameter is the spike
    /// probability.
    Spike { arr: u32, horizon: u32 },
    /// The randomized lower-bound input; the swept parameter is `p`.
    RandLb { t: u32 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ParamValue {
    Int(u32),
    Frac(u32, u32),
    /// `1/K` for whichever K the cell uses.
    InverseK,
}

impl ParamValue {
    pub fn value(self, k: u32) -> f64 {
        match self {
            ParamValue::Int(v) => f64::from(v),
            ParamValue::Frac(n, d) => f64::from(n) / f64::from(d),
            ParamValue::InverseK => 1.0 / f64::from(k),
        }
    }

    pub fn label(self) -> String {
        match self {
            ParamValue::Int(v) => v.to_string(),
            ParamValue::Frac(n, d) => format!("{n}/{d}"),
            ParamValue::InverseK => "1/K".to_string(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub scenario: String,
    pub kind: ExpKind,
    pub ks: Vec<u32>,
    pub params: Vec<ParamValue>,
    pub policies: Vec<PolicyKind>,
    pub trials: u32,
    pub seed_base: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentRow {
    pub scenario: String,
    pub k: u32,
    pub param: String,
    pub policy: PolicyKind,
    pub trials: u32,
    pub mean_per_job_flow: f64,
    pub seed_base: u64,
}

impl ExperimentRow {
    pub fn csv_line(&self) -> String {
        format!(
            "{},{},{},{},{},{:.4}",
            self.scenario, self.k, self.param, self.policy, self.trials, self.mean_per_job_flow
        )
    }
}

/// Named sweep configurations `fig1` to `fig5`.
pub fn preset(name: &str, trials: u32, seed_base: u64) -> Option<ExperimentConfig> {
    let arr_list = || [5, 10, 15, 20].map(ParamValue::Int).to_vec();
    let ra_sfa = vec![PolicyKind::Ra, PolicyKind::Sfa];
    let (kind, ks, params, policies) = match name {
        "fig1" => (ExpKind::Uniform { horizon: 100 }, vec![16], arr_list(), ra_sfa),
        "fig2" => (ExpKind::Uniform { horizon: 100 }, vec![32], arr_list(), ra_sfa),
        "fig3" => (
            ExpKind::Uniform { horizon: 100 },
            vec![8, 16, 32, 64, 128, 256, 512],
            vec![ParamValue::Int(5)],
            ra_sfa,
        ),
        "fig4" => (
            ExpKind::Spike { arr: 5, horizon: 100 },
            vec![8],
            [(1, 4), (2, 5), (3, 6), (4, 7), (5, 8), (6, 9)]
                .map(|(n, d)| ParamValue::Frac(n, d))
                .to_vec(),
            ra_sfa,
        ),
        "fig5" => (
            ExpKind::RandLb { t: 100 },
            vec![32, 64, 128, 256],
            vec![ParamValue::InverseK],
            vec![PolicyKind::ImmediateUnit, PolicyKind::Ra, PolicyKind::Sfa],
        ),
        _ => return None,
    };
    Some(ExperimentConfig {
        scenario: name.to_string(),
        kind,
        ks,
        params,
        policies,
        trials,
        seed_base,
    })
}

fn make_trace(kind: ExpKind, k: u32, param: ParamValue, seed: u64) -> Trace {
    match kind {
        ExpKind::Uniform { horizon } => {
            let arr = param.value(k).round() as u32;
            stochastic_trace(k, arr, horizon, NeedDist::UniformPow2, seed)
        }
        ExpKind::Spike { arr, horizon } => {
            stochastic_trace(k, arr, horizon, NeedDist::Spike(param.value(k)), seed)
        }
        ExpKind::RandLb { t } => rand_lb_trace(k, t, param.value(k), seed),
    }
}

fn per_job(run: &RunResult) -> f64 {
    run.mean_flow()
}

/// Rows in `(K, param, policy)` order. Every policy sees the same trace in a
/// given trial, and trial `i` uses seed `seed_base + i`.
pub fn run_experiment(config: &ExperimentConfig) -> Result<Vec<ExperimentRow>> {
    let trials = config.trials.max(1);
    let mut rows = Vec::new();
    for &k in &config.ks {
        for &param in &config.params {
            let per_trial: Vec<Vec<f64>> = (0..trials)
                .into_par_iter()
                .map(|i| {
                    let trace = make_trace(config.kind, k, param, config.seed_base + u64::from(i));
                    config
                        .policies
                        .iter()
                        .map(|&p| run_policy(&trace, p, p.banks()).map(|r| per_job(&r)))
                        .collect::<Result<Vec<f64>>>()
                })
                .collect::<Result<_>>()?;
            for (pi, &policy) in config.policies.iter().enumerate() {
                let sum: f64 = per_trial.iter().map(|v| v[pi]).sum();
                rows.push(ExperimentRow {
                    scenario: config.scenario.clone(),
                    k,
                    param: param.label(),
                    policy,
                    trials,
                    mean_per_job_flow: sum / f64::from(trials),
                    seed_base: config.seed_base,
                });
            }
        }
    }
    Ok(rows)
}

pub fn write_csv(rows: &[ExperimentRow]) -> String {
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for r in rows {
        let _ = writeln!(out, "{}", r.csv_line());
    }
    out
}

/// Mean total flow of a waiting rule against its reference schedule on the
/// randomized lower-bound input.
#[derive(Debug, Clone, PartialEq)]
pub struct ThetaRow {
    pub k: u32,
    pub policy: PolicyKind,
    pub trials: u32,
    pub mean_flow: f64,
    pub mean_ref_flow: f64,
}

impl ThetaRow {
    pub fn ratio(&self) -> f64 {
        self.mean_flow / self.mean_ref_flow
    }
}

/// Slots in `1..=t` where no need-K job was served.
fn wasted_slots(run: &RunResult, trace: &Trace, t: u32) -> u32 {
    let k = trace.k();
    let log = run.log.as_ref().expect("recorded run");
    log.iter()
        .take(t as usize)
        .filter(|r| !r.decision.all().any(|id| trace.job(id).is_some_and(|j| j.need == k)))
        .count() as u32
}

/// For each K, compares θ=0 (serve unit jobs at once) and θ=T (batch unit
/// jobs) with `p = 1/K`:
///
/// * θ=0 runs `T = K²` slots followed by a quiet stretch of half its wasted
///   slots and `T·K` slots of two need-K/2 jobs; its reference is the
///   batching schedule on the same trace.
/// * θ=T runs `T = 4K` slots and no tail; its reference serves unit jobs
///   immediately.
pub fn theta_ratio_experiment(ks: &[u32], trials: u32, seed_base: u64) -> Result<Vec<ThetaRow>> {
    let trials = trials.max(1);
    let mut rows = Vec::new();
    for &k in ks {
        let p = 1.0 / f64::from(k);

        let zero: Vec<(u64, u64)> = (0..trials)
            .into_par_iter()
            .map(|i| {
                let t = k * k;
                let mut trace = rand_lb_trace(k, t, p, seed_base + u64::from(i));
                let probe = super::run_recorded(&trace, &PolicyKind::Theta0, Banks::One)?;
                let t1 = wasted_slots(&probe, &trace, t);
                append_drain_tail(&mut trace, t, t1.div_ceil(2), t * k);
                let f = run_policy(&trace, PolicyKind::Theta0, Banks::One)?.flow_total;
                let r = run_policy(&trace, PolicyKind::ThetaT, Banks::One)?.flow_total;
                Ok((f, r))
            })
            .collect::<Result<_>>()?;

        let full: Vec<(u64, u64)> = (0..trials)
            .into_par_iter()
            .map(|i| {
                let trace = rand_lb_trace(k, 4 * k, p, seed_base + u64::from(i));
                let f = run_policy(&trace, PolicyKind::ThetaT, Banks::One)?.flow_total;
                let r = run_policy(&trace, PolicyKind::ImmediateUnit, Banks::One)?.flow_total;
                Ok((f, r))
            })
            .collect::<Result<_>>()?;

        for (policy, v) in [(PolicyKind::Theta0, zero), (PolicyKind::ThetaT, full)] {
            let (f, r) = v
                .iter()
                .fold((0u64, 0u64), |(a, b), &(x, y)| (a + x, b + y));
            rows.push(ThetaRow {
                k,
                policy,
                trials,
                mean_flow: f as f64 / f64::from(trials),
                mean_ref_flow: r as f64 / f64::from(trials),
            });
        }
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn presets_have_expected_cells() {
        let c = preset("fig1", 3, 0).unwrap();
        assert_eq!(c.ks.len() * c.params.len() * c.policies.len(), 8);
        assert_eq!(preset("fig3", 3, 0).unwrap().ks.len(), 7);
        assert_eq!(preset("fig4", 3, 0).unwrap().params.len(), 6);
        assert!(preset("fig9", 3, 0).is_none());
    }

    #[test]
    fn deterministic_rows() {
        let mut c = preset("fig1", 1, 7).unwrap();
        c.params.truncate(1);
        let a = run_experiment(&c).unwrap();
        let b = run_experiment(&c).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.len(), 2);
    }

    #[test]
    fn csv_shape() {
        let mut c = preset("fig5", 2, 0).unwrap();
        c.ks.truncate(1);
        let rows = run_experiment(&c).unwrap();
        let csv = write_csv(&rows);
        let mut lines = csv.lines();
        assert_eq!(lines.next(), Some(CSV_HEADER));
        let first = lines.next().unwrap();
        assert!(first.starts_with("fig5,32,1/K,immediate-unit,2,"), "{first}");
    }

    #[test]
    fn param_labels() {
        assert_eq!(ParamValue::Frac(2, 5).label(), "2/5");
        assert!((ParamValue::InverseK.value(8) - 0.125).abs() < 1e-12);
    }
}
