//! The `mjsched` command line.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use crate::adversary::{
    adaptive_det_lb, greedy_lb_trace, rand_lb_trace, sfa_gap_trace, sfa_lb_trace,
    stochastic_trace, NeedDist,
};
use crate::engine::check_schedule;
use crate::error::{Error, Result};
use crate::harness::{
    competitive_ratio, preset, run_experiment, simulate, theta_ratio_experiment, write_csv,
    MonitorKind, DEFAULT_TRIALS, PRESETS,
};
use crate::model::{validate_trace, Banks, Trace};
use crate::oracle::{opt_flow_time, OracleConfig, ScenarioName};
use crate::policy::PolicyKind;
use crate::trace_io::{load_trace, read_schedule, write_schedule, write_trace};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VIOLATION: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "mjsched", version, about = "Multi-server job scheduling simulator")]
pub struct CliConfig {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate a trace file.
    Gen(GenArgs),
    /// Run a policy on a trace and print the summary and monitor lines.
    Sim(SimArgs),
    /// Solve a small trace exactly and print the optimal schedule.
    Opt(OptArgs),
    /// Print F_policy / F_OPT as an exact fraction.
    Ratio(RatioArgs),
    /// Run a Monte-Carlo experiment and write CSV.
    Exp(ExpArgs),
    /// Validate a trace, and optionally a schedule against it.
    Check(CheckArgs),
}

#[derive(Debug, Args)]
pub struct GenArgs {
    #[arg(long)]
    pub scenario: ScenarioName,
    #[arg(long)]
    pub k: u32,
    /// Main-phase length (sfa-lb, sfa-gap, det-lb, rand-lb).
    #[arg(long)]
    pub t: Option<u32>,
    #[arg(long)]
    pub l1: Option<u32>,
    #[arg(long)]
    pub l2: Option<u32>,
    /// Drain length for det-lb (default T).
    #[arg(long)]
    pub l: Option<u32>,
    /// Policy the det-lb adversary plays against.
    #[arg(long)]
    pub policy: Option<PolicyKind>,
    /// Unit-job probability for rand-lb (default 1/K).
    #[arg(long)]
    pub p: Option<f64>,
    /// Jobs per slot on average for stochastic.
    #[arg(long)]
    pub arr: Option<u32>,
    #[arg(long, default_value_t = 100)]
    pub horizon: u32,
    /// Spike probability; omit for uniform power-of-two needs.
    #[arg(long)]
    pub spike: Option<f64>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(short = 'o', long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SimArgs {
    #[arg(short = 'i', long)]
    pub input: PathBuf,
    #[arg(long)]
    pub policy: PolicyKind,
    /// 1 or 2; defaults to what the policy is defined for.
    #[arg(long)]
    pub banks: Option<u32>,
    /// Comma-separated monitor names, `all`, `none`, or `auto` (the
    /// monitors that apply to the chosen policy).
    #[arg(long, default_value = "auto")]
    pub monitors: String,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Args)]
pub struct OptArgs {
    #[arg(short = 'i', long)]
    pub input: PathBuf,
    /// Search node budget.
    #[arg(long)]
    pub budget: Option<u64>,
    /// Skip the instance-size guideline.
    #[arg(long)]
    pub allow_large: bool,
    #[arg(short = 'o', long)]
    pub output: Option<PathBuf>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Args)]
pub struct RatioArgs {
    #[arg(short = 'i', long)]
    pub input: PathBuf,
    #[arg(long)]
    pub policy: PolicyKind,
    /// Server count; must agree with the trace header when given.
    #[arg(long)]
    pub k: Option<u32>,
    #[arg(long)]
    pub banks: Option<u32>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Args)]
pub struct ExpArgs {
    /// fig1 .. fig5, or `theta` for the waiting-rule comparison.
    #[arg(long)]
    pub preset: String,
    #[arg(long, default_value_t = DEFAULT_TRIALS)]
    pub trials: u32,
    /// Server counts for `theta`.
    #[arg(long, value_delimiter = ',', default_values_t = [8u32, 16, 32])]
    pub ks: Vec<u32>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(short = 'o', long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct CheckArgs {
    #[arg(short = 'i', long)]
    pub input: PathBuf,
    #[arg(long)]
    pub schedule: Option<PathBuf>,
    #[arg(long)]
    pub banks: Option<u32>,
}

fn usage(flag: &str, msg: impl std::fmt::Display) -> Error {
    Error::Usage(format!("{flag}: {msg}"))
}

fn required<T>(v: Option<T>, flag: &str, scenario: &str) -> Result<T> {
    v.ok_or_else(|| Error::Usage(format!("{flag} is required by {scenario}")))
}

fn parse_banks(banks: Option<u32>, policy: Option<PolicyKind>) -> Result<Banks> {
    match banks {
        None => Ok(policy.map_or(Banks::One, PolicyKind::banks)),
        Some(n) => Banks::from_count(n).ok_or_else(|| usage("--banks", "must be 1 or 2")),
    }
}

pub fn parse_monitors(spec: &str, policy: PolicyKind) -> Result<Vec<MonitorKind>> {
    match spec.trim() {
        "auto" => Ok(match policy {
            PolicyKind::Ra | PolicyKind::RaSize => vec![MonitorKind::Relaxed],
            PolicyKind::RaE => vec![MonitorKind::Work],
            _ => Vec::new(),
        }),
        "none" | "" => Ok(Vec::new()),
        "all" => Ok(MonitorKind::ALL.to_vec()),
        list => list.split(',').map(|s| s.trim().parse()).collect(),
    }
}

/// Builds the trace `gen` would write.
pub fn generate(args: &GenArgs) -> Result<Trace> {
    let k = args.k;
    if k < 2 || !k.is_power_of_two() {
        return Err(usage("--k", "must be a power of two and at least 2"));
    }
    let trace = match args.scenario {
        ScenarioName::SfaLb => sfa_lb_trace(k, required(args.t, "--t", "sfa-lb")?),
        ScenarioName::SfaGap => sfa_gap_trace(k, required(args.t, "--t", "sfa-gap")?),
        ScenarioName::GreedyLb => greedy_lb_trace(
            k,
            required(args.l1, "--l1", "greedy-lb")?,
            required(args.l2, "--l2", "greedy-lb")?,
        ),
        ScenarioName::DetLb => {
            let t = required(args.t, "--t", "det-lb")?;
            let policy = required(args.policy, "--policy", "det-lb")?;
            adaptive_det_lb(&policy, policy.banks(), k, t, args.l.unwrap_or(t))?.trace
        }
        ScenarioName::RandLb => {
            let p = args.p.unwrap_or(1.0 / f64::from(k));
            if !(0.0..=1.0).contains(&p) {
                return Err(usage("--p", "must lie in [0, 1]"));
            }
            rand_lb_trace(k, required(args.t, "--t", "rand-lb")?, p, args.seed)
        }
        ScenarioName::Stochastic => {
            let dist = match args.spike {
                None => NeedDist::UniformPow2,
                Some(q) if (0.0..=1.0).contains(&q) => NeedDist::Spike(q),
                Some(_) => return Err(usage("--spike", "must lie in [0, 1]")),
            };
            let arr = required(args.arr, "--arr", "stochastic")?;
            stochastic_trace(k, arr, args.horizon, dist, args.seed)
        }
    };
    Ok(trace)
}

fn emit(out: &mut dyn Write, path: Option<&Path>, text: &str) -> Result<()> {
    match path {
        Some(p) => std::fs::write(p, text).map_err(Error::from),
        None => out.write_all(text.as_bytes()).map_err(Error::from),
    }
}

fn exit_for(err: &Error) -> i32 {
    match err {
        Error::CapacityExceeded { .. }
        | Error::UnknownJob { .. }
        | Error::DuplicateJob { .. }
        | Error::Stalled(_) => EXIT_VIOLATION,
        _ => EXIT_USAGE,
    }
}

fn cmd_gen(args: &GenArgs, out: &mut dyn Write) -> Result<i32> {
    let trace = generate(args)?;
    emit(out, args.output.as_deref(), &write_trace(&trace))?;
    if args.output.is_some() {
        writeln!(out, "# seed={} jobs={}", args.seed, trace.len())?;
    }
    Ok(EXIT_OK)
}

fn cmd_sim(args: &SimArgs, out: &mut dyn Write) -> Result<i32> {
    let trace = load_trace(&args.input)?;
    let banks = parse_banks(args.banks, Some(args.policy))?;
    let monitors = parse_monitors(&args.monitors, args.policy)?;
    let run = simulate(&trace, args.policy, banks, &monitors)?;
    writeln!(out, "# seed={}", args.seed)?;
    writeln!(
        out,
        "policy={} K={} banks={} jobs={}",
        args.policy,
        trace.k(),
        banks.count(),
        trace.len()
    )?;
    writeln!(out, "flow={}", run.flow_total)?;
    writeln!(out, "mean_flow={:.4}", run.mean_flow())?;
    writeln!(out, "last_slot={}", run.last_slot())?;
    for r in &run.monitor_reports {
        writeln!(out, "{}", r.csv_line())?;
    }
    Ok(if run.monitor_reports.iter().all(|r| r.holds) {
        EXIT_OK
    } else {
        EXIT_VIOLATION
    })
}

fn cmd_opt(args: &OptArgs, out: &mut dyn Write) -> Result<i32> {
    let trace = load_trace(&args.input)?;
    if let Some(v) = validate_trace(&trace).first() {
        return Err(Error::InvalidTrace(v.to_string()));
    }
    let mut config = OracleConfig {
        allow_large: args.allow_large,
        ..OracleConfig::default()
    };
    if let Some(b) = args.budget {
        config.node_budget = b;
    }
    let res = opt_flow_time(&trace, &config)?;
    let schedule = write_schedule(&res.witness);
    writeln!(out, "# seed={}", args.seed)?;
    writeln!(out, "optFlow={}", res.opt_flow)?;
    match &args.output {
        Some(p) => std::fs::write(p, &schedule)?,
        None => out.write_all(schedule.as_bytes())?,
    }
    Ok(EXIT_OK)
}

fn cmd_ratio(args: &RatioArgs, out: &mut dyn Write) -> Result<i32> {
    let trace = load_trace(&args.input)?;
    if let Some(k) = args.k {
        if k != trace.k() {
            return Err(usage("--k", format!("trace header says K={}", trace.k())));
        }
    }
    let banks = parse_banks(args.banks, Some(args.policy))?;
    let r = competitive_ratio(&trace, args.policy, banks, &OracleConfig::default())?;
    writeln!(out, "# seed={}", args.seed)?;
    writeln!(out, "ratio = {}/{}", r.numer(), r.denom())?;
    Ok(EXIT_OK)
}

fn cmd_exp(args: &ExpArgs, out: &mut dyn Write) -> Result<i32> {
    let csv = if args.preset == "theta" {
        let rows = theta_ratio_experiment(&args.ks, args.trials, args.seed)?;
        let mut s = String::from("K,policy,trials,mean_flow,mean_ref_flow,ratio\n");
        for r in rows {
            s.push_str(&format!(
                "{},{},{},{:.4},{:.4},{:.4}\n",
                r.k,
                r.policy,
                r.trials,
                r.mean_flow,
                r.mean_ref_flow,
                r.ratio()
            ));
        }
        s
    } else {
        let config = preset(&args.preset, args.trials, args.seed).ok_or_else(|| {
            usage(
                "--preset",
                format!("expected one of {} or theta", PRESETS.join(", ")),
            )
        })?;
        write_csv(&run_experiment(&config)?)
    };
    writeln!(out, "# seed={}", args.seed)?;
    emit(out, args.output.as_deref(), &csv)?;
    Ok(EXIT_OK)
}

fn cmd_check(args: &CheckArgs, out: &mut dyn Write) -> Result<i32> {
    let trace = load_trace(&args.input)?;
    let violations = validate_trace(&trace);
    for v in &violations {
        writeln!(out, "trace: {v}")?;
    }
    if !violations.is_empty() {
        return Ok(EXIT_VIOLATION);
    }
    writeln!(out, "trace ok: K={} jobs={}", trace.k(), trace.len())?;
    let Some(path) = &args.schedule else {
        return Ok(EXIT_OK);
    };
    let schedule = read_schedule(&std::fs::read_to_string(path)?)?;
    let check = check_schedule(&trace, &schedule, parse_banks(args.banks, None)?);
    if check.feasible {
        writeln!(out, "schedule ok: flow={}", check.flow_total)?;
        Ok(EXIT_OK)
    } else {
        let why = check
            .first_offense
            .map(|o| format!("slot {}: {}", o.slot, o.reason))
            .unwrap_or_else(|| "jobs left unfinished".to_string());
        writeln!(out, "schedule infeasible: {why}")?;
        Ok(EXIT_VIOLATION)
    }
}

/// Parses `args` (program name first) and runs the subcommand, writing to
/// the given streams. Returns the process exit status.
pub fn run_with<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match CliConfig::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            if e.use_stderr() {
                let _ = write!(err, "{e}");
                return EXIT_USAGE;
            }
            let _ = write!(out, "{e}");
            return EXIT_OK;
        }
    };
    let result = match &cli.command {
        Command::Gen(a) => cmd_gen(a, out),
        Command::Sim(a) => cmd_sim(a, out),
        Command::Opt(a) => cmd_opt(a, out),
        Command::Ratio(a) => cmd_ratio(a, out),
        Command::Exp(a) => cmd_exp(a, out),
        Command::Check(a) => cmd_check(a, out),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            exit_for(&e)
        }
    }
}

pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    run_with(args, &mut stdout.lock(), &mut stderr.lock())
}
