use std::path::Path;
use std::process::{Command, Output};

use mjsched::adversary::sfa_lb_trace;
use mjsched::harness::simulate;
use mjsched::model::{Banks, NeedMode, SizeMode, Trace};
use mjsched::policy::PolicyKind;
use mjsched::trace_io::{save_trace, write_trace};

fn mjsched(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mjsched"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

#[test]
fn gen_then_sim_matches_in_memory() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("t.trace");
    let g = mjsched(&["gen", "--scenario", "sfa-lb", "--k", "8", "--t", "3", "-o", p(&file)]);
    assert_eq!(g.status.code(), Some(0));
    assert_eq!(std::fs::read_to_string(&file).unwrap(), write_trace(&sfa_lb_trace(8, 3)));

    let s = mjsched(&["sim", "-i", p(&file), "--policy", "sfa", "--monitors", "none"]);
    assert_eq!(s.status.code(), Some(0));
    let expect = simulate(&sfa_lb_trace(8, 3), PolicyKind::Sfa, Banks::One, &[]).unwrap();
    let out = stdout(&s);
    assert!(out.contains("# seed=0"), "{out}");
    assert!(out.contains(&format!("flow={}\n", expect.flow_total)), "{out}");
}

#[test]
fn gen_is_deterministic_per_seed() {
    let args = ["gen", "--scenario", "rand-lb", "--k", "16", "--t", "50", "--seed", "9"];
    let a = stdout(&mjsched(&args));
    let b = stdout(&mjsched(&args));
    assert_eq!(a, b);
    let c = stdout(&mjsched(&["gen", "--scenario", "rand-lb", "--k", "16", "--t", "50", "--seed", "10"]));
    assert_ne!(a, c);
}

#[test]
fn ratio_on_small_instance() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("small.trace");
    let trace = Trace::unit(4, [(1, 1), (1, 1), (1, 2), (1, 4), (2, 2), (2, 1), (3, 4), (3, 1)]);
    save_trace(&file, &trace).unwrap();
    let o = mjsched(&["ratio", "-i", p(&file), "--policy", "ra", "--k", "4"]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    let line = out.lines().find(|l| l.starts_with("ratio = ")).expect("ratio line");
    let (n, d) = line["ratio = ".len()..].split_once('/').unwrap();
    let (n, d): (u64, u64) = (n.parse().unwrap(), d.parse().unwrap());
    assert!(n <= 5 * d, "{line}");
}

#[test]
fn ra_on_weighted_trace_is_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("w.trace");
    let trace = Trace::new(8, NeedMode::PowerOfTwo, SizeMode::Weighted, [(1, 3, 2)]);
    save_trace(&file, &trace).unwrap();
    let o = mjsched(&["sim", "-i", p(&file), "--policy", "ra"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("ra"));
}

#[test]
fn opt_then_check_schedule() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("s.trace");
    let sched = dir.path().join("s.sched");
    save_trace(&file, &Trace::unit(4, [(1, 4), (1, 2), (1, 2), (2, 1)])).unwrap();
    let o = mjsched(&["opt", "-i", p(&file), "-o", p(&sched)]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("optFlow=6"), "{}", stdout(&o));
    let c = mjsched(&["check", "-i", p(&file), "--schedule", p(&sched)]);
    assert_eq!(c.status.code(), Some(0));
    assert!(stdout(&c).contains("flow=6"));

    std::fs::write(&sched, "1: 0,1\n").unwrap();
    let bad = mjsched(&["check", "-i", p(&file), "--schedule", p(&sched)]);
    assert_eq!(bad.status.code(), Some(1));
}

#[test]
fn failing_monitor_exits_one() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("g.trace");
    // the optimum clears the unit jobs in slot 1, SFA leaves them to the end
    save_trace(&file, &sfa_lb_trace(8, 3)).unwrap();
    let o = mjsched(&["sim", "-i", p(&file), "--policy", "sfa", "--monitors", "dominance"]);
    assert_eq!(o.status.code(), Some(1), "{}", stdout(&o));
    assert!(stdout(&o).contains("dominance,false,2"), "{}", stdout(&o));
}

#[test]
fn usage_errors() {
    assert_eq!(mjsched(&["bogus"]).status.code(), Some(2));
    assert_eq!(mjsched(&["gen", "--scenario", "sfa-lb", "--k", "6", "--t", "2"]).status.code(), Some(2));
    assert_eq!(mjsched(&["exp", "--preset", "fig9"]).status.code(), Some(2));
    assert_eq!(mjsched(&["--help"]).status.code(), Some(0));
}

#[test]
fn exp_writes_csv() {
    let o = mjsched(&["exp", "--preset", "fig1", "--trials", "2", "--seed", "3"]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    assert!(out.starts_with("# seed=3\nscenario,K,param,policy,trials,mean_per_job_flow\n"), "{out}");
    assert_eq!(out.lines().count(), 2 + 8);
}
