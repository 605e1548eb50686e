//! Python bindings for `mjsched`.

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

use mjsched::adversary::{greedy_lb_trace, rand_lb_trace, sfa_gap_trace, sfa_lb_trace, stochastic_trace, NeedDist};
use mjsched::harness::{competitive_ratio, preset, run_experiment, simulate, write_csv, MonitorKind};
use mjsched::model::{Banks, NeedMode, SizeMode, Trace};
use mjsched::oracle::{opt_flow_time, OracleConfig};
use mjsched::policy::PolicyKind;
use mjsched::trace_io::{read_trace, write_schedule, write_trace};
use mjsched::{validate_trace, Error};

fn py_err(e: Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn parse<T: std::str::FromStr<Err = Error>>(s: &str) -> PyResult<T> {
    s.parse().map_err(py_err)
}

fn banks_of(n: Option<u32>, policy: PolicyKind) -> PyResult<Banks> {
    match n {
        None => Ok(policy.banks()),
        Some(n) => Banks::from_count(n).ok_or_else(|| PyValueError::new_err("banks must be 1 or 2")),
    }
}

/// A job trace on K servers.
#[pyclass(name = "Trace", skip_from_py_object)]
#[derive(Clone)]
pub struct PyTrace {
    inner: Trace,
}

#[pymethods]
impl PyTrace {
    /// `jobs` is a list of `(arrival, size, need)`.
    #[new]
    #[pyo3(signature = (k, jobs, general=false, weighted=false))]
    fn new(k: u32, jobs: Vec<(u32, u32, u32)>, general: bool, weighted: bool) -> Self {
        let need_mode = if general { NeedMode::General } else { NeedMode::PowerOfTwo };
        let size_mode = if weighted { SizeMode::Weighted } else { SizeMode::Unit };
        PyTrace {
            inner: Trace::new(k, need_mode, size_mode, jobs),
        }
    }

    #[staticmethod]
    fn parse(text: &str) -> PyResult<Self> {
        read_trace(text).map(|inner| PyTrace { inner }).map_err(py_err)
    }

    fn to_text(&self) -> String {
        write_trace(&self.inner)
    }

    #[getter]
    fn k(&self) -> u32 {
        self.inner.k()
    }

    fn jobs(&self) -> Vec<(u32, u32, u32)> {
        self.inner.jobs().iter().map(|j| (j.arrival, j.size, j.need)).collect()
    }

    /// Validation messages; empty when the trace is well formed.
    fn violations(&self) -> Vec<String> {
        validate_trace(&self.inner).iter().map(|v| v.to_string()).collect()
    }

    fn __len__(&self) -> usize {
        self.inner.len()
    }

    fn __repr__(&self) -> String {
        format!("Trace(k={}, jobs={})", self.inner.k(), self.inner.len())
    }
}

/// Outcome of one simulation.
#[pyclass(name = "RunResult", skip_from_py_object)]
pub struct PyRunResult {
    #[pyo3(get)]
    flow_total: u64,
    #[pyo3(get)]
    mean_flow: f64,
    #[pyo3(get)]
    last_slot: u32,
    #[pyo3(get)]
    per_slot_count: Vec<u32>,
    /// `(job id, departure slot)` pairs.
    #[pyo3(get)]
    departures: Vec<(u32, u32)>,
    /// `(name, holds, first violation slot)` per monitor.
    #[pyo3(get)]
    monitors: Vec<(String, bool, Option<u32>)>,
}

#[pyfunction]
#[pyo3(signature = (trace, policy, banks=None, monitors=None))]
fn run(trace: &PyTrace, policy: &str, banks: Option<u32>, monitors: Option<Vec<String>>) -> PyResult<PyRunResult> {
    let policy: PolicyKind = parse(policy)?;
    let banks = banks_of(banks, policy)?;
    let monitors = monitors
        .unwrap_or_default()
        .iter()
        .map(|m| parse::<MonitorKind>(m))
        .collect::<PyResult<Vec<_>>>()?;
    let r = simulate(&trace.inner, policy, banks, &monitors).map_err(py_err)?;
    Ok(PyRunResult {
        flow_total: r.flow_total,
        mean_flow: r.mean_flow(),
        last_slot: r.last_slot(),
        per_slot_count: r.per_slot_count.clone(),
        departures: r.departures.iter().map(|(id, s)| (id.0, *s)).collect(),
        monitors: r
            .monitor_reports
            .iter()
            .map(|m| (m.name.clone(), m.holds, m.first_violation.as_ref().map(|v| v.slot)))
            .collect(),
    })
}

/// Optimal total flow and the witness schedule in text form.
#[pyfunction]
fn opt_flow(trace: &PyTrace) -> PyResult<(u64, String)> {
    let r = opt_flow_time(&trace.inner, &OracleConfig::default()).map_err(py_err)?;
    Ok((r.opt_flow, write_schedule(&r.witness)))
}

/// `F_policy / F_OPT` as `(numerator, denominator)`.
#[pyfunction]
#[pyo3(signature = (trace, policy, banks=None))]
fn ratio(trace: &PyTrace, policy: &str, banks: Option<u32>) -> PyResult<(u64, u64)> {
    let policy: PolicyKind = parse(policy)?;
    let banks = banks_of(banks, policy)?;
    let r = competitive_ratio(&trace.inner, policy, banks, &OracleConfig::default()).map_err(py_err)?;
    Ok((*r.numer(), *r.denom()))
}

#[pyfunction]
#[pyo3(signature = (scenario, k, t=None, l1=None, l2=None, p=None, arr=None, horizon=100, spike=None, seed=0))]
#[allow(clippy::too_many_arguments)]
fn generate(
    scenario: &str,
    k: u32,
    t: Option<u32>,
    l1: Option<u32>,
    l2: Option<u32>,
    p: Option<f64>,
    arr: Option<u32>,
    horizon: u32,
    spike: Option<f64>,
    seed: u64,
) -> PyResult<PyTrace> {
    let need = |v: Option<u32>, name: &str| v.ok_or_else(|| PyValueError::new_err(format!("{scenario} needs {name}")));
    let inner = match scenario {
        "sfa-lb" => sfa_lb_trace(k, need(t, "t")?),
        "sfa-gap" => sfa_gap_trace(k, need(t, "t")?),
        "greedy-lb" => greedy_lb_trace(k, need(l1, "l1")?, need(l2, "l2")?),
        "rand-lb" => rand_lb_trace(k, need(t, "t")?, p.unwrap_or(1.0 / f64::from(k)), seed),
        "stochastic" => {
            let dist = spike.map_or(NeedDist::UniformPow2, NeedDist::Spike);
            stochastic_trace(k, need(arr, "arr")?, horizon, dist, seed)
        }
        other => return Err(PyValueError::new_err(format!("unknown scenario `{other}`"))),
    };
    Ok(PyTrace { inner })
}

/// CSV text for one of the figure presets.
#[pyfunction]
#[pyo3(signature = (name, trials=20, seed=0))]
fn experiment(name: &str, trials: u32, seed: u64) -> PyResult<String> {
    let config = preset(name, trials, seed).ok_or_else(|| PyValueError::new_err(format!("unknown preset `{name}`")))?;
    run_experiment(&config).map(|rows| write_csv(&rows)).map_err(py_err)
}

#[pyfunction]
fn policies() -> Vec<&'static str> {
    PolicyKind::ALL.iter().map(|p| p.name()).collect()
}

#[pymodule]
fn pymjsched(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyTrace>()?;
    m.add_class::<PyRunResult>()?;
    m.add_function(wrap_pyfunction!(run, m)?)?;
    m.add_function(wrap_pyfunction!(opt_flow, m)?)?;
    m.add_function(wrap_pyfunction!(ratio, m)?)?;
    m.add_function(wrap_pyfunction!(generate, m)?)?;
    m.add_function(wrap_pyfunction!(experiment, m)?)?;
    m.add_function(wrap_pyfunction!(policies, m)?)?;
    Ok(())
}
