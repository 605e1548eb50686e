//! Slot-based simulator for online scheduling of multi-server jobs.
//!
//! Each job needs a fixed number of servers at once for a number of slots.
//! The crate provides the slot engine, the selection policies, an exact
//! offline optimum for small inputs, adversarial and random input
//! generators, runtime monitors and an experiment harness.

pub mod adversary;
pub mod cli;
pub mod engine;
pub mod error;
pub mod harness;
pub mod model;
pub mod oracle;
pub mod policy;
pub mod trace_io;

pub use engine::{advance_slot, check_schedule, classify_slot, replay, RunResult, SystemState};
pub use error::{Error, Result};
pub use harness::{competitive_ratio, simulate, MonitorKind, MonitorReport};
pub use model::{validate_trace, Bank, Banks, Job, JobId, NeedMode, SizeMode, Slot, SlotClass, SlotDecision, Trace};
pub use oracle::{opt_flow_time, OracleConfig, OracleResult};
pub use policy::{Policy, PolicyKind};
