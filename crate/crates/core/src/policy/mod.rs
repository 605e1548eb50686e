//! Slot-selection policies.

mod exact_fit;
mod rules;
mod window;

use std::fmt;
use std::str::FromStr;

use crate::engine::SystemState;
use crate::error::{Error, Result};
use crate::model::{Banks, NeedMode, SizeMode, SlotDecision, Trace};

pub use exact_fit::{exact_fit_subset, exact_fit_subset_bounded, SearchInconclusive, DEFAULT_NODE_BUDGET};
pub use rules::{
    greedy_select, immediate_unit_select, ra_select, ra_size_select, rae_select, sfa_select,
    theta0_select, theta_t_select,
};
pub use window::{
    effective_size_view, first_exact_window, leading_window, order_by_arrival, order_jobs,
    size_class, window_sets, windows, EffectiveSize, OrderKey, WindowSet,
};

/// Anything that picks a slot decision from the remaining set.
pub trait Policy {
    fn select(&self, state: &SystemState, k: u32) -> SlotDecision;
}

impl<F> Policy for F
where
    F: Fn(&SystemState, u32) -> SlotDecision,
{
    fn select(&self, state: &SystemState, k: u32) -> SlotDecision {
        self(state, k)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PolicyKind {
    Ra,
    Sfa,
    Greedy,
    RaE,
    RaSize,
    Theta0,
    ThetaT,
    ImmediateUnit,
}

impl PolicyKind {
    pub const ALL: [PolicyKind; 8] = [
        PolicyKind::Ra,
        PolicyKind::Sfa,
        PolicyKind::Greedy,
        PolicyKind::RaE,
        PolicyKind::RaSize,
        PolicyKind::Theta0,
        PolicyKind::ThetaT,
        PolicyKind::ImmediateUnit,
    ];

    pub fn name(self) -> &'static str {
        match self {
            PolicyKind::Ra => "ra",
            PolicyKind::Sfa => "sfa",
            PolicyKind::Greedy => "greedy",
            PolicyKind::RaE => "ra-e",
            PolicyKind::RaSize => "ra-size",
            PolicyKind::Theta0 => "theta0",
            PolicyKind::ThetaT => "thetaT",
            PolicyKind::ImmediateUnit => "immediate-unit",
        }
    }

    /// Banks the policy is defined for.
    pub fn banks(self) -> Banks {
        match self {
            PolicyKind::RaE => Banks::Two,
            _ => Banks::One,
        }
    }

    /// Rejects traces outside the policy's input class.
    pub fn check_trace(self, trace: &Trace) -> Result<()> {
        let mismatch = |reason: &str| {
            Err(Error::PolicyModeMismatch {
                policy: self.name().to_string(),
                reason: reason.to_string(),
            })
        };
        let p2 = trace.need_mode() == NeedMode::PowerOfTwo;
        let unit = trace.size_mode() == SizeMode::Unit;
        match self {
            PolicyKind::Ra | PolicyKind::Sfa if !p2 => mismatch("needs power-of-two mode"),
            PolicyKind::RaSize if !p2 => mismatch("needs power-of-two mode"),
            PolicyKind::RaSize => Ok(()),
            _ if !unit => mismatch("needs unit sizes"),
            _ => Ok(()),
        }
    }
}

impl Policy for PolicyKind {
    fn select(&self, state: &SystemState, k: u32) -> SlotDecision {
        match self {
            PolicyKind::Ra => ra_select(state, k),
            PolicyKind::Sfa => sfa_select(state, k),
            PolicyKind::Greedy => greedy_select(state, k),
            PolicyKind::RaE => rae_select(state, k),
            PolicyKind::RaSize => ra_size_select(state, k),
            PolicyKind::Theta0 => theta0_select(state, k),
            PolicyKind::ThetaT => theta_t_select(state, k),
            PolicyKind::ImmediateUnit => immediate_unit_select(state, k),
        }
    }
}

impl fmt::Display for PolicyKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for PolicyKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        PolicyKind::ALL
            .into_iter()
            .find(|p| p.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::UnknownName {
                kind: "policy",
                name: s.to_string(),
            })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn names_roundtrip() {
        for p in PolicyKind::ALL {
            assert_eq!(p.name().parse::<PolicyKind>().unwrap(), p);
        }
        assert!("fcfs".parse::<PolicyKind>().is_err());
    }

    #[test]
    fn mode_checks() {
        let weighted = Trace::new(8, NeedMode::PowerOfTwo, SizeMode::Weighted, [(1, 2, 1)]);
        let general = Trace::new(8, NeedMode::General, SizeMode::Unit, [(1, 1, 3)]);
        assert!(PolicyKind::Ra.check_trace(&weighted).is_err());
        assert!(PolicyKind::RaSize.check_trace(&weighted).is_ok());
        assert!(PolicyKind::Ra.check_trace(&general).is_err());
        assert!(PolicyKind::RaE.check_trace(&general).is_ok());
        assert!(PolicyKind::RaE.check_trace(&weighted).is_err());
        assert!(PolicyKind::RaSize.check_trace(&general).is_err());
    }

    #[test]
    fn closures_are_policies() {
        let idle = |_: &SystemState, _: u32| SlotDecision::default();
        assert!(idle.select(&SystemState::default(), 4).is_empty());
    }
}
