//! Input constructions: fixed lower-bound traces, the adaptive adversary,
//! and seeded random generators.

mod adaptive;
mod fixed;
mod random;

pub use adaptive::{
    adaptive_det_lb, verify_transcript, AdaptiveOutcome, AdaptiveSession, AdversaryClass, Phase,
    TranscriptEntry,
};
pub use fixed::{append_drain_tail, greedy_lb_trace, sfa_gap_trace, sfa_lb_trace};
pub use random::{rand_lb_trace, rng, stochastic_trace, NeedDist};
