#![no_std]
#![forbid(unsafe_code)]

//! Bayesian adaptive mastery assessment.
//!
//! A student answering homogeneous items is summarised by a correctness
//! probability `θ` and a response rate `λ`. Each response is scored as
//! `Z = P·(1 − T/d)⁺`, the unknown `(θ, λ)` are tracked through conjugate
//! Beta/Gamma posteriors, and a depth-limited discounted stopping recursion
//! decides after every response whether to stop (mastered / not mastered) or
//! to administer another item.
//!
//! The crate is `no_std` and only needs `alloc`. IO, file formats and the
//! command-line front end live in the `bama` crate.
//!
//! Modules:
//! - [`score`]: the per-response score and its summary statistics.
//! - [`posterior`]: observations, the information state and posterior-predictive quantities.
//! - [`quadrature`]: Gauss–Legendre rules used for predictive expectations.
//! - [`policy`]: the stopping recursion, decision rules and the affine value case study.
//! - [`mastery`]: the mastery-profile table.
//! - [`baseline`]: the predictive-stability baseline stopping rule.
//! - [`simulator`]: synthetic students and full assessment runs.

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod baseline;
pub mod error;
pub mod mastery;
pub mod policy;
pub mod posterior;
pub mod quadrature;
pub mod score;
pub mod simulator;

pub use baseline::{baseline_stability_decide, BaselineConfig};
pub use error::{Error, Result};
pub use mastery::{classify, Directive, MasteryClass, MasteryLabel};
pub use policy::{
    bellman_value, decide, expectimax_value, failure_rule, linear_continuation, linear_value,
    Action, Decision, FailureMode, History, LinearValueWeights, PolicyConfig, StopReason,
};
pub use posterior::{
    expected_partial_credit, expected_z, profile_z_moments, rt_density, Observation,
    PosteriorState, StudentProfile,
};
pub use score::{z_score, ScoreSummary, TimeLimit};
pub use simulator::{
    classify_profile, run_assessment, run_assessment_stream, run_baseline, sample_response,
    student_rng, BaselineRun, ProfileClass, ProfileLabel, Step, Transcript,
};
