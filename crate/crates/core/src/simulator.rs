//! Synthetic students and full adaptive assessment runs.
//!
//! Randomness comes from ChaCha8 streams: a run is identified by a `seed`
//! and a `stream` index (one stream per student). Each item draws the
//! correctness flag first and the response time second, so a transcript is a
//! pure function of `(profile, prior, config, seed, stream)` on every platform.

use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Bernoulli, Distribution, Exp};
use serde::{Deserialize, Serialize};

use crate::baseline::{baseline_stability_decide, BaselineConfig};
use crate::error::Result;
use crate::mastery::{classify, MasteryClass};
use crate::policy::{decide, Action, Decision, History, PolicyConfig};
use crate::posterior::{Observation, PosteriorState, StudentProfile};
use crate::score::ScoreSummary;

/// The RNG for student `stream` of experiment `seed`.
pub fn student_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Draws one response: `p ~ Bernoulli(θ)`, then `t ~ Exponential(λ)`.
///
/// Times are not truncated at `d`; truncation only happens in the score.
pub fn sample_response<R: Rng + ?Sized>(profile: &StudentProfile, rng: &mut R) -> Observation {
    let correct = Bernoulli::new(profile.theta.clamp(0.0, 1.0))
        .map(|b| b.sample(rng))
        .unwrap_or(false);
    let time = Exp::new(profile.lambda)
        .map(|e| e.sample(rng))
        .unwrap_or(f64::INFINITY);
    Observation { correct, time }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Step {
    /// 1-based item index.
    pub item: u32,
    pub observation: Observation,
    pub posterior: PosteriorState,
    pub summary: ScoreSummary,
    pub decision: Decision,
}

/// Full record of one assessment. The last step carries the single stop decision.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Transcript {
    pub config: PolicyConfig,
    pub profile: StudentProfile,
    pub prior: PosteriorState,
    pub prior_summary: ScoreSummary,
    pub steps: Vec<Step>,
    pub final_class: MasteryClass,
    pub seed: u64,
    pub stream: u64,
}

impl Transcript {
    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    pub fn final_decision(&self) -> Option<&Decision> {
        self.steps.last().map(|s| &s.decision)
    }

    pub fn final_posterior(&self) -> PosteriorState {
        self.steps.last().map_or(self.prior, |s| s.posterior)
    }

    pub fn final_summary(&self) -> ScoreSummary {
        self.steps.last().map_or(self.prior_summary, |s| s.summary)
    }

    /// Expected-score trajectory starting at the prior mean.
    pub fn estimates(&self) -> Vec<f64> {
        core::iter::once(self.prior_summary.mean)
            .chain(self.steps.iter().map(|s| s.summary.mean))
            .collect()
    }

    /// Re-folds the observations from the prior and compares every posterior.
    pub fn is_self_consistent(&self) -> bool {
        let mut state = self.prior;
        let mut stops = 0;
        for step in &self.steps {
            state = state.update(&step.observation);
            if state != step.posterior {
                return false;
            }
            if step.decision.action.is_stop() {
                stops += 1;
            }
        }
        let last_stops = self
            .final_decision()
            .is_some_and(|d| d.action != Action::Continue);
        stops == 1 && last_stops && self.steps.len() <= self.config.max_items as usize
    }
}

/// Runs an assessment on stream 0 of `seed`.
pub fn run_assessment(
    profile: &StudentProfile,
    prior: &PosteriorState,
    cfg: &PolicyConfig,
    seed: u64,
) -> Result<Transcript> {
    run_assessment_stream(profile, prior, cfg, seed, 0)
}

/// Samples, updates and decides until the policy stops or `max_items` is reached.
pub fn run_assessment_stream(
    profile: &StudentProfile,
    prior: &PosteriorState,
    cfg: &PolicyConfig,
    seed: u64,
    stream: u64,
) -> Result<Transcript> {
    profile.validate()?;
    prior.validate()?;
    cfg.validate()?;
    let mut rng = student_rng(seed, stream);
    let prior_summary = prior.expected_z(cfg.d);
    let mut history = History::new(prior_summary.mean);
    let mut state = *prior;
    let mut steps = Vec::with_capacity(cfg.max_items as usize);
    for item in 1..=cfg.max_items {
        let observation = sample_response(profile, &mut rng);
        state = state.update(&observation);
        let summary = state.expected_z(cfg.d);
        history.push(observation.correct, summary.mean);
        let decision = decide(&state, &history, cfg)?;
        steps.push(Step {
            item,
            observation,
            posterior: state,
            summary,
            decision,
        });
        if decision.action.is_stop() {
            break;
        }
    }
    let final_mean = steps.last().map_or(prior_summary.mean, |s| s.summary.mean);
    Ok(Transcript {
        config: *cfg,
        profile: *profile,
        prior: *prior,
        prior_summary,
        steps,
        final_class: classify(final_mean.clamp(0.0, 1.0))?,
        seed,
        stream,
    })
}

/// A run of the predictive-stability baseline.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BaselineRun {
    pub observations: Vec<Observation>,
    /// Predicted probability of a correct answer, starting with the prior's.
    pub predictions: Vec<f64>,
    pub decision: Decision,
}

impl BaselineRun {
    pub fn len(&self) -> usize {
        self.observations.len()
    }

    pub fn is_empty(&self) -> bool {
        self.observations.is_empty()
    }
}

/// Samples and updates until the baseline rule stops, using the same RNG
/// stream layout as [`run_assessment_stream`].
pub fn run_baseline(
    profile: &StudentProfile,
    prior: &PosteriorState,
    cfg: &BaselineConfig,
    seed: u64,
    stream: u64,
) -> Result<BaselineRun> {
    profile.validate()?;
    prior.validate()?;
    cfg.validate()?;
    let mut rng = student_rng(seed, stream);
    let mut state = *prior;
    let mut observations = Vec::new();
    let mut predictions = alloc::vec![prior.prob_correct()];
    loop {
        let obs = sample_response(profile, &mut rng);
        state = state.update(&obs);
        observations.push(obs);
        predictions.push(state.prob_correct());
        let decision = baseline_stability_decide(&predictions, cfg)?;
        if decision.action.is_stop() {
            return Ok(BaselineRun {
                observations,
                predictions,
                decision,
            });
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ProfileLabel {
    Fluent,
    Accurate,
    Average,
    WheelSpinningOrUnengaged,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProfileClass {
    pub label: ProfileLabel,
    pub theta_range: Interval,
    pub lambda_range: Interval,
}

impl ProfileLabel {
    /// Nominal `(θ, λ)` ranges of the class.
    pub fn class(self) -> ProfileClass {
        let iv = |lo, hi| Interval { lo, hi };
        let (theta_range, lambda_range) = match self {
            ProfileLabel::Fluent => (iv(0.75, 1.0), iv(0.5, 1.0)),
            ProfileLabel::Accurate => (iv(0.75, 1.0), iv(0.0, 0.5)),
            ProfileLabel::Average => (iv(0.25, 0.75), iv(0.0, 0.5)),
            ProfileLabel::WheelSpinningOrUnengaged => (iv(0.0, 0.25), iv(0.0, f64::INFINITY)),
        };
        ProfileClass {
            label: self,
            theta_range,
            lambda_range,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            ProfileLabel::Fluent => "fluent",
            ProfileLabel::Accurate => "accurate",
            ProfileLabel::Average => "average",
            ProfileLabel::WheelSpinningOrUnengaged => "wheel-spinning-or-unengaged",
        }
    }
}

/// Labels a profile: wheel-spinning/unengaged for `θ ≤ 0.25`; for `θ ≥ 0.75`
/// accurate when `λ < 0.5` and fluent otherwise (including `λ > 1`);
/// average in between, whatever the speed.
pub fn classify_profile(profile: &StudentProfile) -> ProfileClass {
    let label = if profile.theta <= 0.25 {
        ProfileLabel::WheelSpinningOrUnengaged
    } else if profile.theta >= 0.75 {
        if profile.lambda < 0.5 {
            ProfileLabel::Accurate
        } else {
            ProfileLabel::Fluent
        }
    } else {
        ProfileLabel::Average
    };
    label.class()
}
