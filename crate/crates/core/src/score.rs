//! The per-response score `Z = P·(1 − T/d)⁺`.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};

/// Maximum permitted response time `d`, in seconds.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(try_from = "f64", into = "f64")]
pub struct TimeLimit(f64);

impl TimeLimit {
    pub fn new(seconds: f64) -> Result<Self> {
        if seconds.is_finite() && seconds > 0.0 {
            Ok(Self(seconds))
        } else {
            Err(invalid("d", "must be positive and finite", seconds))
        }
    }

    #[inline]
    pub fn seconds(self) -> f64 {
        self.0
    }
}

impl Default for TimeLimit {
    fn default() -> Self {
        Self(20.0)
    }
}

impl TryFrom<f64> for TimeLimit {
    type Error = Error;

    fn try_from(value: f64) -> Result<Self> {
        Self::new(value)
    }
}

impl From<TimeLimit> for f64 {
    fn from(d: TimeLimit) -> f64 {
        d.0
    }
}

/// Speed credit `(1 − t/d)⁺` for a response time `t`.
#[inline]
pub(crate) fn partial_credit(t: f64, d: TimeLimit) -> f64 {
    let c = 1.0 - t / d.0;
    if c > 0.0 {
        c
    } else {
        0.0
    }
}

/// Scores one response: `p · max(0, 1 − t/d)`.
///
/// An incorrect answer scores zero, as does any answer slower than `d`.
pub fn z_score(correct: bool, t: f64, d: TimeLimit) -> Result<f64> {
    if !(t.is_finite() && t >= 0.0) {
        return Err(Error::InvalidObservation {
            reason: "response time must be nonnegative and finite",
            value: t,
        });
    }
    Ok(if correct { partial_credit(t, d) } else { 0.0 })
}

/// Mean and variance of `Z` together with the probability of a correct answer.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScoreSummary {
    pub mean: f64,
    pub variance: f64,
    pub prob_correct: f64,
}

impl ScoreSummary {
    /// Builds a summary from `P(correct)`, `E[(1−T/d)⁺]` and `E[((1−T/d)⁺)²]`,
    /// treating correctness and time as independent.
    pub(crate) fn from_moments(prob_correct: f64, credit: f64, credit_sq: f64) -> Self {
        let mean = (prob_correct * credit).clamp(0.0, 1.0);
        let second = prob_correct * credit_sq;
        // Any variable on [0, 1] has Var ≤ mean·(1 − mean); clamping only absorbs rounding.
        let variance = (second - mean * mean).clamp(0.0, mean * (1.0 - mean));
        Self {
            mean,
            variance,
            prob_correct,
        }
    }
}
