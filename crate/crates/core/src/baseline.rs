//! Predictive-stability baseline: stop once the predicted probability of a
//! correct answer has stopped moving.
//!
//! The rule asks that `P(|P(Cₜ) − P(Cₜ₊₁)| < ε) > δ`. A single trajectory does
//! not give that probability, so it is read as the fraction of the last
//! `window` one-step changes that are below `ε`.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::policy::{Action, Decision, StopReason};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BaselineConfig {
    pub epsilon: f64,
    pub delta: f64,
    pub window: u32,
    pub max_items: u32,
}

impl Default for BaselineConfig {
    fn default() -> Self {
        Self {
            epsilon: 0.01,
            delta: 0.95,
            window: 5,
            max_items: 25,
        }
    }
}

impl BaselineConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.epsilon > 0.0 && self.epsilon < 1.0) {
            return Err(invalid("epsilon", "must lie in (0, 1)", self.epsilon));
        }
        if !(self.delta > 0.0 && self.delta < 1.0) {
            return Err(invalid("delta", "must lie in (0, 1)", self.delta));
        }
        if self.window == 0 {
            return Err(invalid("window", "must be positive", 0.0));
        }
        if self.max_items == 0 {
            return Err(invalid("max_items", "must be positive", 0.0));
        }
        Ok(())
    }
}

/// Decides on a sequence of predicted correctness probabilities.
///
/// `history[0]` is the prior prediction and each later entry follows one
/// response. A stable stop is reported as mastered when the final prediction
/// is at least one half and as not mastered otherwise; `value` is the stable
/// fraction and `threshold` is `δ`.
pub fn baseline_stability_decide(history: &[f64], cfg: &BaselineConfig) -> Result<Decision> {
    cfg.validate()?;
    let Some(&last) = history.last() else {
        return Err(invalid("history", "must be nonempty", 0.0));
    };
    let items = history.len() - 1;
    let w = cfg.window as usize;
    let stable_fraction = if history.len() > w {
        let stable = history[history.len() - w - 1..]
            .windows(2)
            .filter(|pair| (pair[1] - pair[0]).abs() < cfg.epsilon)
            .count();
        stable as f64 / w as f64
    } else {
        0.0
    };
    let decision = |action, reason| Decision {
        action,
        value: stable_fraction,
        threshold: cfg.delta,
        reason,
    };
    if stable_fraction > cfg.delta {
        let action = if last >= 0.5 {
            Action::StopMastered
        } else {
            Action::StopNotMastered
        };
        return Ok(decision(action, StopReason::BaselineStability));
    }
    if items >= cfg.max_items as usize {
        return Ok(decision(Action::StopNotMastered, StopReason::MaxItems));
    }
    Ok(decision(Action::Continue, StopReason::BaselineStability))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::vec::Vec;

    #[test]
    fn constant_sequence_stops() {
        let cfg = BaselineConfig::default();
        let d = baseline_stability_decide(&[0.7; 6], &cfg).unwrap();
        assert!(d.action.is_stop());
        assert_eq!(d.reason, StopReason::BaselineStability);
        assert_eq!(d.action, Action::StopMastered);
        let short = baseline_stability_decide(&[0.7; 5], &cfg).unwrap();
        assert_eq!(short.action, Action::Continue);
    }

    #[test]
    fn alternating_sequence_runs_to_cap() {
        let cfg = BaselineConfig::default();
        let seq: Vec<f64> = (0..27)
            .map(|i| if i % 2 == 0 { 0.2 } else { 0.8 })
            .collect();
        for k in 1..=25 {
            let d = baseline_stability_decide(&seq[..k], &cfg).unwrap();
            assert_eq!(d.action, Action::Continue, "k = {k}");
        }
        let d = baseline_stability_decide(&seq[..26], &cfg).unwrap();
        assert_eq!(d.action, Action::StopNotMastered);
        assert_eq!(d.reason, StopReason::MaxItems);
    }

    #[test]
    fn low_stable_prediction_is_not_mastered() {
        let d = baseline_stability_decide(&[0.2; 8], &BaselineConfig::default()).unwrap();
        assert_eq!(d.action, Action::StopNotMastered);
    }

    #[test]
    fn empty_history_rejected() {
        assert!(baseline_stability_decide(&[], &BaselineConfig::default()).is_err());
    }
}
