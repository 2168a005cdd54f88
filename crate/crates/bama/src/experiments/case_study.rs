//! Two students with similar accuracy but different expected scores, and the
//! stopping decision each one receives.

use bama_core::{
    bellman_value, decide, linear_continuation, linear_value, Action, History, LinearValueWeights,
    PolicyConfig, PosteriorState, TimeLimit,
};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const S1: PosteriorState = PosteriorState {
    alpha: 8.0,
    beta: 2.0,
    n: 10.0,
    gamma: 12.0,
};

pub const S2: PosteriorState = PosteriorState {
    alpha: 6.0,
    beta: 4.0,
    n: 10.0,
    gamma: 12.0,
};

/// Published expected scores of the two states and the allowed deviation.
pub const EXPECTED_MEANS: [f64; 2] = [0.75, 0.56];
pub const MEAN_TOLERANCE: f64 = 0.01;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CaseRow {
    pub state_id: String,
    pub alpha: f64,
    pub beta: f64,
    pub n: f64,
    pub gamma: f64,
    pub ez_mean: f64,
    pub value: f64,
    pub threshold: f64,
    pub decision: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

/// One point of the predictive score CDF `P(Z ≤ z)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CdfPoint {
    pub state_id: String,
    pub z: f64,
    pub cdf: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AffineValue {
    pub state_id: String,
    pub value: f64,
    pub continuation: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CaseStudyReport {
    pub rows: Vec<CaseRow>,
    pub affine: Vec<AffineValue>,
    pub checks: Vec<Check>,
    pub distributions: Vec<CdfPoint>,
}

impl CaseStudyReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn failures(&self) -> Vec<&Check> {
        self.checks.iter().filter(|c| !c.passed).collect()
    }
}

/// `P(Z ≤ z) = q + p·S(d(1 − z))` for `z < 1`, where `S` is the predictive
/// survival of the response time.
pub fn score_cdf(state: &PosteriorState, d: TimeLimit, z: f64) -> f64 {
    if z >= 1.0 {
        return 1.0;
    }
    if z < 0.0 {
        return 0.0;
    }
    let p = state.prob_correct();
    (1.0 - p) + p * state.rt_survival(d.seconds() * (1.0 - z))
}

/// Evaluates both states under `cfg` with `min_items` waived and records
/// the published claims as checks.
pub fn decision_case_study(
    cfg: &PolicyConfig,
    weights: &LinearValueWeights,
) -> Result<CaseStudyReport> {
    cfg.validate().map_err(|e| Error::config("policy", e))?;
    if cfg.eta != 0.8 || cfg.xi != 0.5 || cfg.d.seconds() != 20.0 {
        return Err(Error::Config(
            "case study needs eta = 0.8, xi = 0.5 and d = 20".into(),
        ));
    }
    let cfg = PolicyConfig {
        min_items: 0,
        ..*cfg
    };
    let mut rows = Vec::new();
    let mut affine = Vec::new();
    let mut distributions = Vec::new();
    let mut actions = Vec::new();
    for (id, s) in [("s1", S1), ("s2", S2)] {
        let mean = s.expected_z_mean(cfg.d);
        let value = bellman_value(&s, &cfg, 0)?;
        let decision = decide(&s, &History::new(mean), &cfg)?;
        actions.push(decision.action);
        rows.push(CaseRow {
            state_id: id.into(),
            alpha: s.alpha,
            beta: s.beta,
            n: s.n,
            gamma: s.gamma,
            ez_mean: mean,
            value,
            threshold: cfg.threshold(),
            decision: decision.action.as_str().into(),
        });
        affine.push(AffineValue {
            state_id: id.into(),
            value: linear_value(&s, weights),
            continuation: linear_continuation(&s, &cfg, weights),
        });
        for k in 0..=100 {
            let z = k as f64 / 100.0;
            distributions.push(CdfPoint {
                state_id: id.into(),
                z,
                cdf: score_cdf(&s, cfg.d, z),
            });
        }
    }

    let mut checks = Vec::new();
    for (row, expected) in rows.iter().zip(EXPECTED_MEANS) {
        checks.push(Check {
            name: format!("{} mean", row.state_id),
            passed: (row.ez_mean - expected).abs() <= MEAN_TOLERANCE,
            detail: format!("{:.4} vs {expected} ± {MEAN_TOLERANCE}", row.ez_mean),
        });
    }
    for (row, (action, expected)) in rows
        .iter()
        .zip(actions.iter().zip([Action::StopMastered, Action::Continue]))
    {
        checks.push(Check {
            name: format!("{} decision", row.state_id),
            passed: *action == expected,
            detail: format!("{} (expected {})", action.as_str(), expected.as_str()),
        });
    }
    checks.push(Check {
        name: "value order".into(),
        passed: rows[0].value > rows[1].value,
        detail: format!("V(s1) = {:.6}, V(s2) = {:.6}", rows[0].value, rows[1].value),
    });
    Ok(CaseStudyReport {
        rows,
        affine,
        checks,
        distributions,
    })
}
