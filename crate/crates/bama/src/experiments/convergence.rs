//! How quickly posterior estimates approach a student's true parameters.

use bama_core::{
    sample_response, student_rng, Observation, PosteriorState, StudentProfile, TimeLimit,
};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NamedProfile {
    pub id: String,
    pub theta: f64,
    pub lambda: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NamedPrior {
    pub id: String,
    pub alpha: f64,
    pub beta: f64,
    pub n: f64,
    pub gamma: f64,
}

impl NamedProfile {
    pub fn new(id: &str, theta: f64, lambda: f64) -> Self {
        Self {
            id: id.to_string(),
            theta,
            lambda,
        }
    }

    pub fn profile(&self) -> StudentProfile {
        StudentProfile {
            theta: self.theta,
            lambda: self.lambda,
        }
    }
}

impl NamedPrior {
    pub fn new(id: &str, s: PosteriorState) -> Self {
        Self {
            id: id.to_string(),
            alpha: s.alpha,
            beta: s.beta,
            n: s.n,
            gamma: s.gamma,
        }
    }

    pub fn state(&self) -> PosteriorState {
        PosteriorState {
            alpha: self.alpha,
            beta: self.beta,
            n: self.n,
            gamma: self.gamma,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConvergenceSpec {
    pub profiles: Vec<NamedProfile>,
    pub priors: Vec<NamedPrior>,
    #[serde(default = "default_replications")]
    pub replications: u32,
    #[serde(default = "default_items")]
    pub items: u32,
    #[serde(default)]
    pub d: TimeLimit,
    #[serde(default)]
    pub seed: u64,
}

fn default_replications() -> u32 {
    500
}

fn default_items() -> u32 {
    30
}

impl ConvergenceSpec {
    pub fn validate(&self) -> Result<()> {
        if self.profiles.is_empty() || self.priors.is_empty() {
            return Err(Error::Config(
                "convergence: profiles and priors must be nonempty".into(),
            ));
        }
        for p in &self.profiles {
            p.profile()
                .validate()
                .map_err(|e| Error::config(&format!("profiles[{}]", p.id), e))?;
        }
        for p in &self.priors {
            p.state()
                .validate()
                .map_err(|e| Error::config(&format!("priors[{}]", p.id), e))?;
        }
        if self.replications == 0 {
            return Err(Error::Config(
                "convergence.replications: must be at least 1".into(),
            ));
        }
        Ok(())
    }
}

/// Error summary after `item` responses (item 0 is the prior).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceRow {
    pub profile_id: String,
    pub prior_id: String,
    pub item: u32,
    pub med_abs_err_theta: f64,
    pub med_abs_err_lambda: f64,
    pub med_abs_err_z: f64,
    /// Quartiles of the expected-score error.
    pub q25: f64,
    pub q75: f64,
}

/// Linear-interpolation quantile of sorted data.
pub fn quantile(sorted: &[f64], q: f64) -> f64 {
    let pos = q * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    sorted[lo] + (sorted[hi] - sorted[lo]) * (pos - lo as f64)
}

fn sorted(mut xs: Vec<f64>) -> Vec<f64> {
    xs.sort_by(f64::total_cmp);
    xs
}

/// Per-item median and quartile errors for every profile and prior.
///
/// Replication `r` of profile `k` draws from stream `k·replications + r`, and
/// the same responses are fed to every prior.
pub fn convergence_study(spec: &ConvergenceSpec) -> Result<Vec<ConvergenceRow>> {
    spec.validate()?;
    let items = spec.items as usize;
    let reps = spec.replications as usize;
    let mut rows = Vec::new();
    for (k, named) in spec.profiles.iter().enumerate() {
        let profile = named.profile();
        let truth = profile.z_moments(spec.d).mean;
        let runs: Vec<Vec<Observation>> = (0..reps)
            .map(|r| {
                let mut rng = student_rng(spec.seed, (k * reps + r) as u64);
                (0..items)
                    .map(|_| sample_response(&profile, &mut rng))
                    .collect()
            })
            .collect();
        for prior in &spec.priors {
            // errs[item][replication] for θ, λ and E[Z].
            let mut errs = vec![
                [
                    Vec::with_capacity(reps),
                    Vec::with_capacity(reps),
                    Vec::with_capacity(reps)
                ];
                items + 1
            ];
            for run in &runs {
                let mut s = prior.state();
                for item in 0..=items {
                    if item > 0 {
                        s = s.update(&run[item - 1]);
                    }
                    errs[item][0].push((s.prob_correct() - profile.theta).abs());
                    errs[item][1].push((s.rate_estimate() - profile.lambda).abs());
                    errs[item][2].push((s.expected_z_mean(spec.d) - truth).abs());
                }
            }
            for (item, [theta, lambda, z]) in errs.into_iter().enumerate() {
                let z = sorted(z);
                rows.push(ConvergenceRow {
                    profile_id: named.id.clone(),
                    prior_id: prior.id.clone(),
                    item: item as u32,
                    med_abs_err_theta: quantile(&sorted(theta), 0.5),
                    med_abs_err_lambda: quantile(&sorted(lambda), 0.5),
                    med_abs_err_z: quantile(&z, 0.5),
                    q25: quantile(&z, 0.25),
                    q75: quantile(&z, 0.75),
                });
            }
        }
    }
    Ok(rows)
}

/// First item at which the median expected-score error is at most `tolerance`.
pub fn items_to_accuracy(
    rows: &[ConvergenceRow],
    profile_id: &str,
    prior_id: &str,
    tolerance: f64,
) -> Option<u32> {
    rows.iter()
        .filter(|r| r.profile_id == profile_id && r.prior_id == prior_id)
        .find(|r| r.med_abs_err_z <= tolerance)
        .map(|r| r.item)
}
