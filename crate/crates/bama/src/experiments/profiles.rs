//! Two students with the same expected score but different spread.

use bama_core::{sample_response, student_rng, ScoreSummary, StudentProfile, TimeLimit};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolvedProfile {
    pub id: String,
    pub profile: StudentProfile,
    pub summary: ScoreSummary,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EqualMeanProfiles {
    pub target_mean: f64,
    /// Moderate accuracy, fast answers.
    pub average: SolvedProfile,
    /// High accuracy, slow answers.
    pub accurate: SolvedProfile,
}

/// Default accuracies of the two arms.
pub const AVERAGE_THETA: f64 = 0.5;
pub const ACCURATE_THETA: f64 = 0.95;

/// The rate `λ` at which a student with accuracy `theta` has expected score
/// `target`, by bisection on `ln λ`.
///
/// The mean rises from 0 to `θ` as `λ` goes from 0 to ∞, so a solution
/// exists only for `0 < target < θ`.
pub fn solve_lambda(theta: f64, target: f64, d: TimeLimit) -> Result<f64> {
    if !(target > 0.0 && target < theta && theta <= 1.0) {
        return Err(Error::Config(format!(
            "infeasible: mean {target} is not reachable with theta {theta}"
        )));
    }
    let mean = |ln_lambda: f64| {
        StudentProfile {
            theta,
            lambda: ln_lambda.exp(),
        }
        .z_moments(d)
        .mean
    };
    let (mut lo, mut hi) = ((1e-12f64).ln(), (1e12f64).ln());
    if mean(hi) < target {
        return Err(Error::Config(format!(
            "infeasible: mean {target} needs a rate beyond 1e12 at theta {theta}"
        )));
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mean(mid) < target {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo < 1e-15 {
            break;
        }
    }
    Ok((0.5 * (lo + hi)).exp())
}

pub fn equal_mean_profiles(target: f64, d: TimeLimit) -> Result<EqualMeanProfiles> {
    equal_mean_profiles_with(target, d, AVERAGE_THETA, ACCURATE_THETA)
}

pub fn equal_mean_profiles_with(
    target: f64,
    d: TimeLimit,
    average_theta: f64,
    accurate_theta: f64,
) -> Result<EqualMeanProfiles> {
    let solve = |id: &str, theta: f64| -> Result<SolvedProfile> {
        let lambda = solve_lambda(theta, target, d)?;
        let profile = StudentProfile::new(theta, lambda)?;
        Ok(SolvedProfile {
            id: id.to_string(),
            profile,
            summary: profile.z_moments(d),
        })
    };
    Ok(EqualMeanProfiles {
        target_mean: target,
        average: solve("average", average_theta)?,
        accurate: solve("accurate", accurate_theta)?,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HistogramBin {
    pub lo: f64,
    pub hi: f64,
    pub count: u64,
}

/// Histogram of `draws` simulated scores over `bins` equal bins of `[0, 1]`.
/// A score of exactly 1 goes to the last bin.
pub fn score_histogram(
    profile: &StudentProfile,
    d: TimeLimit,
    draws: u64,
    bins: usize,
    seed: u64,
    stream: u64,
) -> Vec<HistogramBin> {
    let bins = bins.max(1);
    let mut counts = vec![0u64; bins];
    let mut rng = student_rng(seed, stream);
    for _ in 0..draws {
        let z = sample_response(profile, &mut rng).z(d);
        let k = ((z * bins as f64) as usize).min(bins - 1);
        counts[k] += 1;
    }
    counts
        .into_iter()
        .enumerate()
        .map(|(k, count)| HistogramBin {
            lo: k as f64 / bins as f64,
            hi: (k + 1) as f64 / bins as f64,
            count,
        })
        .collect()
}
