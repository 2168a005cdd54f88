//! Sensitivity of the expected score to `θ` and `λ`.

use bama_core::{StudentProfile, TimeLimit};
use serde::{Deserialize, Serialize};

use super::oracle::mc_profile_z;
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SweepSpec {
    pub thetas: Vec<f64>,
    pub lambdas: Vec<f64>,
    pub d: TimeLimit,
    /// Simulated responses per grid point.
    pub draws: u64,
    pub seed: u64,
    /// Output directory; the `--out` flag takes precedence.
    pub output: Option<String>,
}

impl Default for SweepSpec {
    fn default() -> Self {
        Self {
            thetas: vec![0.0, 0.3, 0.6, 0.9],
            lambdas: geometric_grid(0.01, 50.0, 25),
            d: TimeLimit::default(),
            draws: 10_000,
            seed: 0,
            output: None,
        }
    }
}

impl SweepSpec {
    pub fn validate(&self) -> Result<()> {
        if self.thetas.is_empty() || self.lambdas.is_empty() {
            return Err(Error::Config(
                "sweep.thetas and sweep.lambdas must be nonempty".into(),
            ));
        }
        for &theta in &self.thetas {
            StudentProfile::new(theta, 1.0).map_err(|e| Error::config("sweep.thetas", e))?;
        }
        for &lambda in &self.lambdas {
            StudentProfile::new(0.5, lambda).map_err(|e| Error::config("sweep.lambdas", e))?;
        }
        if self.draws < 2 {
            return Err(Error::Config("sweep.draws: must be at least 2".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub theta: f64,
    pub lambda: f64,
    pub ez_mc: f64,
    pub ez_exact: f64,
    pub stderr: f64,
}

/// `count` points from `lo` to `hi`, evenly spaced in log scale.
pub fn geometric_grid(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    if count == 1 {
        return vec![lo];
    }
    let ratio = (hi / lo).ln() / (count - 1) as f64;
    (0..count).map(|i| lo * (ratio * i as f64).exp()).collect()
}

/// `count` evenly spaced points on `[lo, hi]`.
pub fn linear_grid(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    if count == 1 {
        return vec![lo];
    }
    (0..count)
        .map(|i| lo + (hi - lo) * i as f64 / (count - 1) as f64)
        .collect()
}

/// Monte Carlo and exact expected score at every `(θ, λ)`, sorted by `(θ, λ)`.
///
/// Grid point `k` (in input order) draws from RNG stream `k`, so a row does
/// not depend on the order in which rows are produced.
pub fn sensitivity_sweep(spec: &SweepSpec) -> Result<Vec<SweepRow>> {
    spec.validate()?;
    let mut rows = Vec::with_capacity(spec.thetas.len() * spec.lambdas.len());
    for (i, &theta) in spec.thetas.iter().enumerate() {
        for (j, &lambda) in spec.lambdas.iter().enumerate() {
            let profile = StudentProfile::new(theta, lambda)?;
            let stream = (i * spec.lambdas.len() + j) as u64;
            let mc = mc_profile_z(&profile, spec.d, spec.draws, spec.seed, stream);
            rows.push(SweepRow {
                theta,
                lambda,
                ez_mc: mc.mean,
                ez_exact: profile.z_moments(spec.d).mean,
                stderr: mc.stderr,
            });
        }
    }
    rows.sort_by(|a, b| {
        a.theta
            .total_cmp(&b.theta)
            .then(a.lambda.total_cmp(&b.lambda))
    });
    Ok(rows)
}

/// Ordinary least-squares `(slope, intercept)`.
pub fn fit_line(points: &[(f64, f64)]) -> (f64, f64) {
    let n = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / n;
    let my = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = points.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    let slope = sxy / sxx;
    (slope, my - slope * mx)
}
