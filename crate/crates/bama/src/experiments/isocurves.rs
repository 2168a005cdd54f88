//! Level sets of the expected score over the `(θ, λ)` plane.

use bama_core::{StudentProfile, TimeLimit};
use serde::{Deserialize, Serialize};

use super::sweep::linear_grid;
use crate::error::{Error, Result};

/// Levels 0.1, 0.2, …, 0.9.
pub const LEVELS: [f64; 9] = [0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IsocurveGrid {
    pub thetas: Vec<f64>,
    pub lambdas: Vec<f64>,
    /// `means[i][j]` is the exact expected score at `(thetas[i], lambdas[j])`.
    pub means: Vec<Vec<f64>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IsoPoint {
    pub level: f64,
    pub point_index: u32,
    pub theta: f64,
    pub lambda: f64,
}

/// Exact means on a `resolution × resolution` grid of `θ ∈ [0, 1]` and
/// `λ ∈ [0, lambda_max]`. At `λ = 0` the mean is its limit, 0.
pub fn isocurve_grid(resolution: usize, d: TimeLimit, lambda_max: f64) -> Result<IsocurveGrid> {
    if resolution < 2 {
        return Err(Error::Config(
            "isocurves.resolution: must be at least 2".into(),
        ));
    }
    StudentProfile::new(0.5, lambda_max).map_err(|e| Error::config("isocurves.lambda_max", e))?;
    let thetas = linear_grid(0.0, 1.0, resolution);
    let lambdas = linear_grid(0.0, lambda_max, resolution);
    let means = thetas
        .iter()
        .map(|&theta| {
            lambdas
                .iter()
                .map(|&lambda| StudentProfile { theta, lambda }.z_moments(d).mean)
                .collect()
        })
        .collect();
    Ok(IsocurveGrid {
        thetas,
        lambdas,
        means,
    })
}

/// Polyline of each level: one point per `λ` column where the level is
/// crossed, with `θ` interpolated linearly between grid rows. The mean is
/// linear in `θ`, so the interpolation is exact up to rounding.
pub fn level_sets(grid: &IsocurveGrid, levels: &[f64]) -> Vec<IsoPoint> {
    let mut points = Vec::new();
    for &level in levels {
        let mut index = 0;
        for (j, &lambda) in grid.lambdas.iter().enumerate() {
            let crossing = (1..grid.thetas.len()).find_map(|i| {
                let (lo, hi) = (grid.means[i - 1][j], grid.means[i][j]);
                (lo < level && level <= hi).then(|| {
                    let w = (level - lo) / (hi - lo);
                    grid.thetas[i - 1] + w * (grid.thetas[i] - grid.thetas[i - 1])
                })
            });
            if let Some(theta) = crossing {
                points.push(IsoPoint {
                    level,
                    point_index: index,
                    theta,
                    lambda,
                });
                index += 1;
            }
        }
    }
    points
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid() -> IsocurveGrid {
        isocurve_grid(101, TimeLimit::default(), 1.0).unwrap()
    }

    #[test]
    fn half_accuracy_unit_rate() {
        let g = grid();
        assert_eq!(g.thetas[50], 0.5);
        assert_eq!(*g.lambdas.last().unwrap(), 1.0);
        assert!((g.means[50][100] - 0.475).abs() < 1e-4);
    }

    #[test]
    fn top_level_needs_high_accuracy() {
        let pts = level_sets(&grid(), &LEVELS);
        let top: Vec<_> = pts.iter().filter(|p| p.level == 0.9).collect();
        assert!(top.iter().all(|p| p.theta > 0.9));
        for level in LEVELS {
            let curve: Vec<_> = pts.iter().filter(|p| p.level == level).collect();
            assert!(curve
                .windows(2)
                .all(|w| w[1].lambda > w[0].lambda && w[1].theta <= w[0].theta));
            for p in curve {
                let mean = StudentProfile {
                    theta: p.theta,
                    lambda: p.lambda,
                }
                .z_moments(TimeLimit::default())
                .mean;
                assert!((mean - level).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn coarse_grid_rejected() {
        assert!(isocurve_grid(1, TimeLimit::default(), 1.0).is_err());
    }
}
