//! Monte Carlo estimates of expected scores, used to check the closed forms.

use bama_core::{sample_response, student_rng, z_score, PosteriorState, StudentProfile, TimeLimit};
use rand_distr::{Bernoulli, Beta, Distribution, Exp, Gamma};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct McEstimate {
    pub mean: f64,
    pub stderr: f64,
    pub draws: u64,
}

/// Welford accumulator.
#[derive(Debug, Default, Clone, Copy)]
pub struct Moments {
    count: u64,
    mean: f64,
    m2: f64,
}

impl Moments {
    pub fn push(&mut self, x: f64) {
        self.count += 1;
        let delta = x - self.mean;
        self.mean += delta / self.count as f64;
        self.m2 += delta * (x - self.mean);
    }

    pub fn estimate(&self) -> McEstimate {
        let var = if self.count > 1 {
            self.m2 / (self.count - 1) as f64
        } else {
            0.0
        };
        McEstimate {
            mean: self.mean,
            stderr: (var / self.count.max(1) as f64).sqrt(),
            draws: self.count,
        }
    }
}

/// Mean score of `draws` responses from a fixed profile.
pub fn mc_profile_z(
    profile: &StudentProfile,
    d: TimeLimit,
    draws: u64,
    seed: u64,
    stream: u64,
) -> McEstimate {
    let mut rng = student_rng(seed, stream);
    let mut acc = Moments::default();
    for _ in 0..draws {
        let obs = sample_response(profile, &mut rng);
        acc.push(obs.z(d));
    }
    acc.estimate()
}

/// Mean score under the posterior predictive of `state`, drawn hierarchically:
/// `θ ~ Beta(α, β)`, `λ ~ Gamma(n, rate γ)`, then one response from `(θ, λ)`.
pub fn mc_state_z(
    state: &PosteriorState,
    d: TimeLimit,
    draws: u64,
    seed: u64,
    stream: u64,
) -> McEstimate {
    let mut rng = student_rng(seed, stream);
    let theta_dist = Beta::new(state.alpha, state.beta).expect("validated state");
    let rate_dist = Gamma::new(state.n, 1.0 / state.gamma).expect("validated state");
    let mut acc = Moments::default();
    for _ in 0..draws {
        let theta = theta_dist.sample(&mut rng);
        let rate: f64 = rate_dist.sample(&mut rng);
        let correct = Bernoulli::new(theta.clamp(0.0, 1.0)).is_ok_and(|b| b.sample(&mut rng));
        let time =
            Exp::new(rate.max(f64::MIN_POSITIVE)).map_or(f64::INFINITY, |e| e.sample(&mut rng));
        acc.push(z_score(correct, time, d).unwrap_or(0.0));
    }
    acc.estimate()
}
