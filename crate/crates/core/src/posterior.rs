//! Conjugate posterior state and posterior-predictive quantities.
//!
//! Correctness is Bernoulli(θ) with a Beta(α, β) prior; response time is
//! Exponential(λ) with a Gamma(n, γ) prior (shape `n`, rate `γ`). Integrating
//! out the parameters gives a Bernoulli(α/(α+β)) predictive for correctness and
//! a Lomax predictive for the next response time,
//!
//! ```text
//! f(t) = n/(γ+t) · (γ/(γ+t))ⁿ,    S(t) = (γ/(γ+t))ⁿ.
//! ```
//!
//! Correctness and time are treated as independent given the state, so
//! `E[Z] = P(correct)·E[(1−T/d)⁺]` and `E[Z²] = P(correct)·E[((1−T/d)⁺)²]`.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::quadrature::GaussLegendre;
use crate::score::{partial_credit, ScoreSummary, TimeLimit};

/// Lower bound for every posterior parameter.
pub const POSITIVITY_FLOOR: f64 = 1e-9;

/// Default order of the Gauss–Legendre rule used for predictive moments.
pub const DEFAULT_QUAD_NODES: usize = 32;

/// One response: whether it was correct and how long it took.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Observation {
    pub correct: bool,
    /// Response time in seconds.
    pub time: f64,
}

impl Observation {
    pub fn new(correct: bool, time: f64) -> Result<Self> {
        if time.is_finite() && time >= 0.0 {
            Ok(Self { correct, time })
        } else {
            Err(Error::InvalidObservation {
                reason: "response time must be nonnegative and finite",
                value: time,
            })
        }
    }

    /// Correctness as 0/1.
    pub fn p(&self) -> f64 {
        if self.correct {
            1.0
        } else {
            0.0
        }
    }

    pub fn z(&self, d: TimeLimit) -> f64 {
        if self.correct {
            partial_credit(self.time, d)
        } else {
            0.0
        }
    }
}

/// Information state `(α, β, n, γ)` of the Beta and Gamma posteriors.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PosteriorState {
    pub alpha: f64,
    pub beta: f64,
    pub n: f64,
    pub gamma: f64,
}

impl PosteriorState {
    pub fn new(alpha: f64, beta: f64, n: f64, gamma: f64) -> Result<Self> {
        let s = Self {
            alpha,
            beta,
            n,
            gamma,
        };
        s.validate()?;
        Ok(s)
    }

    /// Beta(1, 1) / Gamma(1, 10): flat on θ, mean response time of half of `d = 20`.
    pub fn uninformative() -> Self {
        Self {
            alpha: 1.0,
            beta: 1.0,
            n: 1.0,
            gamma: 10.0,
        }
    }

    /// Beta(0.95, 0.05) / Gamma(3, 30): prior expected score of about 0.5 at `d = 20`.
    pub fn optimistic() -> Self {
        Self {
            alpha: 0.95,
            beta: 0.05,
            n: 3.0,
            gamma: 30.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        for (field, v) in [
            ("alpha", self.alpha),
            ("beta", self.beta),
            ("n", self.n),
            ("gamma", self.gamma),
        ] {
            if !(v.is_finite() && v >= POSITIVITY_FLOOR) {
                return Err(invalid(field, "must be positive and finite", v));
            }
        }
        Ok(())
    }

    /// Conjugate update: `(α + p, β + 1 − p, n + 1, γ + t)`.
    #[must_use]
    pub fn update(&self, obs: &Observation) -> Self {
        let p = obs.p();
        Self {
            alpha: self.alpha + p,
            beta: self.beta + 1.0 - p,
            n: self.n + 1.0,
            gamma: self.gamma + obs.time,
        }
    }

    /// Predictive probability of a correct answer, `α/(α+β)`.
    #[inline]
    pub fn prob_correct(&self) -> f64 {
        self.alpha / (self.alpha + self.beta)
    }

    /// Posterior mean of the response rate, `n/γ`.
    #[inline]
    pub fn rate_estimate(&self) -> f64 {
        self.n / self.gamma
    }

    /// Predictive density of the next response time.
    pub fn rt_density(&self, t: f64) -> f64 {
        if t < 0.0 {
            return 0.0;
        }
        let g = self.gamma + t;
        self.n / g * libm::pow(self.gamma / g, self.n)
    }

    /// Predictive survival `P(T > t) = (γ/(γ+t))ⁿ`.
    pub fn rt_survival(&self, t: f64) -> f64 {
        if t <= 0.0 {
            return 1.0;
        }
        libm::exp(-self.n * libm::log1p(t / self.gamma))
    }

    /// Response time whose predictive survival probability equals `v ∈ (0, 1]`.
    #[inline]
    pub fn rt_at_survival(&self, v: f64) -> f64 {
        // γ(v^(−1/n) − 1), written to stay accurate as v → 1.
        self.gamma * libm::expm1(-libm::log(v) / self.n)
    }

    /// `E[(1 − T/d)⁺]` under the predictive response-time distribution.
    pub fn expected_partial_credit(&self, d: TimeLimit) -> f64 {
        let shape = self.n - 1.0;
        if shape.abs() < 1e-9 {
            let rule = GaussLegendre::new(DEFAULT_QUAD_NODES);
            return self.credit_moment(d, &rule, 1);
        }
        // E[g(T)] = 1 − (1/d)∫₀ᵈ S(t) dt with ∫₀ᵈ S = γ/(n−1)·(1 − (γ/(γ+d))^(n−1)).
        let ds = d.seconds();
        let log_ratio = -libm::log1p(ds / self.gamma);
        let tail = -libm::expm1(shape * log_ratio);
        (1.0 - self.gamma / (ds * shape) * tail).clamp(0.0, 1.0)
    }

    /// `E[((1 − T/d)⁺)^power]` by quadrature in the survival coordinate.
    pub(crate) fn credit_moment(&self, d: TimeLimit, rule: &GaussLegendre, power: i32) -> f64 {
        let v_d = self.rt_survival(d.seconds());
        survival_panels(v_d, 1.0)
            .map(|(a, b)| {
                rule.integrate(a, b, |v| {
                    libm::pow(partial_credit(self.rt_at_survival(v), d), power as f64)
                })
            })
            .sum::<f64>()
            .clamp(0.0, 1.0)
    }

    /// Posterior-predictive mean and variance of the next score.
    pub fn expected_z(&self, d: TimeLimit) -> ScoreSummary {
        let rule = GaussLegendre::new(DEFAULT_QUAD_NODES);
        let p = self.prob_correct();
        let credit = self.expected_partial_credit(d);
        let credit_sq = self.credit_moment(d, &rule, 2);
        ScoreSummary::from_moments(p, credit, credit_sq)
    }

    /// Only the mean of [`expected_z`](Self::expected_z); cheaper.
    #[inline]
    pub fn expected_z_mean(&self, d: TimeLimit) -> f64 {
        self.prob_correct() * self.expected_partial_credit(d)
    }
}

/// Splits `[lo, hi] ⊂ (0, 1]` into panels whose endpoints differ by at most a
/// factor of 4, so `v^(−1/n)` stays well resolved near a tiny lower limit.
fn survival_panels(lo: f64, hi: f64) -> impl Iterator<Item = (f64, f64)> {
    let mut a = lo.max(f64::MIN_POSITIVE);
    core::iter::from_fn(move || {
        if a >= hi {
            return None;
        }
        let b = (a * 4.0).min(hi);
        let panel = (a, b);
        a = b;
        Some(panel)
    })
}

/// Ground-truth `(θ, λ)` of a simulated student.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StudentProfile {
    pub theta: f64,
    pub lambda: f64,
}

impl StudentProfile {
    pub fn new(theta: f64, lambda: f64) -> Result<Self> {
        let p = Self { theta, lambda };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.theta) {
            return Err(invalid("theta", "must lie in [0, 1]", self.theta));
        }
        if !(self.lambda.is_finite() && self.lambda > 0.0) {
            return Err(invalid(
                "lambda",
                "must be positive and finite",
                self.lambda,
            ));
        }
        Ok(())
    }

    /// Exact `E[Z]` and `Var[Z]` for a fixed `(θ, λ)` with `T ~ Exp(λ)`.
    pub fn z_moments(&self, d: TimeLimit) -> ScoreSummary {
        let x = self.lambda * d.seconds();
        let (credit, credit_sq) = exponential_credit_moments(x);
        ScoreSummary::from_moments(self.theta, credit, credit_sq)
    }
}

/// `(E[(1−T/d)⁺], E[((1−T/d)⁺)²])` for `T ~ Exp(λ)` as functions of `x = λd`.
fn exponential_credit_moments(x: f64) -> (f64, f64) {
    if x < 1e-3 {
        // Series: x/2 − x²/6 + x³/24 and x/3 − x²/12 + x³/60.
        let m1 = x / 2.0 - x * x / 6.0 + x * x * x / 24.0;
        let m2 = x / 3.0 - x * x / 12.0 + x * x * x / 60.0;
        return (m1, m2);
    }
    let one_minus_e = -libm::expm1(-x);
    let m1 = 1.0 - one_minus_e / x;
    let m2 = 1.0 - 2.0 / x + 2.0 * one_minus_e / (x * x);
    (m1.clamp(0.0, 1.0), m2.clamp(0.0, 1.0))
}

/// Predictive response-time density; see [`PosteriorState::rt_density`].
pub fn rt_density(state: &PosteriorState, t: f64) -> f64 {
    state.rt_density(t)
}

/// See [`PosteriorState::expected_partial_credit`].
pub fn expected_partial_credit(state: &PosteriorState, d: TimeLimit) -> f64 {
    state.expected_partial_credit(d)
}

/// See [`PosteriorState::expected_z`].
pub fn expected_z(state: &PosteriorState, d: TimeLimit) -> ScoreSummary {
    state.expected_z(d)
}

/// See [`StudentProfile::z_moments`].
pub fn profile_z_moments(profile: &StudentProfile, d: TimeLimit) -> ScoreSummary {
    profile.z_moments(d)
}
