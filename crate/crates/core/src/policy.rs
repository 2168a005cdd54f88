//! Discounted optimal stopping over the information state.
//!
//! The value of a state is
//!
//! ```text
//! V(s) = min{ ∫ [ p·((1 − t/d)⁺ + η·V(s₊(t))) + q·η·V(s₋(t)) ] f(t) dt ;  ξ/(1 − η) }
//! ```
//!
//! with `p = α/(α+β)`, `q = 1 − p`, `f` the predictive response-time density,
//! `s₊(t) = (α+1, β, n+1, γ+t)` and `s₋(t) = (α, β+1, n+1, γ+t)`. A skill is
//! mastered once the continuation term reaches the cap `ξ/(1 − η)`.
//!
//! `γ` is continuous and grows with every observed time, so the fixed point
//! cannot be tabulated. The recursion is expanded `horizon` levels deep; below
//! that a state is valued myopically as `min{E[Z]/(1 − η), ξ/(1 − η)}`, the
//! value of a student whose expected score never changes. Time integrals use
//! a Gauss–Legendre rule in `u = γ/(γ + t)`, the capped part of each integral
//! is split off exactly, and the immediate reward uses its closed form.

use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::posterior::PosteriorState;
use crate::quadrature::GaussLegendre;
use crate::score::TimeLimit;

/// Early-failure rule used to stop students who will not reach mastery.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FailureMode {
    /// Expected score strictly decreased on each of the last `decline_window` updates.
    #[default]
    Decline,
    /// The last `decline_window` responses are not all correct.
    Consecutive,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PolicyConfig {
    /// Maximum permitted response time in seconds.
    pub d: TimeLimit,
    /// Discount factor, `0 ≤ η < 1`.
    pub eta: f64,
    /// Targeted mastery level, `0 ≤ ξ ≤ 1`.
    pub xi: f64,
    /// Number of expanded levels before the myopic terminal value.
    pub horizon: u32,
    /// Gauss–Legendre order of each time integral.
    pub quad_nodes: u32,
    /// No stop of either kind before this many responses.
    pub min_items: u32,
    pub max_items: u32,
    pub decline_window: u32,
    pub failure_mode: FailureMode,
    /// When set, the value is recomputed with twice the nodes and an error is
    /// returned if the two differ by more than this.
    pub quad_tolerance: Option<f64>,
}

impl Default for PolicyConfig {
    fn default() -> Self {
        Self {
            d: TimeLimit::default(),
            eta: 0.8,
            xi: 0.5,
            horizon: 4,
            quad_nodes: 16,
            min_items: 3,
            max_items: 30,
            decline_window: 3,
            failure_mode: FailureMode::Decline,
            quad_tolerance: None,
        }
    }
}

impl PolicyConfig {
    pub fn validate(&self) -> Result<()> {
        TimeLimit::new(self.d.seconds())?;
        if !(self.eta.is_finite() && (0.0..1.0).contains(&self.eta)) {
            return Err(invalid("eta", "must lie in [0, 1)", self.eta));
        }
        if !(0.0..=1.0).contains(&self.xi) {
            return Err(invalid("xi", "must lie in [0, 1]", self.xi));
        }
        if self.horizon == 0 {
            return Err(invalid("horizon", "must be positive", 0.0));
        }
        if self.quad_nodes == 0 {
            return Err(invalid("quad_nodes", "must be positive", 0.0));
        }
        if self.max_items == 0 {
            return Err(invalid("max_items", "must be positive", 0.0));
        }
        if self.min_items > self.max_items {
            return Err(invalid(
                "min_items",
                "must not exceed max_items",
                self.min_items as f64,
            ));
        }
        if self.decline_window == 0 {
            return Err(invalid("decline_window", "must be positive", 0.0));
        }
        if let Some(tol) = self.quad_tolerance {
            if !(tol.is_finite() && tol > 0.0) {
                return Err(invalid(
                    "quad_tolerance",
                    "must be positive and finite",
                    tol,
                ));
            }
        }
        Ok(())
    }

    /// Stop threshold `ξ/(1 − η)`.
    #[inline]
    pub fn threshold(&self) -> f64 {
        self.xi / (1.0 - self.eta)
    }
}

/// Myopic value used below the expansion horizon.
fn terminal_value(state: &PosteriorState, cfg: &PolicyConfig) -> f64 {
    (state.expected_z_mean(cfg.d) / (1.0 - cfg.eta)).min(cfg.threshold())
}

/// Grid intervals on `y ∈ [0, 1]` for the lattice evaluator.
const GRID: usize = 512;

/// Gauss–Legendre rule for the density `n·u^(n−1)` on `[0, 1]`.
///
/// For `n ≥ 1` the nodes sit directly in `u`. For `n < 1` that weight is
/// singular at 0, so they sit in `v = uⁿ` instead. Either way the rule
/// rescales to `[0, a]` as nodes `a·uᵢ` with weights `aⁿ·wᵢ`.
struct PowerRule {
    n: f64,
    nodes: Vec<(f64, f64)>,
}

impl PowerRule {
    fn new(points: &[(f64, f64)], n: f64) -> Self {
        let nodes = points
            .iter()
            .map(|&(x, w)| {
                if n >= 1.0 {
                    (x, w * n * libm::pow(x, n - 1.0))
                } else {
                    (libm::pow(x, 1.0 / n), w)
                }
            })
            .collect();
        Self { n, nodes }
    }

    /// `∫₀ᵃ g(u)·n·u^(n−1) du` together with the mass `aⁿ` of `[0, a]`.
    fn integrate<G: Fn(f64) -> f64>(&self, a: f64, g: G) -> (f64, f64) {
        if a <= 0.0 {
            return (0.0, 0.0);
        }
        let mass = if a >= 1.0 { 1.0 } else { libm::pow(a, self.n) };
        let sum: f64 = self.nodes.iter().map(|&(u, w)| w * g(a * u)).sum();
        (mass * sum, mass)
    }
}

/// Root of `f` in `[lo, hi]` given `f(lo) ≤ 0 < f(hi)`, by Illinois regula falsi.
fn crossing<F: Fn(f64) -> f64>(
    f: F,
    mut lo: f64,
    mut f_lo: f64,
    mut hi: f64,
    mut f_hi: f64,
) -> f64 {
    let mut last_side = 0i8;
    for _ in 0..100 {
        let x = if f_hi - f_lo > 0.0 {
            (lo * f_hi - hi * f_lo) / (f_hi - f_lo)
        } else {
            0.5 * (lo + hi)
        };
        let x = if x <= lo || x >= hi {
            0.5 * (lo + hi)
        } else {
            x
        };
        let fx = f(x);
        if fx > 0.0 {
            hi = x;
            f_hi = fx;
            if last_side == 1 {
                f_lo *= 0.5;
            }
            last_side = 1;
        } else {
            lo = x;
            f_lo = fx;
            if last_side == -1 {
                f_hi *= 0.5;
            }
            last_side = -1;
        }
        if hi - lo < 1e-14 * hi.max(1e-300) || fx == 0.0 {
            break;
        }
    }
    hi
}

/// Value of one lattice node tabulated over `y = γ₀/γ` on a uniform grid,
/// capped exactly on `y ≥ cap`.
struct NodeValue {
    values: Vec<f64>,
    cap: f64,
}

/// Backward induction over the states reachable from one root.
///
/// After `k` responses with `j` correct the state is
/// `(α + j, β + k − j, n + k, γ₀/y)`: only the accumulated time is continuous.
/// Each `(k, j)` value is tabulated over `y`, with the cap region `y ≥ y*`
/// located by root finding, and the level above integrates it with the cap
/// split out exactly. A response time `t` maps the parent coordinate `y` to
/// `y·u` with `u = γ/(γ + t)`.
struct Lattice<'a> {
    cfg: &'a PolicyConfig,
    root: PosteriorState,
    threshold: f64,
    scale: f64,
    points: Vec<(f64, f64)>,
}

impl<'a> Lattice<'a> {
    fn new(cfg: &'a PolicyConfig, root: PosteriorState, nodes: usize) -> Self {
        Self {
            cfg,
            root,
            threshold: cfg.threshold(),
            scale: 1.0 / (1.0 - cfg.eta),
            points: GaussLegendre::new(nodes).mapped(0.0, 1.0).collect(),
        }
    }

    fn state_at(&self, k: u32, j: u32, y: f64) -> PosteriorState {
        PosteriorState {
            alpha: self.root.alpha + j as f64,
            beta: self.root.beta + (k - j) as f64,
            n: self.root.n + k as f64,
            gamma: self.root.gamma / y,
        }
    }

    fn eval(&self, f: &NodeValue, y: f64) -> f64 {
        if y >= f.cap {
            return self.threshold;
        }
        let h = 1.0 / GRID as f64;
        let i = ((y * GRID as f64) as usize).min(GRID - 1);
        let x0 = i as f64 * h;
        let (x1, v1) = if x0 + h > f.cap {
            (f.cap, self.threshold)
        } else {
            (x0 + h, f.values[i + 1])
        };
        let v0 = f.values[i];
        v0 + (v1 - v0) * (y - x0) / (x1 - x0)
    }

    /// Tabulates `min(g, threshold)` for a `g` increasing in `y` with `g(0) = 0`.
    fn tabulate<G: Fn(f64) -> f64>(&self, g: G) -> NodeValue {
        let thr = self.threshold;
        let mut values = Vec::with_capacity(GRID + 1);
        values.push(0.0);
        let mut cap = f64::INFINITY;
        for i in 1..=GRID {
            let y = i as f64 / GRID as f64;
            let c = g(y);
            if c >= thr {
                let lo = (i - 1) as f64 / GRID as f64;
                cap = crossing(|y| g(y) - thr, lo, values[i - 1] - thr, y, c - thr);
                values.resize(GRID + 1, thr);
                break;
            }
            values.push(c);
        }
        NodeValue { values, cap }
    }

    fn terminal(&self, k: u32, j: u32) -> NodeValue {
        self.tabulate(|y| self.state_at(k, j, y).expected_z_mean(self.cfg.d) * self.scale)
    }

    /// `E_T[child(y·u)]` with the capped range `u ≥ cap/y` taken exactly.
    fn expected_child(&self, child: &NodeValue, rule: &PowerRule, y: f64) -> f64 {
        let a = (child.cap / y).min(1.0);
        let (smooth, mass) = rule.integrate(a, |u| self.eval(child, y * u));
        self.threshold * (1.0 - mass) + smooth.min(self.threshold)
    }

    /// Uncapped continuation value at `(k, j, y)`.
    fn continuation(
        &self,
        k: u32,
        j: u32,
        y: f64,
        rule: &PowerRule,
        children: [&NodeValue; 2],
    ) -> f64 {
        let s = self.state_at(k, j, y);
        let p = s.prob_correct();
        let reward = p * s.expected_partial_credit(self.cfg.d);
        let [up, down] = children;
        let future =
            p * self.expected_child(up, rule, y) + (1.0 - p) * self.expected_child(down, rule, y);
        reward + self.cfg.eta * future
    }

    /// Value at the root after `depth` of the `horizon` expansions.
    fn value(&self, depth: u32) -> f64 {
        let root = &self.root;
        if self.threshold == 0.0 {
            return 0.0;
        }
        if depth >= self.cfg.horizon {
            return terminal_value(root, self.cfg);
        }
        if self.cfg.eta == 0.0 {
            return (root.prob_correct() * root.expected_partial_credit(self.cfg.d))
                .min(self.threshold);
        }
        let levels = self.cfg.horizon - depth;
        let mut next: Vec<NodeValue> = (0..=levels).map(|j| self.terminal(levels, j)).collect();
        for k in (1..levels).rev() {
            let rule = PowerRule::new(&self.points, self.root.n + k as f64);
            next = (0..=k)
                .map(|j| {
                    let children = [&next[j as usize + 1], &next[j as usize]];
                    self.tabulate(|y| self.continuation(k, j, y, &rule, children))
                })
                .collect();
        }
        let rule = PowerRule::new(&self.points, self.root.n);
        self.continuation(0, 0, 1.0, &rule, [&next[1], &next[0]])
            .min(self.threshold)
    }
}

/// Value `V(s)` of `state` reached after `depth` expansions.
///
/// `depth == 0` is the root. At `depth >= horizon` the myopic terminal value
/// is returned. The result always lies in `[0, ξ/(1 − η)]`.
pub fn bellman_value(state: &PosteriorState, cfg: &PolicyConfig, depth: u32) -> Result<f64> {
    cfg.validate()?;
    state.validate()?;
    let value = Lattice::new(cfg, *state, cfg.quad_nodes as usize).value(depth);
    if let Some(tolerance) = cfg.quad_tolerance {
        let fine = Lattice::new(cfg, *state, 2 * cfg.quad_nodes as usize).value(depth);
        if (fine - value).abs() > tolerance {
            return Err(Error::QuadratureNotConverged {
                coarse: value,
                fine,
                tolerance,
            });
        }
    }
    Ok(value)
}

/// Reference evaluator that expands the full tree of sampled response times.
///
/// Agrees with [`bellman_value`] up to quadrature and grid error but costs
/// `(2·quad_nodes)^(horizon − depth)` node evaluations.
pub fn expectimax_value(state: &PosteriorState, cfg: &PolicyConfig, depth: u32) -> Result<f64> {
    cfg.validate()?;
    state.validate()?;
    Ok(Expander::new(cfg).value(state, depth))
}

struct Expander<'a> {
    cfg: &'a PolicyConfig,
    threshold: f64,
    points: Vec<(f64, f64)>,
}

impl<'a> Expander<'a> {
    fn new(cfg: &'a PolicyConfig) -> Self {
        Self {
            cfg,
            threshold: cfg.threshold(),
            points: GaussLegendre::new(cfg.quad_nodes as usize)
                .mapped(0.0, 1.0)
                .collect(),
        }
    }

    fn value(&self, s: &PosteriorState, depth: u32) -> f64 {
        if self.threshold == 0.0 {
            return 0.0;
        }
        if depth >= self.cfg.horizon {
            return terminal_value(s, self.cfg);
        }
        let p = s.prob_correct();
        let q = 1.0 - p;
        let reward = p * s.expected_partial_credit(self.cfg.d);
        if self.cfg.eta == 0.0 {
            return reward.min(self.threshold);
        }
        let rule = PowerRule::new(&self.points, s.n);
        let (future, _) = rule.integrate(1.0, |u| {
            let gamma = s.gamma / u;
            let up = PosteriorState {
                alpha: s.alpha + 1.0,
                n: s.n + 1.0,
                gamma,
                ..*s
            };
            let down = PosteriorState {
                beta: s.beta + 1.0,
                n: s.n + 1.0,
                gamma,
                ..*s
            };
            p * self.value(&up, depth + 1) + q * self.value(&down, depth + 1)
        });
        (reward + self.cfg.eta * future).min(self.threshold)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Action {
    Continue,
    StopMastered,
    StopNotMastered,
}

impl Action {
    pub fn is_stop(self) -> bool {
        !matches!(self, Action::Continue)
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Action::Continue => "Continue",
            Action::StopMastered => "StopMastered",
            Action::StopNotMastered => "StopNotMastered",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum StopReason {
    ValueThreshold,
    DeclineRule,
    ConsecutiveRule,
    MaxItems,
    BaselineStability,
}

impl StopReason {
    pub fn as_str(self) -> &'static str {
        match self {
            StopReason::ValueThreshold => "value-threshold",
            StopReason::DeclineRule => "decline-rule",
            StopReason::ConsecutiveRule => "consecutive-rule",
            StopReason::MaxItems => "max-items",
            StopReason::BaselineStability => "baseline-stability",
        }
    }
}

/// Outcome of one stopping decision. For `Continue` the reason names the
/// rule that was evaluated and not met.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Decision {
    pub action: Action,
    pub value: f64,
    pub threshold: f64,
    pub reason: StopReason,
}

/// What the policy has seen so far.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct History {
    /// Expected-score means, starting with the prior mean; one more than `responses`.
    pub estimates: Vec<f64>,
    /// Correctness of each response in order.
    pub responses: Vec<bool>,
}

impl History {
    pub fn new(prior_mean: f64) -> Self {
        Self {
            estimates: alloc::vec![prior_mean],
            responses: Vec::new(),
        }
    }

    pub fn push(&mut self, correct: bool, mean: f64) {
        self.responses.push(correct);
        self.estimates.push(mean);
    }

    /// Number of responses recorded.
    pub fn len(&self) -> usize {
        self.responses.len()
    }

    pub fn is_empty(&self) -> bool {
        self.responses.is_empty()
    }
}

/// Decline rule: the expected score strictly decreased on each of the last
/// `decline_window` updates. `estimates` starts with the prior mean.
pub fn failure_rule(estimates: &[f64], cfg: &PolicyConfig) -> bool {
    let w = cfg.decline_window as usize;
    if w == 0 || estimates.len() < w + 1 {
        return false;
    }
    estimates[estimates.len() - w - 1..]
        .windows(2)
        .all(|pair| pair[1] < pair[0])
}

/// Consecutive rule: the last `window` responses are not all correct.
pub fn consecutive_rule(responses: &[bool], window: usize) -> bool {
    window > 0
        && responses.len() >= window
        && responses[responses.len() - window..].iter().any(|&c| !c)
}

/// Decides whether to stop after the responses in `history`, with `state`
/// the posterior they produced.
pub fn decide(state: &PosteriorState, history: &History, cfg: &PolicyConfig) -> Result<Decision> {
    let threshold = cfg.threshold();
    let value = bellman_value(state, cfg, 0)?;
    let items = history.len();
    let decision = |action, reason| Decision {
        action,
        value,
        threshold,
        reason,
    };
    if items >= cfg.min_items as usize {
        if value >= threshold {
            return Ok(decision(Action::StopMastered, StopReason::ValueThreshold));
        }
        let failed = match cfg.failure_mode {
            FailureMode::Decline => {
                failure_rule(&history.estimates, cfg).then_some(StopReason::DeclineRule)
            }
            FailureMode::Consecutive => {
                consecutive_rule(&history.responses, cfg.decline_window as usize)
                    .then_some(StopReason::ConsecutiveRule)
            }
        };
        if let Some(reason) = failed {
            return Ok(decision(Action::StopNotMastered, reason));
        }
    }
    if items >= cfg.max_items as usize {
        return Ok(decision(Action::StopNotMastered, StopReason::MaxItems));
    }
    Ok(decision(Action::Continue, StopReason::ValueThreshold))
}

/// Coefficients of `V(α, β, n, γ) = k1·α + k2·β + k3·n + k4·γ`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LinearValueWeights {
    pub k1: f64,
    pub k2: f64,
    pub k3: f64,
    pub k4: f64,
}

impl LinearValueWeights {
    /// The case-study weights `(1, 1, −0.71, −0.37)`.
    pub const CASE_STUDY: Self = Self {
        k1: 1.0,
        k2: 1.0,
        k3: -0.71,
        k4: -0.37,
    };

    pub const ZERO: Self = Self {
        k1: 0.0,
        k2: 0.0,
        k3: 0.0,
        k4: 0.0,
    };
}

pub fn linear_value(state: &PosteriorState, w: &LinearValueWeights) -> f64 {
    w.k1 * state.alpha + w.k2 * state.beta + w.k3 * state.n + w.k4 * state.gamma
}

/// Continuation term with the affine value in place of `V` for the children.
///
/// Affinity lets the time integral close: `E[V(s±(T))] = V(s±(0)) + k4·E[T]`
/// with `E[T] = γ/(n − 1)`. For `n ≤ 1` the predictive mean time is infinite
/// and the result is `±∞` (or the reward alone when `k4 = 0`).
pub fn linear_continuation(
    state: &PosteriorState,
    cfg: &PolicyConfig,
    w: &LinearValueWeights,
) -> f64 {
    let p = state.prob_correct();
    let q = 1.0 - p;
    let reward = p * state.expected_partial_credit(cfg.d);
    let base_up = PosteriorState {
        alpha: state.alpha + 1.0,
        n: state.n + 1.0,
        ..*state
    };
    let base_down = PosteriorState {
        beta: state.beta + 1.0,
        n: state.n + 1.0,
        ..*state
    };
    let time_term = if w.k4 == 0.0 {
        0.0
    } else if state.n > 1.0 {
        w.k4 * state.gamma / (state.n - 1.0)
    } else {
        w.k4 * f64::INFINITY
    };
    let future = p * linear_value(&base_up, w) + q * linear_value(&base_down, w) + time_term;
    reward + cfg.eta * future
}
