//! Deterministic mean-field dynamics of the SIS model, critical spreading
//! thresholds, stationary fixed points, and bifurcation scans.
//!
//! The per-class update is
//!
//! ```text
//! x_{n+1}(k) = x_n(k) + (c_k / M) * [ (1 - x_n(k)) nu k theta_n / D  -  delta x_n(k) ]
//! ```
//!
//! where theta_n is the infection probability of the observed node
//! (theta^X for the non-monophilic rule, theta^Z for the monophilic rule)
//! and the activation multiplier c_k encodes which node evolves per tick:
//! 1 for a uniform node X, k/k_bar for a random friend Y, and w_Z(k)/P(k)
//! for a random friend Z of a random node. The stationary condition is
//! c_k-free, so all three activations share their fixed points and
//! critical thresholds.

use std::fmt;
use std::io::Write;

use crate::graph::DegreeStats;
use crate::population::PopulationState;
use crate::scalar::Scalar;
use crate::sis::{Activation, ContagionRule};

#[derive(Debug)]
pub enum MeanFieldError {
    InvalidParameter(String),
    /// An iterate escaped [0, 1] by more than the numerical tolerance.
    IterateOutOfRange { tick: usize, class: usize, value: f64 },
    Numerical(String),
}

impl fmt::Display for MeanFieldError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MeanFieldError::InvalidParameter(msg) => write!(f, "invalid parameter: {msg}"),
            MeanFieldError::IterateOutOfRange { tick, class, value } => write!(
                f,
                "iterate escaped [0,1] at tick {tick}, class {class}: {value} (step-size misconfiguration)"
            ),
            MeanFieldError::Numerical(msg) => write!(f, "numerical error: {msg}"),
        }
    }
}

impl std::error::Error for MeanFieldError {}

/// Mean-field parameters; the degree statistics are passed alongside.
#[derive(Debug, Clone)]
pub struct MfdParams<S> {
    pub nu: S,
    pub delta: S,
    /// Network size M; the update step is c_k/M per tick.
    pub m: usize,
    pub activation: Activation,
    pub rule: ContagionRule,
}

impl<S: Scalar> MfdParams<S> {
    pub fn lambda(&self) -> S {
        self.nu / self.delta
    }

    fn validate(&self) -> Result<(), MeanFieldError> {
        if self.nu < S::zero() || self.nu > S::one() {
            return Err(MeanFieldError::InvalidParameter("nu must be in [0, 1]".into()));
        }
        if self.delta <= S::zero() || self.delta > S::one() {
            return Err(MeanFieldError::InvalidParameter("delta must be in (0, 1]".into()));
        }
        if self.m == 0 {
            return Err(MeanFieldError::InvalidParameter("m must be >= 1".into()));
        }
        Ok(())
    }
}

/// Probability that a uniformly chosen node is infected:
/// theta^X = sum_k P(k) x(k).
pub fn theta_x<S: Scalar>(x: &PopulationState<S>, stats: &DegreeStats<S>) -> S {
    weighted_theta(x.fractions(), &stats.degree_dist)
}

/// Probability that a random friend Z of a random node is infected:
/// theta^Z = sum_k [sum_{k'} P(k') P(k|k')] x(k).
pub fn theta_z<S: Scalar>(x: &PopulationState<S>, stats: &DegreeStats<S>) -> S {
    weighted_theta(x.fractions(), &stats.z_weights)
}

fn weighted_theta<S: Scalar>(x: &[S], weights: &[S]) -> S {
    let width = x.len().min(weights.len());
    (1..width).map(|k| weights[k] * x[k]).sum()
}

/// Observation weights of a rule: P(k) for non-monophilic, w_Z(k) for
/// monophilic.
pub fn rule_weights<S: Scalar>(stats: &DegreeStats<S>, rule: ContagionRule) -> &[S] {
    match rule {
        ContagionRule::NonMonophilic => &stats.degree_dist,
        ContagionRule::Monophilic => &stats.z_weights,
    }
}

/// Per-class drift of the viral adoption rules:
/// drift(k) = (1 - x(k)) nu k theta / D - delta x(k), with
/// theta = sum_k weights(k) x(k).
///
/// Shared by the static mean-field step and the reactive-network ODE, so
/// the two reduce to each other bit-for-bit in the degenerate cases.
pub fn viral_drift<S: Scalar>(
    x: &[S],
    weights: &[S],
    nu: S,
    delta: S,
    d_max: usize,
) -> Vec<S> {
    let theta = weighted_theta(x, weights);
    let d = S::from_count(d_max);
    (0..x.len())
        .map(|k| {
            // Classes with no observation weight carry no nodes (census
            // statistics); they have no dynamics.
            if k == 0 || k >= weights.len() || weights[k] == S::zero() {
                S::zero()
            } else {
                (S::one() - x[k]) * nu * S::from_count(k) * theta / d - delta * x[k]
            }
        })
        .collect()
}

/// Activation multiplier c_k per degree class.
pub fn activation_multipliers<S: Scalar>(
    stats: &DegreeStats<S>,
    activation: Activation,
) -> Vec<S> {
    let width = stats.width();
    match activation {
        Activation::UniformX => vec![S::one(); width],
        Activation::RandomFriendY => (0..width)
            .map(|k| S::from_count(k) / stats.mean_degree)
            .collect(),
        Activation::FriendOfNodeZ => (0..width)
            .map(|k| {
                let p = stats.degree_dist[k];
                if p > S::zero() {
                    stats.z_weights[k] / p
                } else {
                    S::zero()
                }
            })
            .collect(),
    }
}

const RANGE_TOL: f64 = 1e-12;

/// One mean-field tick. `multipliers` comes from [`activation_multipliers`].
pub fn mfd_step<S: Scalar>(
    x: &[S],
    stats: &DegreeStats<S>,
    params: &MfdParams<S>,
    multipliers: &[S],
    tick: usize,
) -> Result<Vec<S>, MeanFieldError> {
    let weights = rule_weights(stats, params.rule);
    let drift = viral_drift(x, weights, params.nu, params.delta, stats.max_degree);
    let m = S::from_count(params.m);
    let lo = S::from_f64_lossy(-RANGE_TOL);
    let hi = S::one() + S::from_f64_lossy(RANGE_TOL);
    let mut next = Vec::with_capacity(x.len());
    for k in 0..x.len() {
        let v = x[k] + multipliers[k] * drift[k] / m;
        if v < lo || v > hi {
            return Err(MeanFieldError::IterateOutOfRange {
                tick,
                class: k,
                value: v.to_f64().unwrap_or(f64::NAN),
            });
        }
        next.push(v);
    }
    Ok(next)
}

/// Iterates `ticks` mean-field steps, returning every iterate
/// (ticks + 1 states including x0).
pub fn mfd_iterate<S: Scalar>(
    stats: &DegreeStats<S>,
    params: &MfdParams<S>,
    x0: &PopulationState<S>,
    ticks: usize,
) -> Result<Vec<PopulationState<S>>, MeanFieldError> {
    params.validate()?;
    let multipliers = activation_multipliers(stats, params.activation);
    let mut x = resize_to_width(x0.fractions(), stats.width());
    let mut out = Vec::with_capacity(ticks + 1);
    out.push(PopulationState::from_fractions_unchecked(x.clone()));
    for tick in 0..ticks {
        x = mfd_step(&x, stats, params, &multipliers, tick)?;
        out.push(PopulationState::from_fractions_unchecked(x.clone()));
    }
    Ok(out)
}

/// Runs `sweeps * M` ticks, recording one state per sweep
/// (sweeps + 1 states including x0).
pub fn mfd_trajectory<S: Scalar>(
    stats: &DegreeStats<S>,
    params: &MfdParams<S>,
    x0: &PopulationState<S>,
    sweeps: usize,
) -> Result<Vec<PopulationState<S>>, MeanFieldError> {
    params.validate()?;
    let multipliers = activation_multipliers(stats, params.activation);
    let mut x = resize_to_width(x0.fractions(), stats.width());
    let mut out = Vec::with_capacity(sweeps + 1);
    out.push(PopulationState::from_fractions_unchecked(x.clone()));
    for sweep in 0..sweeps {
        for sub in 0..params.m {
            x = mfd_step(&x, stats, params, &multipliers, sweep * params.m + sub)?;
        }
        out.push(PopulationState::from_fractions_unchecked(x.clone()));
    }
    Ok(out)
}

fn resize_to_width<S: Scalar>(x: &[S], width: usize) -> Vec<S> {
    let mut v = x.to_vec();
    v.resize(width, S::zero());
    v
}

/// Iterates the generic update
/// x_{n+1}(k) = x_n(k) + (c_k/M) [P01(k, x_n) - P10(k, x_n)]
/// with caller-supplied scaled transition probabilities, for experimenting
/// with adoption rules beyond the built-in viral ones. The multipliers
/// come from [`activation_multipliers`].
pub fn mfd_iterate_generic<S, F01, F10>(
    multipliers: &[S],
    m: usize,
    x0: &PopulationState<S>,
    ticks: usize,
    p01: F01,
    p10: F10,
) -> Result<Vec<PopulationState<S>>, MeanFieldError>
where
    S: Scalar,
    F01: Fn(usize, &[S]) -> S,
    F10: Fn(usize, &[S]) -> S,
{
    if m == 0 {
        return Err(MeanFieldError::InvalidParameter("m must be >= 1".into()));
    }
    let m_s = S::from_count(m);
    let lo = S::from_f64_lossy(-RANGE_TOL);
    let hi = S::one() + S::from_f64_lossy(RANGE_TOL);
    let mut x: Vec<S> = x0.fractions().to_vec();
    let mut out = Vec::with_capacity(ticks + 1);
    out.push(PopulationState::from_fractions_unchecked(x.clone()));
    for tick in 0..ticks {
        let mut next = Vec::with_capacity(x.len());
        for k in 0..x.len() {
            let drift = p01(k, &x) - p10(k, &x);
            let v = x[k] + multipliers[k] * drift / m_s;
            if v < lo || v > hi {
                return Err(MeanFieldError::IterateOutOfRange {
                    tick,
                    class: k,
                    value: v.to_f64().unwrap_or(f64::NAN),
                });
            }
            next.push(v);
        }
        x = next;
        out.push(PopulationState::from_fractions_unchecked(x.clone()));
    }
    Ok(out)
}

/// Critical effective spreading rate for a contagion rule.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThresholdResult<S> {
    pub lambda_star: S,
    pub rule: ContagionRule,
}

/// lambda*_X = D / E[d(X)] (non-monophilic),
/// lambda*_Z = D / E[d(Z)] (monophilic).
pub fn critical_threshold<S: Scalar>(
    stats: &DegreeStats<S>,
    rule: ContagionRule,
) -> ThresholdResult<S> {
    let d = S::from_count(stats.max_degree);
    let lambda_star = match rule {
        ContagionRule::NonMonophilic => d / stats.expected_degree_x(),
        ContagionRule::Monophilic => d / stats.expected_degree_z(),
    };
    ThresholdResult { lambda_star, rule }
}

/// Stationary infected fraction rho = sum_k P(k) x*(k); zero when
/// lambda <= lambda*.
pub fn stationary_fraction<S: Scalar>(
    stats: &DegreeStats<S>,
    params: &MfdParams<S>,
) -> Result<S, MeanFieldError> {
    params.validate()?;
    stationary_fraction_lambda(stats, params.rule, params.lambda())
}

/// Stationary fraction as a function of lambda alone (only the ratio
/// nu/delta enters the fixed point).
pub fn stationary_fraction_lambda<S: Scalar>(
    stats: &DegreeStats<S>,
    rule: ContagionRule,
    lambda: S,
) -> Result<S, MeanFieldError> {
    Ok(match stationary_theta(stats, rule, lambda)? {
        None => S::zero(),
        Some(theta) => {
            let x = stationary_classes(stats, lambda, theta);
            (1..stats.width()).map(|k| stats.degree_dist[k] * x[k]).sum()
        }
    })
}

/// Stationary per-class state x*(k); all-zero when lambda <= lambda*.
pub fn stationary_state<S: Scalar>(
    stats: &DegreeStats<S>,
    rule: ContagionRule,
    lambda: S,
) -> Result<PopulationState<S>, MeanFieldError> {
    Ok(match stationary_theta(stats, rule, lambda)? {
        None => PopulationState::zeros(stats.max_degree),
        Some(theta) => {
            PopulationState::from_fractions(stationary_classes(stats, lambda, theta))
        }
    })
}

fn stationary_classes<S: Scalar>(stats: &DegreeStats<S>, lambda: S, theta: S) -> Vec<S> {
    let d = S::from_count(stats.max_degree);
    (0..stats.width())
        .map(|k| {
            if k == 0 || stats.degree_dist[k] == S::zero() {
                S::zero()
            } else {
                let r = lambda * S::from_count(k) * theta / d;
                r / (S::one() + r)
            }
        })
        .collect()
}

/// Solves the scalar fixed point
/// theta = sum_k w_k (lambda k theta / D) / (1 + lambda k theta / D)
/// by bisection; `None` when only the zero solution exists
/// (g'(0+) = lambda E[d]/D <= 1, i.e. lambda <= lambda*, tie included).
fn stationary_theta<S: Scalar>(
    stats: &DegreeStats<S>,
    rule: ContagionRule,
    lambda: S,
) -> Result<Option<S>, MeanFieldError> {
    if lambda < S::zero() || !lambda.is_finite() {
        return Err(MeanFieldError::InvalidParameter("lambda must be finite and >= 0".into()));
    }
    let weights = rule_weights(stats, rule);
    let d = S::from_count(stats.max_degree);
    let slope0: S = (1..stats.width())
        .map(|k| lambda * weights[k] * S::from_count(k) / d)
        .sum();
    if !(slope0 > S::one()) {
        return Ok(None);
    }
    // Bisect on h(theta) = g(theta)/theta = sum_k w_k (lambda k/D)/(1 +
    // lambda k theta/D) - 1, which is finite at 0 (h(0) = slope0 - 1 > 0),
    // strictly decreasing, and shares the positive root of g.
    let h = |theta: S| -> S {
        (1..stats.width())
            .map(|k| {
                let rate = lambda * S::from_count(k) / d;
                weights[k] * rate / (S::one() + rate * theta)
            })
            .sum::<S>()
            - S::one()
    };
    let mut lo = S::zero();
    let mut hi = S::one();
    if !(h(hi) < S::zero()) {
        return Err(MeanFieldError::Numerical(format!(
            "bisection bracket failed: h(1)={}, lambda={lambda}",
            h(hi)
        )));
    }
    let tol = S::from_f64_lossy(1e-12).max(S::epsilon() * S::from_f64_lossy(4.0));
    for _ in 0..500 {
        let mid = (lo + hi) * S::from_f64_lossy(0.5);
        if h(mid) > S::zero() {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= tol * hi.max(S::one()) {
            return Ok(Some((lo + hi) * S::from_f64_lossy(0.5)));
        }
    }
    Err(MeanFieldError::Numerical("theta bisection did not converge".into()))
}

/// rho(lambda) over an ascending grid.
pub fn bifurcation_scan<S: Scalar>(
    stats: &DegreeStats<S>,
    rule: ContagionRule,
    lambda_grid: &[S],
) -> Result<Vec<(S, S)>, MeanFieldError> {
    if lambda_grid.windows(2).any(|w| w[1] < w[0]) {
        return Err(MeanFieldError::InvalidParameter(
            "lambda grid must be sorted ascending".into(),
        ));
    }
    lambda_grid
        .iter()
        .map(|&l| stationary_fraction_lambda(stats, rule, l).map(|rho| (l, rho)))
        .collect()
}

/// Writes a bifurcation curve as CSV (lambda, rho_non_monophilic,
/// rho_monophilic).
pub fn write_bifurcation_csv<W: Write, S: Scalar>(
    mut out: W,
    non_monophilic: &[(S, S)],
    monophilic: &[(S, S)],
) -> std::io::Result<()> {
    writeln!(out, "lambda,rho_non_monophilic,rho_monophilic")?;
    for (a, b) in non_monophilic.iter().zip(monophilic) {
        writeln!(out, "{},{},{}", a.0, a.1, b.1)?;
    }
    Ok(())
}
