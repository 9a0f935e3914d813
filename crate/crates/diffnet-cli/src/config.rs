//! JSON experiment configuration: schema, parsing, validation.

use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};

use diffnet::polling::Estimator;
use diffnet::sis::{Activation, ContagionRule, NeighborMode};

#[derive(Debug)]
pub struct ConfigError {
    pub field: String,
    pub message: String,
}

impl ConfigError {
    fn new(field: &str, message: impl Into<String>) -> ConfigError {
        ConfigError { field: field.into(), message: message.into() }
    }
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "config field `{}`: {}", self.field, self.message)
    }
}

impl std::error::Error for ConfigError {}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExperimentKind {
    ParadoxCdfs,
    Bifurcation,
    MseGrid,
    ReactiveCompare,
    Tracking,
}

impl ExperimentKind {
    pub fn name(self) -> &'static str {
        match self {
            ExperimentKind::ParadoxCdfs => "paradox-cdfs",
            ExperimentKind::Bifurcation => "bifurcation",
            ExperimentKind::MseGrid => "mse-grid",
            ExperimentKind::ReactiveCompare => "reactive-compare",
            ExperimentKind::Tracking => "tracking",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GraphModel {
    PowerLaw,
    ErdosRenyi,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GraphSpec {
    pub model: GraphModel,
    pub n: usize,
    #[serde(default)]
    pub alpha: Option<f64>,
    #[serde(default)]
    pub avg_degree: Option<f64>,
    #[serde(default)]
    pub d_min: Option<usize>,
    #[serde(default)]
    pub d_max: Option<usize>,
    /// Assortativity rewiring targets; empty means the raw graph.
    #[serde(default)]
    pub r_kk: Vec<f64>,
    #[serde(default = "default_rewire_tol")]
    pub rewire_tol: f64,
    #[serde(default = "default_rewire_steps")]
    pub rewire_max_steps: usize,
    /// Degree-label correlation targets (used by mse-grid; other kinds use
    /// the first entry when labels are needed).
    #[serde(default)]
    pub p_ks: Vec<f64>,
    #[serde(default = "default_label_tol")]
    pub label_tol: f64,
    /// Initial infected fraction.
    #[serde(default = "default_rho0")]
    pub rho0: f64,
}

fn default_rewire_tol() -> f64 {
    0.02
}
fn default_rewire_steps() -> usize {
    5_000_000
}
fn default_label_tol() -> f64 {
    0.02
}
fn default_rho0() -> f64 {
    0.3
}

impl GraphSpec {
    pub fn d_min(&self) -> usize {
        self.d_min.unwrap_or(1)
    }

    pub fn d_max(&self) -> usize {
        self.d_max.unwrap_or_else(|| (self.n as f64).sqrt().floor() as usize)
    }

    pub fn model_tag(&self) -> String {
        match self.model {
            GraphModel::PowerLaw => format!("power-law-{}", self.alpha.unwrap_or(0.0)),
            GraphModel::ErdosRenyi => format!("er-{}", self.avg_degree.unwrap_or(0.0)),
        }
    }

    fn validate(&self) -> Result<(), ConfigError> {
        if self.n < 2 {
            return Err(ConfigError::new("graph.n", "must be >= 2"));
        }
        match self.model {
            GraphModel::PowerLaw => {
                let alpha = self
                    .alpha
                    .ok_or_else(|| ConfigError::new("graph.alpha", "required for power-law"))?;
                if alpha <= 1.0 {
                    return Err(ConfigError::new("graph.alpha", "must be > 1"));
                }
                if self.d_min() < 1 || self.d_min() > self.d_max() || self.d_max() >= self.n {
                    return Err(ConfigError::new(
                        "graph.d_min/d_max",
                        "need 1 <= d_min <= d_max < n",
                    ));
                }
            }
            GraphModel::ErdosRenyi => {
                let avg = self.avg_degree.ok_or_else(|| {
                    ConfigError::new("graph.avg_degree", "required for erdos-renyi")
                })?;
                if avg <= 0.0 || avg > (self.n - 1) as f64 {
                    return Err(ConfigError::new("graph.avg_degree", "need 0 < avg <= n-1"));
                }
            }
        }
        for r in &self.r_kk {
            if !(-1.0..=1.0).contains(r) {
                return Err(ConfigError::new("graph.r_kk", "targets must be in [-1, 1]"));
            }
        }
        for p in &self.p_ks {
            if !(-1.0..=1.0).contains(p) {
                return Err(ConfigError::new("graph.p_ks", "targets must be in [-1, 1]"));
            }
        }
        if !(0.0..=1.0).contains(&self.rho0) {
            return Err(ConfigError::new("graph.rho0", "must be in [0, 1]"));
        }
        if self.rewire_tol <= 0.0 {
            return Err(ConfigError::new("graph.rewire_tol", "must be > 0"));
        }
        if self.label_tol <= 0.0 {
            return Err(ConfigError::new("graph.label_tol", "must be > 0"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RuleSpec {
    NonMonophilic,
    Monophilic,
}

impl From<RuleSpec> for ContagionRule {
    fn from(r: RuleSpec) -> ContagionRule {
        match r {
            RuleSpec::NonMonophilic => ContagionRule::NonMonophilic,
            RuleSpec::Monophilic => ContagionRule::Monophilic,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ActivationSpec {
    UniformX,
    RandomFriendY,
    FriendOfNodeZ,
}

impl From<ActivationSpec> for Activation {
    fn from(a: ActivationSpec) -> Activation {
        match a {
            ActivationSpec::UniformX => Activation::UniformX,
            ActivationSpec::RandomFriendY => Activation::RandomFriendY,
            ActivationSpec::FriendOfNodeZ => Activation::FriendOfNodeZ,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum NeighborModeSpec {
    Graph,
    UnbiasedDegree,
}

impl From<NeighborModeSpec> for NeighborMode {
    fn from(m: NeighborModeSpec) -> NeighborMode {
        match m {
            NeighborModeSpec::Graph => NeighborMode::Graph,
            NeighborModeSpec::UnbiasedDegree => NeighborMode::UnbiasedDegree,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LambdaGrid {
    pub start: f64,
    pub stop: f64,
    pub points: usize,
}

impl LambdaGrid {
    pub fn values(&self) -> Vec<f64> {
        let step = if self.points > 1 {
            (self.stop - self.start) / (self.points - 1) as f64
        } else {
            0.0
        };
        (0..self.points).map(|i| self.start + i as f64 * step).collect()
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DynamicsSpec {
    pub nu: f64,
    pub delta: f64,
    #[serde(default = "default_rule")]
    pub rule: RuleSpec,
    #[serde(default = "default_activation")]
    pub activation: ActivationSpec,
    #[serde(default = "default_neighbor_mode")]
    pub neighbor_mode: NeighborModeSpec,
    #[serde(default = "default_sweeps")]
    pub sweeps: usize,
    #[serde(default)]
    pub lambda_grid: Option<LambdaGrid>,
}

fn default_rule() -> RuleSpec {
    RuleSpec::NonMonophilic
}
fn default_activation() -> ActivationSpec {
    ActivationSpec::UniformX
}
fn default_neighbor_mode() -> NeighborModeSpec {
    NeighborModeSpec::UnbiasedDegree
}
fn default_sweeps() -> usize {
    50
}

impl DynamicsSpec {
    fn validate(&self) -> Result<(), ConfigError> {
        if !(0.0..=1.0).contains(&self.nu) {
            return Err(ConfigError::new("dynamics.nu", "must be in [0, 1]"));
        }
        if !(self.delta > 0.0 && self.delta <= 1.0) {
            return Err(ConfigError::new("dynamics.delta", "must be in (0, 1]"));
        }
        if let Some(grid) = &self.lambda_grid {
            if grid.points == 0 {
                return Err(ConfigError::new("dynamics.lambda_grid.points", "must be >= 1"));
            }
            if grid.stop < grid.start {
                return Err(ConfigError::new("dynamics.lambda_grid", "stop must be >= start"));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EstimatorSpec {
    Intent,
    NepUniform,
    NepRandomWalk,
    NepFriendOfNode,
}

impl From<EstimatorSpec> for Estimator {
    fn from(e: EstimatorSpec) -> Estimator {
        match e {
            EstimatorSpec::Intent => Estimator::Intent,
            EstimatorSpec::NepUniform => Estimator::NepUniform,
            EstimatorSpec::NepRandomWalk => Estimator::NepRandomWalk,
            EstimatorSpec::NepFriendOfNode => Estimator::NepFriendOfNode,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PollingSpec {
    pub estimators: Vec<EstimatorSpec>,
    pub budgets: Vec<usize>,
    pub trials: usize,
    #[serde(default = "default_walk_length")]
    pub walk_length: usize,
}

fn default_walk_length() -> usize {
    1000
}

impl PollingSpec {
    fn validate(&self) -> Result<(), ConfigError> {
        if self.estimators.is_empty() {
            return Err(ConfigError::new("polling.estimators", "must not be empty"));
        }
        if self.budgets.is_empty() || self.budgets.contains(&0) {
            return Err(ConfigError::new("polling.budgets", "need budgets >= 1"));
        }
        if self.trials < 100 {
            return Err(ConfigError::new("polling.trials", "must be >= 100"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum QModeSpec {
    Scale,
    Adaptive,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TrackingSpec {
    pub samples_per_class: usize,
    #[serde(default = "default_q_mode")]
    pub q_mode: QModeSpec,
    #[serde(default = "default_q_scale")]
    pub q_scale: f64,
    #[serde(default = "default_substeps")]
    pub substeps: usize,
    #[serde(default = "default_track_sweeps")]
    pub sweeps: usize,
}

fn default_q_mode() -> QModeSpec {
    QModeSpec::Adaptive
}
fn default_q_scale() -> f64 {
    1.0
}
fn default_substeps() -> usize {
    4
}
fn default_track_sweeps() -> usize {
    30
}

impl TrackingSpec {
    fn validate(&self) -> Result<(), ConfigError> {
        if self.samples_per_class == 0 {
            return Err(ConfigError::new("tracking.samples_per_class", "must be >= 1"));
        }
        if self.substeps == 0 {
            return Err(ConfigError::new("tracking.substeps", "must be >= 1"));
        }
        if self.q_scale < 0.0 {
            return Err(ConfigError::new("tracking.q_scale", "must be >= 0"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct KernelSpec {
    pub p_low: Vec<Vec<f64>>,
    pub p_high: Vec<Vec<f64>>,
    pub steepness: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ReactiveSpec {
    pub kernel: KernelSpec,
    #[serde(default = "default_reactive_sweeps")]
    pub sweeps: usize,
    #[serde(default = "default_reactive_seeds")]
    pub seeds: usize,
}

fn default_reactive_sweeps() -> usize {
    10
}
fn default_reactive_seeds() -> usize {
    10
}

impl ReactiveSpec {
    fn validate(&self) -> Result<(), ConfigError> {
        for (name, m) in [("p_low", &self.kernel.p_low), ("p_high", &self.kernel.p_high)] {
            let n = m.len();
            if n == 0 || m.iter().any(|row| row.len() != n) {
                return Err(ConfigError::new(
                    &format!("reactive.kernel.{name}"),
                    "must be a square matrix",
                ));
            }
            for (i, row) in m.iter().enumerate() {
                let sum: f64 = row.iter().sum();
                if row.iter().any(|&v| v < 0.0) || (sum - 1.0).abs() > 1e-9 {
                    return Err(ConfigError::new(
                        &format!("reactive.kernel.{name}"),
                        format!("row {i} is not a probability distribution"),
                    ));
                }
            }
        }
        if self.kernel.p_low.len() != self.kernel.p_high.len() {
            return Err(ConfigError::new("reactive.kernel", "p_low/p_high shape mismatch"));
        }
        if self.seeds == 0 {
            return Err(ConfigError::new("reactive.seeds", "must be >= 1"));
        }
        Ok(())
    }
}

/// One experiment per file.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub kind: ExperimentKind,
    pub seed: u64,
    pub output_dir: String,
    pub graph: GraphSpec,
    #[serde(default)]
    pub dynamics: Option<DynamicsSpec>,
    #[serde(default)]
    pub polling: Option<PollingSpec>,
    #[serde(default)]
    pub tracking: Option<TrackingSpec>,
    #[serde(default)]
    pub reactive: Option<ReactiveSpec>,
}

impl ExperimentConfig {
    pub fn load(path: &Path) -> Result<ExperimentConfig, String> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| format!("cannot read {}: {e}", path.display()))?;
        let config: ExperimentConfig =
            serde_json::from_str(&text).map_err(|e| format!("invalid config json: {e}"))?;
        config.validate().map_err(|e| e.to_string())?;
        Ok(config)
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        self.graph.validate()?;
        if let Some(d) = &self.dynamics {
            d.validate()?;
        }
        if let Some(p) = &self.polling {
            p.validate()?;
        }
        if let Some(t) = &self.tracking {
            t.validate()?;
        }
        if let Some(r) = &self.reactive {
            r.validate()?;
        }
        match self.kind {
            ExperimentKind::ParadoxCdfs => {}
            ExperimentKind::Bifurcation => {
                let d = self
                    .dynamics
                    .as_ref()
                    .ok_or_else(|| ConfigError::new("dynamics", "required for bifurcation"))?;
                if d.lambda_grid.is_none() {
                    return Err(ConfigError::new(
                        "dynamics.lambda_grid",
                        "required for bifurcation",
                    ));
                }
            }
            ExperimentKind::MseGrid => {
                self.polling
                    .as_ref()
                    .ok_or_else(|| ConfigError::new("polling", "required for mse-grid"))?;
                if self.graph.p_ks.is_empty() {
                    return Err(ConfigError::new("graph.p_ks", "required for mse-grid"));
                }
            }
            ExperimentKind::ReactiveCompare => {
                self.reactive
                    .as_ref()
                    .ok_or_else(|| ConfigError::new("reactive", "required for reactive-compare"))?;
                self.dynamics
                    .as_ref()
                    .ok_or_else(|| ConfigError::new("dynamics", "required for reactive-compare"))?;
                if self.graph.r_kk.len() != self.reactive.as_ref().unwrap().kernel.p_low.len() {
                    return Err(ConfigError::new(
                        "graph.r_kk",
                        "must list one target per kernel state",
                    ));
                }
            }
            ExperimentKind::Tracking => {
                self.tracking
                    .as_ref()
                    .ok_or_else(|| ConfigError::new("tracking", "required for tracking"))?;
                self.dynamics
                    .as_ref()
                    .ok_or_else(|| ConfigError::new("dynamics", "required for tracking"))?;
            }
        }
        Ok(())
    }

    /// Canonical serialization used for the manifest hash: struct field
    /// order, no whitespace variance.
    pub fn canonical_json(&self) -> String {
        serde_json::to_string(self).expect("config serializes")
    }
}

/// Human-readable schema description for `describe`.
pub const SCHEMA_HELP: &str = r#"Experiment config (JSON, one experiment per file)

{
  "kind": "paradox-cdfs" | "bifurcation" | "mse-grid" | "reactive-compare" | "tracking",
  "seed": <u64 base seed>,
  "output_dir": "<directory for CSV/SVG/manifest outputs>",

  "graph": {
    "model": "power-law" | "erdos-renyi",
    "n": <node count>,
    "alpha": <power-law exponent;       power-law only>,
    "avg_degree": <target mean degree;  erdos-renyi only>,
    "d_min": <min degree, default 1>,
    "d_max": <max degree, default floor(sqrt(n))>,
    "r_kk": [<assortativity rewiring targets>],
    "rewire_tol": <default 0.02>,
    "rewire_max_steps": <default 5000000>,
    "p_ks": [<degree-label correlation targets>],
    "label_tol": <default 0.02>,
    "rho0": <initial infected fraction, default 0.3>
  },

  "dynamics": {                       // bifurcation, reactive-compare, tracking
    "nu": <infection scale in [0,1]>,
    "delta": <recovery probability in (0,1]>,
    "rule": "non-monophilic" | "monophilic"       (default non-monophilic),
    "activation": "uniform-x" | "random-friend-y" | "friend-of-node-z",
    "neighbor_mode": "graph" | "unbiased-degree"  (default unbiased-degree),
    "sweeps": <sweeps to simulate, default 50>,
    "lambda_grid": {"start": f, "stop": f, "points": n}   // bifurcation
  },

  "polling": {                        // mse-grid
    "estimators": ["intent", "nep-uniform", "nep-random-walk", "nep-friend-of-node"],
    "budgets": [<sample budgets>],
    "trials": <Monte-Carlo trials, >= 100>,
    "walk_length": <random-walk steps, default 1000>
  },

  "tracking": {                       // tracking
    "samples_per_class": <nu(k) for every occupied class>,
    "q_mode": "scale" | "adaptive"    (default adaptive),
    "q_scale": <process-noise scale, default 1.0>,
    "substeps": <predictions per sweep, default 4>,
    "sweeps": <default 30>
  },

  "reactive": {                       // reactive-compare
    "kernel": {"p_low": [[..]], "p_high": [[..]], "steepness": f},
    "sweeps": <default 10>,
    "seeds": <simulation replicas, default 10>
  }
}

Child seeds are derived per (experiment kind, panel, trial) with a
splitmix64 chain, so identical configs re-run byte-identically and panels
are order-independent."#;
