//! Tracking the infected population state through time: polynomial
//! mean-field dynamics, exact Gaussian moments of the quadratic map, the
//! predict/update filter recursion, noisy per-class observations, and the
//! end-to-end tracking loop over a running SIS simulation.

mod dynamics;
mod filter;
mod moments;
mod observe;

pub use dynamics::{build_dynamics, PolynomialDynamics, Tensor3};
pub use filter::{
    normalized_innovation_squared, predict, update, FilterState, TrackingError,
};
pub use moments::gaussian_quadratic_moments;
pub use observe::{observe, Observation, ObservationMode, ObservationPlan, R_FLOOR};

use std::io::Write;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::graph::Graph;
use crate::linalg::Mat;
use crate::meanfield::{rule_weights, MfdParams};
use crate::seed::{derive_seed, tag};
use crate::sis::{Activation, SisConfig, SisSimulator};

/// Process-noise model, per sweep.
#[derive(Debug, Clone)]
pub enum QSpec {
    /// Diagonal c/M per class: M ticks of the martingale-bound default
    /// c/M^2 per tick.
    Scale(f64),
    /// Diagonal with per-class birth-death variance
    /// scale * [delta p(k) + (1 - p(k)) nu k theta / D] / M(k), evaluated
    /// at the current estimate. On heavy-tailed graphs the small classes
    /// fluctuate on the 1/M(k) scale, which the uniform default
    /// under-models.
    Adaptive { scale: f64 },
    /// Explicit per-sweep covariance.
    Matrix(Mat<f64>),
}

/// Knobs of the tracking loop.
#[derive(Debug, Clone)]
pub struct TrackOptions {
    /// Prediction sub-steps per sweep; the dynamics are built with
    /// M = substeps so the composed predictions span one sweep unit.
    pub substeps: usize,
    /// Per-sweep process noise, split evenly across the sub-steps.
    pub process_noise: QSpec,
    /// When false, only the anchoring update at sweep 0 is applied
    /// (prediction-only ablation).
    pub updates_enabled: bool,
}

impl Default for TrackOptions {
    fn default() -> TrackOptions {
        TrackOptions {
            substeps: 4,
            process_noise: QSpec::Scale(1.0),
            updates_enabled: true,
        }
    }
}

/// One sweep of the tracking log, indexed like `TrackLog::classes`.
#[derive(Debug, Clone)]
pub struct TrackRecord {
    pub sweep: usize,
    pub truth: Vec<f64>,
    /// Per-class observation; `None` when the class was not observed this
    /// sweep.
    pub observation: Vec<Option<f64>>,
    /// Posterior mean, clipped to [0, 1] for reporting.
    pub mean: Vec<f64>,
    pub std: Vec<f64>,
    /// Normalized innovation squared of this sweep's observation.
    pub nis: Option<f64>,
}

#[derive(Debug, Clone)]
pub struct TrackLog {
    /// Degree class of each coordinate.
    pub classes: Vec<usize>,
    pub records: Vec<TrackRecord>,
    /// Root-mean-square error of the filtered means against the truth.
    pub rmse_filter: f64,
    /// Root-mean-square error of the raw observations against the truth.
    pub rmse_observation: f64,
    /// Average normalized innovation squared per observation row.
    pub mean_nis_per_dim: f64,
}

impl TrackLog {
    /// CSV rows (sweep, k, truth, observation, filtered_mean, filtered_std);
    /// the observation column is empty when the class was unobserved.
    pub fn write_csv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "sweep,k,truth,observation,filtered_mean,filtered_std")?;
        for rec in &self.records {
            for (i, &k) in self.classes.iter().enumerate() {
                let obs = rec.observation[i].map_or(String::new(), |v| v.to_string());
                writeln!(
                    out,
                    "{},{},{},{},{},{}",
                    rec.sweep, k, rec.truth[i], obs, rec.mean[i], rec.std[i]
                )?;
            }
        }
        Ok(())
    }
}

/// Runs the SIS simulation for `sweeps * M` ticks, interleaving per sweep:
/// M simulation ticks, `substeps` exact-moment predictions, one
/// observation, and one measurement update. Sweep 0 performs the anchoring
/// observation/update from an uninformative prior.
pub fn track(
    g: &Graph,
    cfg: &SisConfig,
    plan: &ObservationPlan,
    opts: &TrackOptions,
    sweeps: usize,
    seed: u64,
) -> Result<TrackLog, TrackingError> {
    cfg.validate()
        .map_err(|e| TrackingError::InvalidParameter(e.to_string()))?;
    plan.validate(g)?;
    if opts.substeps == 0 {
        return Err(TrackingError::InvalidParameter("substeps must be >= 1".into()));
    }
    let stats = g.stats();
    let params = MfdParams {
        nu: cfg.nu,
        delta: cfg.delta,
        m: opts.substeps,
        activation: Activation::UniformX,
        rule: cfg.rule,
    };
    let dynamics = build_dynamics(&stats, &params);
    let classes = dynamics.classes.clone();
    let dim = classes.len();

    let m = g.node_count();
    let weights = rule_weights(&stats, cfg.rule).to_vec();
    let class_sizes: Vec<f64> = classes
        .iter()
        .map(|&k| stats.degree_counts[k] as f64)
        .collect();
    if let QSpec::Matrix(q) = &opts.process_noise {
        if q.rows() != dim || q.cols() != dim {
            return Err(TrackingError::DimensionMismatch("process noise shape".into()));
        }
    }
    let q_sub_for = |mean: &[f64]| -> Mat<f64> {
        let sub = opts.substeps as f64;
        match &opts.process_noise {
            QSpec::Scale(c) => Mat::from_diag(&vec![c / m as f64 / sub; dim]),
            QSpec::Matrix(q) => q.scale(1.0 / sub),
            QSpec::Adaptive { scale } => {
                let p: Vec<f64> = mean.iter().map(|v| v.clamp(0.0, 1.0)).collect();
                let theta: f64 = classes
                    .iter()
                    .zip(&p)
                    .map(|(&k, &pk)| weights[k] * pk)
                    .sum();
                let d = stats.max_degree as f64;
                let diag: Vec<f64> = classes
                    .iter()
                    .zip(&p)
                    .zip(&class_sizes)
                    .map(|((&k, &pk), &mk)| {
                        let flip_rate =
                            cfg.delta * pk + (1.0 - pk) * cfg.nu * k as f64 * theta / d;
                        scale * flip_rate.max(1e-6) / mk / sub
                    })
                    .collect();
                Mat::from_diag(&diag)
            }
        }
    };

    let mut sis_rng = ChaCha8Rng::seed_from_u64(derive_seed(seed, &[tag("sis")]));
    let mut sim = SisSimulator::new(g, cfg.clone());

    // Uninformative prior, anchored by the sweep-0 observation.
    let mut state = FilterState::new(vec![0.5; dim], Mat::from_diag(&vec![0.25; dim]));

    let mut records = Vec::with_capacity(sweeps + 1);
    let mut sq_err_filter = 0.0f64;
    let mut n_filter = 0usize;
    let mut sq_err_obs = 0.0f64;
    let mut n_obs = 0usize;
    let mut nis_sum = 0.0f64;
    let mut nis_rows = 0usize;

    for sweep in 0..=sweeps {
        if sweep > 0 {
            for _ in 0..m {
                sim.step(&mut sis_rng);
            }
            let q_sub = q_sub_for(&state.mean);
            for _ in 0..opts.substeps {
                state = predict(&state, &dynamics, &q_sub)?;
            }
        }

        let truth_state = sim.population_state();
        let truth: Vec<f64> = classes.iter().map(|&k| truth_state.get(k)).collect();

        let obs_seed = derive_seed(seed, &[tag("observe"), sweep as u64]);
        let obs = observe(g, sim.states(), plan, &classes, &state.mean, obs_seed)?;
        let nis = if obs.y.is_empty() {
            None
        } else {
            Some(normalized_innovation_squared(&state, &obs.y, &obs.c, &obs.r)?)
        };
        if (opts.updates_enabled || sweep == 0)
            && !obs.y.is_empty() {
                state = update(&state, &obs.y, &obs.c, &obs.r)?;
            }

        let mut observation = vec![None; dim];
        for (row, &k) in obs.observed_classes.iter().enumerate() {
            let idx = classes.iter().position(|&c| c == k).unwrap();
            observation[idx] = Some(obs.y[row]);
        }

        let mean: Vec<f64> = state.mean.iter().map(|v| v.clamp(0.0, 1.0)).collect();
        let std = state.stds();
        if sweep > 0 {
            for i in 0..dim {
                sq_err_filter += (mean[i] - truth[i]).powi(2);
                n_filter += 1;
                if let Some(y) = observation[i] {
                    sq_err_obs += (y - truth[i]).powi(2);
                    n_obs += 1;
                }
            }
            if let Some(v) = nis {
                nis_sum += v;
                nis_rows += obs.y.len();
            }
        }
        records.push(TrackRecord { sweep, truth, observation, mean, std, nis });
    }

    Ok(TrackLog {
        classes,
        records,
        rmse_filter: (sq_err_filter / n_filter.max(1) as f64).sqrt(),
        rmse_observation: (sq_err_obs / n_obs.max(1) as f64).sqrt(),
        mean_nis_per_dim: if nis_rows > 0 { nis_sum / nis_rows as f64 } else { f64::NAN },
    })
}
