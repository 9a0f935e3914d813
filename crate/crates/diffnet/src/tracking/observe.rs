//! Observation generation for the tracker: per-degree-class uniform
//! sampling, or a single RDS chain restricted per class.

use rand::prelude::*;
use rand_chacha::ChaCha8Rng;

use crate::graph::Graph;
use crate::linalg::Mat;
use crate::tracking::filter::TrackingError;

/// Floor for the plug-in binomial variance in R.
pub const R_FLOOR: f64 = 1e-4;

#[derive(Debug, Clone, PartialEq)]
pub enum ObservationMode {
    /// nu(k) independent uniform draws (with replacement) per class.
    Uniform,
    /// One respondent-driven chain with W = 1; per-class estimates from the
    /// class-restricted reweighted visits.
    Rds { chain_length: usize },
}

/// Which classes are polled and how many samples each gets.
#[derive(Debug, Clone)]
pub struct ObservationPlan {
    pub mode: ObservationMode,
    /// (degree class, nu(k)); every entry needs nu(k) >= 1 and M(k) >= 1.
    pub counts: Vec<(usize, usize)>,
}

impl ObservationPlan {
    /// Uniform mode covering every occupied degree class with the same
    /// per-class budget.
    pub fn uniform_all(g: &Graph, samples_per_class: usize) -> ObservationPlan {
        let counts = g
            .degree_counts()
            .iter()
            .enumerate()
            .skip(1)
            .filter(|(_, &m)| m > 0)
            .map(|(k, _)| (k, samples_per_class))
            .collect();
        ObservationPlan { mode: ObservationMode::Uniform, counts }
    }

    pub fn validate(&self, g: &Graph) -> Result<(), TrackingError> {
        let class_counts = g.degree_counts();
        for &(k, nu) in &self.counts {
            if nu == 0 {
                return Err(TrackingError::InvalidParameter(format!(
                    "class {k}: nu(k) must be >= 1"
                )));
            }
            if k == 0 || k >= class_counts.len() || class_counts[k] == 0 {
                return Err(TrackingError::InvalidParameter(format!(
                    "class {k} has no nodes"
                )));
            }
        }
        if let ObservationMode::Rds { chain_length } = self.mode {
            if chain_length == 0 {
                return Err(TrackingError::InvalidParameter(
                    "rds chain length must be >= 1".into(),
                ));
            }
        }
        Ok(())
    }
}

/// One vector observation y = C x + v.
#[derive(Debug, Clone)]
pub struct Observation {
    pub y: Vec<f64>,
    pub c: Mat<f64>,
    pub r: Mat<f64>,
    /// Degree class of each observation row.
    pub observed_classes: Vec<usize>,
}

/// Samples the current node states according to the plan. `states` is the
/// live per-node infection vector (the graph only fixes the topology);
/// `state_classes` fixes the filter's coordinate order; `prior_mean` (same
/// indexing) feeds the plug-in binomial variance
/// R(k,k) = max(p(1-p), 1e-4)/nu(k).
pub fn observe(
    g: &Graph,
    states: &[u8],
    plan: &ObservationPlan,
    state_classes: &[usize],
    prior_mean: &[f64],
    seed: u64,
) -> Result<Observation, TrackingError> {
    plan.validate(g)?;
    if states.len() != g.node_count() {
        return Err(TrackingError::DimensionMismatch(
            "states length vs node count".into(),
        ));
    }
    if state_classes.len() != prior_mean.len() {
        return Err(TrackingError::DimensionMismatch(
            "prior mean length vs state classes".into(),
        ));
    }
    let state_index = |k: usize| -> Result<usize, TrackingError> {
        state_classes.iter().position(|&c| c == k).ok_or_else(|| {
            TrackingError::InvalidParameter(format!("class {k} is not tracked by the filter"))
        })
    };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    // (class, sampled fraction, effective sample count)
    let mut raw: Vec<(usize, f64, usize)> = Vec::new();
    match plan.mode {
        ObservationMode::Uniform => {
            let mut nodes_by_class: Vec<Vec<u32>> = vec![Vec::new(); g.max_degree() + 1];
            for v in 0..g.node_count() {
                nodes_by_class[g.degree(v)].push(v as u32);
            }
            for &(k, nu) in &plan.counts {
                let pool = &nodes_by_class[k];
                let mut infected = 0usize;
                for _ in 0..nu {
                    let v = pool[rng.gen_range(0..pool.len())] as usize;
                    infected += states[v] as usize;
                }
                raw.push((k, infected as f64 / nu as f64, nu));
            }
        }
        ObservationMode::Rds { chain_length } => {
            // W = 1 chain: next node uniform among neighbors, pi(i) ~ d(i).
            // Within one degree class pi is constant, so the class-restricted
            // reweighted estimate is the plain average over class visits.
            // Chain samples are correlated; the binomial R below understates
            // the true noise and leans on the variance floor.
            let mut node = rng.gen_range(0..g.node_count());
            let width = g.max_degree() + 1;
            let mut num = vec![0.0f64; width];
            let mut den = vec![0.0f64; width];
            let mut visits = vec![0usize; width];
            for step in 0..chain_length {
                if step > 0 {
                    let nbrs = g.neighbors(node);
                    node = nbrs[rng.gen_range(0..nbrs.len())] as usize;
                }
                let k = g.degree(node);
                let inv_pi = 1.0 / k as f64;
                num[k] += states[node] as f64 * inv_pi;
                den[k] += inv_pi;
                visits[k] += 1;
            }
            for &(k, _) in &plan.counts {
                if visits[k] > 0 {
                    raw.push((k, num[k] / den[k], visits[k]));
                }
            }
        }
    }

    let obs_dim = raw.len();
    let state_dim = state_classes.len();
    let mut y = Vec::with_capacity(obs_dim);
    let mut c = Mat::zeros(obs_dim, state_dim);
    let mut r = Mat::zeros(obs_dim, obs_dim);
    let mut observed_classes = Vec::with_capacity(obs_dim);
    for (row, &(k, fraction, samples)) in raw.iter().enumerate() {
        let idx = state_index(k)?;
        y.push(fraction);
        c[(row, idx)] = 1.0;
        let p = prior_mean[idx].clamp(0.0, 1.0);
        r[(row, row)] = (p * (1.0 - p)).max(R_FLOOR) / samples as f64;
        observed_classes.push(k);
    }
    Ok(Observation { y, c, r, observed_classes })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::testutil::{circulant4, star};
    use crate::graph::{assign_labels, generate_configuration_model};

    #[test]
    fn fully_infected_class_reads_one() {
        let g = star(4).with_labels(vec![0, 1, 1, 1, 1]).unwrap();
        let plan = ObservationPlan::uniform_all(&g, 7);
        let obs = observe(&g, g.labels(), &plan, &[1, 4], &[0.5, 0.5], 1).unwrap();
        let leaf_row = obs.observed_classes.iter().position(|&k| k == 1).unwrap();
        assert_eq!(obs.y[leaf_row], 1.0);
    }

    #[test]
    fn large_samples_converge_to_class_fraction() {
        let g = generate_configuration_model(800, 2.2, 1, 20, 71).unwrap();
        let g = assign_labels(&g, 0.3, 0.0, 0.5, 72).unwrap().graph;
        let truth = crate::population::PopulationState::<f64>::from_graph(&g);
        let classes: Vec<usize> = truth.support().unwrap();
        let plan = ObservationPlan {
            mode: ObservationMode::Uniform,
            counts: classes.iter().map(|&k| (k, 200_000)).collect(),
        };
        let prior = vec![0.5; classes.len()];
        let obs = observe(&g, g.labels(), &plan, &classes, &prior, 73).unwrap();
        for (row, &k) in obs.observed_classes.iter().enumerate() {
            assert!((obs.y[row] - truth.get(k)).abs() <= 0.01);
        }
    }

    #[test]
    fn observation_variance_is_binomial() {
        // Class fraction 0.3, nu = 100: var of y over replications is
        // 0.3*0.7/100 = 0.0021 within 10%.
        let g = circulant4(1000)
            .with_labels((0..1000).map(|v| (v < 300) as u8).collect())
            .unwrap();
        let plan = ObservationPlan { mode: ObservationMode::Uniform, counts: vec![(4, 100)] };
        let reps = 10_000;
        let mut values = Vec::with_capacity(reps);
        for s in 0..reps {
            let obs = observe(&g, g.labels(), &plan, &[4], &[0.3], s as u64).unwrap();
            values.push(obs.y[0]);
        }
        let mean = values.iter().sum::<f64>() / reps as f64;
        let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / reps as f64;
        assert!((var - 0.0021).abs() <= 0.1 * 0.0021, "var {var}");
    }

    #[test]
    fn r_uses_prior_plugin_with_floor() {
        let g = star(4).with_labels(vec![1, 0, 0, 0, 0]).unwrap();
        let plan = ObservationPlan { mode: ObservationMode::Uniform, counts: vec![(1, 50)] };
        let obs = observe(&g, g.labels(), &plan, &[1, 4], &[0.2, 0.9], 2).unwrap();
        assert!((obs.r[(0, 0)] - 0.2 * 0.8 / 50.0).abs() < 1e-15);
        // Degenerate prior hits the floor.
        let obs = observe(&g, g.labels(), &plan, &[1, 4], &[0.0, 0.9], 2).unwrap();
        assert!((obs.r[(0, 0)] - R_FLOOR / 50.0).abs() < 1e-18);
    }

    #[test]
    fn rds_mode_estimates_class_fractions() {
        let g = circulant4(500)
            .with_labels((0..500).map(|v| (v % 5 == 0) as u8).collect())
            .unwrap();
        let plan = ObservationPlan {
            mode: ObservationMode::Rds { chain_length: 200_000 },
            counts: vec![(4, 1)],
        };
        let obs = observe(&g, g.labels(), &plan, &[4], &[0.5], 3).unwrap();
        assert!((obs.y[0] - 0.2).abs() <= 0.02, "rds estimate {}", obs.y[0]);
    }

    #[test]
    fn plan_validation_errors() {
        let g = star(4);
        let bad = ObservationPlan { mode: ObservationMode::Uniform, counts: vec![(3, 10)] };
        assert!(observe(&g, g.labels(), &bad, &[1, 4], &[0.5, 0.5], 0).is_err());
        let bad = ObservationPlan { mode: ObservationMode::Uniform, counts: vec![(1, 0)] };
        assert!(observe(&g, g.labels(), &bad, &[1, 4], &[0.5, 0.5], 0).is_err());
    }
}
