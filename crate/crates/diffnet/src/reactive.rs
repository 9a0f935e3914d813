//! Reactive networks: a Markovian graph process whose transition kernel
//! depends on the current population state, co-evolving with the SIS
//! diffusion, plus the constrained-ODE approximation of the collective
//! dynamics (drift averaged under the kernel's stationary distribution,
//! with the stationary condition as an algebraic constraint).

use std::fmt;

use rand::prelude::*;
use rand_chacha::ChaCha8Rng;

use crate::graph::{DegreeStats, Graph};
use crate::linalg::Mat;
use crate::meanfield::{viral_drift, MfdParams};
use crate::population::PopulationState;
use crate::scalar::Scalar;
use crate::sis::{self, Activation, ContagionRule, SisConfig};

#[derive(Debug)]
pub enum ReactiveError {
    InvalidParameter(String),
    /// Assumption: every graph in the state space has the same degree
    /// structure.
    DegreeMismatch { graph_index: usize },
    LabelMismatch { graph_index: usize },
    /// Assumption: the kernel is row-stochastic for every population state.
    KernelNotStochastic { row: usize },
    /// Assumption: the kernel is irreducible with a unique stationary
    /// distribution.
    KernelReducible,
    /// The collective-dynamics result is stated for monophilic contagion.
    RuleNotMonophilic,
    StationarySolverFailed(String),
    Sis(String),
}

impl fmt::Display for ReactiveError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ReactiveError::InvalidParameter(msg) => write!(f, "invalid parameter: {msg}"),
            ReactiveError::DegreeMismatch { graph_index } => write!(
                f,
                "graph {graph_index} violates the shared-degree-distribution assumption"
            ),
            ReactiveError::LabelMismatch { graph_index } => {
                write!(f, "graph {graph_index} carries different labels")
            }
            ReactiveError::KernelNotStochastic { row } => {
                write!(f, "kernel row {row} is not a probability distribution")
            }
            ReactiveError::KernelReducible => write!(
                f,
                "kernel is reducible: the unique-stationary-distribution assumption is violated"
            ),
            ReactiveError::RuleNotMonophilic => {
                write!(f, "reactive dynamics are defined for the monophilic rule")
            }
            ReactiveError::StationarySolverFailed(msg) => {
                write!(f, "stationary distribution solver failed: {msg}")
            }
            ReactiveError::Sis(msg) => write!(f, "sis error: {msg}"),
        }
    }
}

impl std::error::Error for ReactiveError {}

/// Stationary distribution of a row-stochastic matrix by damped power
/// iteration (the damping handles periodic chains); errors on reducible
/// input.
pub fn stationary_distribution<S: Scalar>(p: &Mat<S>, tol: S) -> Result<Vec<S>, ReactiveError> {
    let n = p.rows();
    let uniform = vec![S::one() / S::from_count(n); n];
    stationary_distribution_warm(p, tol, &uniform)
}

/// As [`stationary_distribution`], warm-started from `init`.
pub fn stationary_distribution_warm<S: Scalar>(
    p: &Mat<S>,
    tol: S,
    init: &[S],
) -> Result<Vec<S>, ReactiveError> {
    let n = p.rows();
    if p.cols() != n || n == 0 {
        return Err(ReactiveError::InvalidParameter("kernel must be square".into()));
    }
    validate_stochastic(p)?;
    if !is_irreducible(p) {
        return Err(ReactiveError::KernelReducible);
    }
    let mut pi: Vec<S> = init.to_vec();
    let total: S = pi.iter().copied().sum();
    for v in pi.iter_mut() {
        *v = *v / total;
    }
    let half = S::from_f64_lossy(0.5);
    for _ in 0..200_000 {
        // P' pi, then average with pi (lazy chain, same fixed point).
        let mut next = vec![S::zero(); n];
        for i in 0..n {
            for j in 0..n {
                next[j] = next[j] + p[(i, j)] * pi[i];
            }
        }
        let mut moved = S::zero();
        for i in 0..n {
            let damped = (next[i] + pi[i]) * half;
            moved = moved + (damped - pi[i]).abs();
            pi[i] = damped;
        }
        let total: S = pi.iter().copied().sum();
        for v in pi.iter_mut() {
            *v = *v / total;
        }
        if residual_l1(p, &pi) < tol {
            return Ok(pi);
        }
        let _ = moved;
    }
    Err(ReactiveError::StationarySolverFailed(format!(
        "no convergence to residual {tol} within iteration budget"
    )))
}

/// l1 norm of P'pi - pi.
pub fn residual_l1<S: Scalar>(p: &Mat<S>, pi: &[S]) -> S {
    let n = p.rows();
    (0..n)
        .map(|j| {
            let pushed: S = (0..n).map(|i| p[(i, j)] * pi[i]).sum();
            (pushed - pi[j]).abs()
        })
        .sum()
}

fn validate_stochastic<S: Scalar>(p: &Mat<S>) -> Result<(), ReactiveError> {
    let tol = S::from_f64_lossy(1e-9);
    for i in 0..p.rows() {
        let mut sum = S::zero();
        for j in 0..p.cols() {
            if p[(i, j)] < -tol {
                return Err(ReactiveError::KernelNotStochastic { row: i });
            }
            sum = sum + p[(i, j)];
        }
        if (sum - S::one()).abs() > tol {
            return Err(ReactiveError::KernelNotStochastic { row: i });
        }
    }
    Ok(())
}

/// All states mutually reachable along positive transition probabilities.
fn is_irreducible<S: Scalar>(p: &Mat<S>) -> bool {
    let n = p.rows();
    let reach = |forward: bool| -> Vec<bool> {
        let mut seen = vec![false; n];
        let mut stack = vec![0usize];
        seen[0] = true;
        while let Some(i) = stack.pop() {
            for j in 0..n {
                let w = if forward { p[(i, j)] } else { p[(j, i)] };
                if w > S::zero() && !seen[j] {
                    seen[j] = true;
                    stack.push(j);
                }
            }
        }
        seen
    };
    reach(true).into_iter().all(|s| s) && reach(false).into_iter().all(|s| s)
}

/// Transition kernel: population state -> row-stochastic matrix over the
/// graph state space.
pub type Kernel = Box<dyn Fn(&PopulationState<f64>) -> Mat<f64> + Send + Sync>;

/// Finite graph state space with a state-dependent transition kernel.
///
/// Node ids are shared across the space and every node keeps its degree in
/// every graph (the shared-degree-distribution assumption follows), so the
/// population state census is continuous across switches. Labels must
/// agree at construction; the simulation carries them by node id.
pub struct ReactiveNetwork {
    graphs: Vec<Graph>,
    stats: Vec<DegreeStats<f64>>,
    kernel: Kernel,
}

impl fmt::Debug for ReactiveNetwork {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ReactiveNetwork")
            .field("graphs", &self.graphs.len())
            .field("nodes", &self.graphs.first().map(Graph::node_count))
            .finish()
    }
}

impl ReactiveNetwork {
    pub fn new(graphs: Vec<Graph>, kernel: Kernel) -> Result<ReactiveNetwork, ReactiveError> {
        if graphs.is_empty() {
            return Err(ReactiveError::InvalidParameter("need at least one graph".into()));
        }
        let base_degrees: Vec<usize> =
            (0..graphs[0].node_count()).map(|v| graphs[0].degree(v)).collect();
        for (i, g) in graphs.iter().enumerate().skip(1) {
            if g.node_count() != graphs[0].node_count() {
                return Err(ReactiveError::DegreeMismatch { graph_index: i });
            }
            if (0..g.node_count()).any(|v| g.degree(v) != base_degrees[v]) {
                return Err(ReactiveError::DegreeMismatch { graph_index: i });
            }
            if g.labels() != graphs[0].labels() {
                return Err(ReactiveError::LabelMismatch { graph_index: i });
            }
        }
        let stats = graphs.iter().map(Graph::stats).collect();
        let rn = ReactiveNetwork { graphs, stats, kernel };
        rn.validate_kernel_on_grid()?;
        Ok(rn)
    }

    /// Checks row-stochasticity and irreducibility on a grid of constant
    /// population states.
    fn validate_kernel_on_grid(&self) -> Result<(), ReactiveError> {
        let d_max = self.graphs[0].max_degree();
        for c in [0.0, 0.25, 0.5, 0.75, 1.0] {
            let x = PopulationState::constant(c, d_max);
            let p = (self.kernel)(&x);
            if p.rows() != self.graphs.len() || p.cols() != self.graphs.len() {
                return Err(ReactiveError::InvalidParameter(
                    "kernel shape must match the graph count".into(),
                ));
            }
            validate_stochastic(&p)?;
            if !is_irreducible(&p) {
                return Err(ReactiveError::KernelReducible);
            }
        }
        Ok(())
    }

    pub fn graph_count(&self) -> usize {
        self.graphs.len()
    }

    pub fn graphs(&self) -> &[Graph] {
        &self.graphs
    }

    pub fn stats(&self) -> &[DegreeStats<f64>] {
        &self.stats
    }

    pub fn kernel_matrix(&self, x: &PopulationState<f64>) -> Mat<f64> {
        (self.kernel)(x)
    }
}

/// Logistic interpolation between two fixed row-stochastic matrices:
/// P_x = (1 - s) P_low + s P_high with s = sigmoid(steepness * rho(x)),
/// rho(x) = sum_k P(k) x(k) under the shared degree distribution.
pub fn logistic_interpolation_kernel(
    p_low: Mat<f64>,
    p_high: Mat<f64>,
    steepness: f64,
    degree_dist: Vec<f64>,
) -> Kernel {
    Box::new(move |x: &PopulationState<f64>| {
        let width = degree_dist.len().min(x.fractions().len());
        let rho: f64 = (1..width).map(|k| degree_dist[k] * x.get(k)).sum();
        let s = 1.0 / (1.0 + (-steepness * rho).exp());
        p_low.scale(1.0 - s).add(&p_high.scale(s))
    })
}

/// Kernel that ignores the population state.
pub fn constant_kernel(p: Mat<f64>) -> Kernel {
    Box::new(move |_| p.clone())
}

/// Joint trajectory sample: which graph was active and the population
/// census at the record point.
#[derive(Debug, Clone)]
pub struct JointSample {
    pub tick: usize,
    pub graph_index: usize,
    pub state: PopulationState<f64>,
}

#[derive(Debug, Clone)]
pub struct JointRun {
    pub samples: Vec<JointSample>,
    /// Ticks spent in each graph.
    pub graph_visits: Vec<u64>,
}

/// Co-evolves the graph chain and the SIS diffusion: each tick first draws
/// G_{n+1} ~ P_{x_n}(. | G_n), then performs one SIS step on the new
/// current graph. Node states persist across switches by node id. With a
/// single graph no kernel randomness is consumed, so the run is exactly
/// the static simulation under the same seed.
pub fn simulate_joint(
    rn: &ReactiveNetwork,
    cfg: &SisConfig,
    g_init: usize,
    ticks: usize,
    record_every: usize,
    seed: u64,
) -> Result<JointRun, ReactiveError> {
    if cfg.rule != ContagionRule::Monophilic {
        return Err(ReactiveError::RuleNotMonophilic);
    }
    cfg.validate().map_err(|e| ReactiveError::Sis(e.to_string()))?;
    if g_init >= rn.graph_count() {
        return Err(ReactiveError::InvalidParameter(format!(
            "g_init {g_init} out of range for {} graphs",
            rn.graph_count()
        )));
    }
    if record_every == 0 {
        return Err(ReactiveError::InvalidParameter("record_every must be >= 1".into()));
    }
    let n_graphs = rn.graph_count();
    let d_max = rn.graphs[0].max_degree();
    let reference_counts = rn.graphs[0].degree_counts();

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut current = g_init;
    let mut states = rn.graphs[g_init].labels().to_vec();

    // Per-class infected census; invariant across switches since node
    // degrees are shared.
    let class_counts = reference_counts.clone();
    let mut infected = vec![0u64; d_max + 1];
    for v in 0..states.len() {
        if states[v] == 1 {
            infected[rn.graphs[current].degree(v)] += 1;
        }
    }
    let census = |infected: &[u64]| -> PopulationState<f64> {
        let x = class_counts
            .iter()
            .zip(infected)
            .map(|(&m, &i)| if m == 0 { 0.0 } else { i as f64 / m as f64 })
            .collect();
        PopulationState::from_fractions(x)
    };

    let mut samples = Vec::with_capacity(ticks / record_every + 1);
    let mut graph_visits = vec![0u64; n_graphs];
    samples.push(JointSample { tick: 0, graph_index: current, state: census(&infected) });

    for tick in 1..=ticks {
        if n_graphs > 1 {
            let x = census(&infected);
            let p = rn.kernel_matrix(&x);
            let u: f64 = rng.gen();
            let mut acc = 0.0;
            let mut next = n_graphs - 1;
            for j in 0..n_graphs {
                acc += p[(current, j)];
                if u < acc {
                    next = j;
                    break;
                }
            }
            current = next;
            debug_assert_eq!(rn.graphs[current].degree_counts(), reference_counts);
        }
        let event = sis::sis_step(&mut states, &rn.graphs[current], cfg, d_max, &mut rng);
        if event.state_before != event.state_after {
            let k = rn.graphs[current].degree(event.node);
            if event.state_after == 1 {
                infected[k] += 1;
            } else {
                infected[k] -= 1;
            }
        }
        graph_visits[current] += 1;
        if tick % record_every == 0 {
            samples.push(JointSample { tick, graph_index: current, state: census(&infected) });
        }
    }
    Ok(JointRun { samples, graph_visits })
}

/// One emitted point of the constrained-ODE trajectory.
#[derive(Debug, Clone)]
pub struct ConstrainedOdeState {
    pub x: PopulationState<f64>,
    /// Stationary distribution of the kernel at x.
    pub pi: Vec<f64>,
    /// l1 residual of the algebraic constraint P_x' pi = pi.
    pub residual: f64,
}

/// Residual bound guaranteed at every emitted trajectory point.
pub const ODE_CONSTRAINT_TOL: f64 = 1e-10;

/// Deterministic approximation of the collective dynamics:
/// x <- x + (1/M) E_{G ~ pi_x}[H(x, G)] with
/// H_k(x, G) = (1 - x(k)) nu k theta_Z_G / D - delta x(k), and pi_x
/// re-solved (warm-started) every tick. Emits one state per sweep
/// (sweeps + 1 including x0).
pub fn constrained_ode_trajectory(
    rn: &ReactiveNetwork,
    params: &MfdParams<f64>,
    x0: &PopulationState<f64>,
    sweeps: usize,
) -> Result<Vec<ConstrainedOdeState>, ReactiveError> {
    if params.rule != ContagionRule::Monophilic {
        return Err(ReactiveError::RuleNotMonophilic);
    }
    if params.activation != Activation::UniformX {
        return Err(ReactiveError::InvalidParameter(
            "collective dynamics are stated for uniform activation".into(),
        ));
    }
    if params.m == 0 {
        return Err(ReactiveError::InvalidParameter("m must be >= 1".into()));
    }
    let d_max = rn.graphs[0].max_degree();
    let width = d_max + 1;
    let m = params.m as f64;
    let solver_tol = 1e-13;

    let mut x: Vec<f64> = x0.fractions().to_vec();
    x.resize(width, 0.0);
    let mut pi = vec![1.0 / rn.graph_count() as f64; rn.graph_count()];

    let emit = |x: &[f64], pi: &[f64], p: &Mat<f64>| ConstrainedOdeState {
        x: PopulationState::from_fractions_unchecked(x.to_vec()),
        pi: pi.to_vec(),
        residual: residual_l1(p, pi),
    };

    let p0 = rn.kernel_matrix(&PopulationState::from_fractions_unchecked(x.clone()));
    pi = stationary_distribution_warm(&p0, solver_tol, &pi)?;
    let mut out = Vec::with_capacity(sweeps + 1);
    out.push(emit(&x, &pi, &p0));

    for _sweep in 0..sweeps {
        for _ in 0..params.m {
            let state = PopulationState::from_fractions_unchecked(x.clone());
            let p = rn.kernel_matrix(&state);
            pi = stationary_distribution_warm(&p, solver_tol, &pi)?;
            let mut expected = vec![0.0f64; width];
            for (i, stats) in rn.stats.iter().enumerate() {
                let drift = viral_drift(&x, &stats.z_weights, params.nu, params.delta, d_max);
                for k in 0..width {
                    expected[k] += pi[i] * drift[k];
                }
            }
            for k in 0..width {
                x[k] += expected[k] / m;
            }
        }
        let state = PopulationState::from_fractions_unchecked(x.clone());
        let p = rn.kernel_matrix(&state);
        pi = stationary_distribution_warm(&p, solver_tol, &pi)?;
        let point = emit(&x, &pi, &p);
        debug_assert!(point.residual < ODE_CONSTRAINT_TOL);
        out.push(point);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{assign_labels, generate_configuration_model, rewire_to_assortativity};
    use crate::meanfield;

    fn two_by_two(p: [[f64; 2]; 2]) -> Mat<f64> {
        Mat::from_rows(&[p[0].to_vec(), p[1].to_vec()])
    }

    #[test]
    fn stationary_of_doubly_stochastic_is_uniform() {
        let p = two_by_two([[0.7, 0.3], [0.3, 0.7]]);
        let pi = stationary_distribution(&p, 1e-12).unwrap();
        assert!((pi[0] - 0.5).abs() < 1e-10);
        assert!((pi[1] - 0.5).abs() < 1e-10);
    }

    #[test]
    fn stationary_of_two_state_chain_closed_form() {
        let (a, b) = (0.15, 0.4);
        let p = two_by_two([[1.0 - a, a], [b, 1.0 - b]]);
        let pi = stationary_distribution(&p, 1e-13).unwrap();
        assert!((pi[0] - b / (a + b)).abs() < 1e-10);
        assert!((pi[1] - a / (a + b)).abs() < 1e-10);
        assert!(residual_l1(&p, &pi) < 1e-13);
    }

    #[test]
    fn periodic_chain_still_converges() {
        let p = two_by_two([[0.0, 1.0], [1.0, 0.0]]);
        let pi = stationary_distribution(&p, 1e-12).unwrap();
        assert!((pi[0] - 0.5).abs() < 1e-10);
    }

    #[test]
    fn reducible_kernel_is_rejected() {
        let p: Mat<f64> = Mat::identity(2);
        assert!(matches!(
            stationary_distribution(&p, 1e-10),
            Err(ReactiveError::KernelReducible)
        ));
        let p = two_by_two([[1.0, 0.0], [0.5, 0.5]]);
        assert!(matches!(
            stationary_distribution(&p, 1e-10),
            Err(ReactiveError::KernelReducible)
        ));
    }

    #[test]
    fn tight_tolerance_contract() {
        let p = two_by_two([[0.99, 0.01], [0.02, 0.98]]);
        let pi = stationary_distribution(&p, 1e-12).unwrap();
        assert!(residual_l1(&p, &pi) < 1e-12);
    }

    fn rewired_pair(seed: u64) -> (Graph, Graph) {
        let base = generate_configuration_model(600, 2.4, 1, 20, seed).unwrap();
        let base = assign_labels(&base, 0.2, 0.0, 0.5, seed + 1).unwrap().graph;
        let low = rewire_to_assortativity(&base, -0.25, 0.05, 2_000_000, seed + 2).unwrap();
        let high = rewire_to_assortativity(&base, 0.25, 0.05, 2_000_000, seed + 3).unwrap();
        (low.graph, high.graph)
    }

    #[test]
    fn construction_validates_degree_structure() {
        let (g_low, g_high) = rewired_pair(90);
        let kernel = constant_kernel(two_by_two([[0.5, 0.5], [0.5, 0.5]]));
        assert!(ReactiveNetwork::new(vec![g_low.clone(), g_high.clone()], kernel).is_ok());

        let other = generate_configuration_model(600, 2.4, 1, 20, 999).unwrap();
        let other = other.with_labels(g_low.labels().to_vec()).unwrap();
        let kernel = constant_kernel(two_by_two([[0.5, 0.5], [0.5, 0.5]]));
        assert!(matches!(
            ReactiveNetwork::new(vec![g_low, other], kernel),
            Err(ReactiveError::DegreeMismatch { .. })
        ));
    }

    #[test]
    fn single_graph_joint_simulation_is_exactly_the_static_run() {
        let g = generate_configuration_model(300, 2.2, 1, 14, 95).unwrap();
        let g = assign_labels(&g, 0.3, 0.0, 0.5, 96).unwrap().graph;
        let mut cfg = SisConfig::new(0.8, 0.2);
        cfg.rule = ContagionRule::Monophilic;
        let rn =
            ReactiveNetwork::new(vec![g.clone()], constant_kernel(Mat::identity(1))).unwrap();
        let ticks = 5 * g.node_count();
        let joint = simulate_joint(&rn, &cfg, 0, ticks, g.node_count(), 1234).unwrap();
        let static_run = sis::simulate_sweeps(&g, &cfg, 5, 1234).unwrap();
        assert_eq!(joint.samples.len(), static_run.len());
        for (js, ss) in joint.samples.iter().zip(&static_run) {
            assert_eq!(js.graph_index, 0);
            assert_eq!(js.state.fractions(), ss.fractions());
        }
    }

    #[test]
    fn fixed_symmetric_kernel_gives_even_occupancy() {
        let (g_low, g_high) = rewired_pair(100);
        let kernel = constant_kernel(two_by_two([[0.5, 0.5], [0.5, 0.5]]));
        let rn = ReactiveNetwork::new(vec![g_low, g_high], kernel).unwrap();
        let mut cfg = SisConfig::new(0.6, 0.3);
        cfg.rule = ContagionRule::Monophilic;
        let run = simulate_joint(&rn, &cfg, 0, 100_000, 100_000, 7).unwrap();
        let share = run.graph_visits[0] as f64
            / (run.graph_visits[0] + run.graph_visits[1]) as f64;
        assert!((share - 0.5).abs() <= 0.02, "occupancy share {share}");
    }

    #[test]
    fn switching_to_low_spread_graph_suppresses_infection() {
        // Graph 0 is disassortative (high E[d(Z)], easier spreading);
        // graph 1 is assortative (low E[d(Z)]). The kernel jumps to graph 1
        // once infection rises, so the long-run fraction must fall below
        // the static graph-0 run.
        let (g_low, g_high) = rewired_pair(110);
        assert!(
            g_low.stats().expected_degree_z() > g_high.stats().expected_degree_z(),
            "rewiring direction assumption"
        );
        let mut cfg = SisConfig::new(0.9, 0.12);
        cfg.rule = ContagionRule::Monophilic;

        let stats_low = g_low.stats();
        let rho = |x: &PopulationState<f64>| -> f64 {
            (1..stats_low.width())
                .map(|k| stats_low.degree_dist[k] * x.get(k))
                .sum()
        };

        let sweeps = 60;
        let tail = 20;
        let mut reactive_mean = Vec::new();
        let mut static_mean = Vec::new();
        for seed in 0..8 {
            let kernel = Box::new({
                let degree_dist = stats_low.degree_dist.clone();
                move |x: &PopulationState<f64>| {
                    let width = degree_dist.len().min(x.fractions().len());
                    let r: f64 = (1..width).map(|k| degree_dist[k] * x.get(k)).sum();
                    if r > 0.1 {
                        Mat::from_rows(&[vec![0.02, 0.98], vec![0.02, 0.98]])
                    } else {
                        Mat::from_rows(&[vec![0.98, 0.02], vec![0.98, 0.02]])
                    }
                }
            });
            let rn = ReactiveNetwork::new(vec![g_low.clone(), g_high.clone()], kernel).unwrap();
            let m = rn.graphs()[0].node_count();
            let run = simulate_joint(&rn, &cfg, 0, sweeps * m, m, 3000 + seed).unwrap();
            reactive_mean.push(
                run.samples[sweeps - tail..].iter().map(|s| rho(&s.state)).sum::<f64>()
                    / tail as f64,
            );
            let st = sis::simulate_sweeps(&g_low, &cfg, sweeps, 3000 + seed).unwrap();
            static_mean
                .push(st[sweeps - tail..].iter().map(rho).sum::<f64>() / tail as f64);
        }
        let mean = |v: &[f64]| v.iter().sum::<f64>() / v.len() as f64;
        assert!(
            mean(&reactive_mean) < mean(&static_mean),
            "reactive {} vs static {}",
            mean(&reactive_mean),
            mean(&static_mean)
        );
    }

    #[test]
    fn single_graph_ode_is_bitwise_the_mean_field_trajectory() {
        let g = generate_configuration_model(400, 2.3, 1, 16, 120).unwrap();
        let g = assign_labels(&g, 0.25, 0.0, 0.5, 121).unwrap().graph;
        let rn =
            ReactiveNetwork::new(vec![g.clone()], constant_kernel(Mat::identity(1))).unwrap();
        let params = MfdParams {
            nu: 0.85,
            delta: 0.25,
            m: g.node_count(),
            activation: Activation::UniformX,
            rule: ContagionRule::Monophilic,
        };
        let x0 = PopulationState::from_graph(&g);
        let ode = constrained_ode_trajectory(&rn, &params, &x0, 6).unwrap();
        let mfd = meanfield::mfd_trajectory(&g.stats(), &params, &x0, 6).unwrap();
        for (o, m) in ode.iter().zip(&mfd) {
            assert_eq!(o.x.fractions(), m.fractions());
            assert_eq!(o.pi, vec![1.0]);
        }
    }

    #[test]
    fn identical_graphs_make_the_ode_kernel_independent() {
        let g = generate_configuration_model(300, 2.3, 1, 14, 130).unwrap();
        let g = assign_labels(&g, 0.3, 0.0, 0.5, 131).unwrap().graph;
        let params = MfdParams {
            nu: 0.8,
            delta: 0.3,
            m: g.node_count(),
            activation: Activation::UniformX,
            rule: ContagionRule::Monophilic,
        };
        let x0 = PopulationState::from_graph(&g);
        let kernels: Vec<Kernel> = vec![
            constant_kernel(two_by_two([[0.9, 0.1], [0.4, 0.6]])),
            constant_kernel(two_by_two([[0.1, 0.9], [0.9, 0.1]])),
        ];
        let mut results = Vec::new();
        for kernel in kernels {
            let rn = ReactiveNetwork::new(vec![g.clone(), g.clone()], kernel).unwrap();
            results.push(constrained_ode_trajectory(&rn, &params, &x0, 5).unwrap());
        }
        for (a, b) in results[0].iter().zip(&results[1]) {
            assert!(a.x.max_abs_diff(&b.x) <= 1e-12);
        }
    }

    #[test]
    fn ode_constraint_residual_is_tight_at_every_point() {
        let (g_low, g_high) = rewired_pair(140);
        let stats = g_low.stats();
        let kernel = logistic_interpolation_kernel(
            two_by_two([[0.8, 0.2], [0.3, 0.7]]),
            two_by_two([[0.2, 0.8], [0.1, 0.9]]),
            4.0,
            stats.degree_dist.clone(),
        );
        let rn = ReactiveNetwork::new(vec![g_low.clone(), g_high], kernel).unwrap();
        let params = MfdParams {
            nu: 0.9,
            delta: 0.15,
            m: g_low.node_count(),
            activation: Activation::UniformX,
            rule: ContagionRule::Monophilic,
        };
        let x0 = PopulationState::from_graph(&g_low);
        let traj = constrained_ode_trajectory(&rn, &params, &x0, 10).unwrap();
        for point in &traj {
            assert!(point.residual < ODE_CONSTRAINT_TOL, "residual {}", point.residual);
            let total: f64 = point.pi.iter().sum();
            assert!((total - 1.0).abs() < 1e-12);
            assert!(point.pi.iter().all(|&p| p >= 0.0));
        }
    }

    #[test]
    fn non_monophilic_rule_is_rejected() {
        let g = generate_configuration_model(100, 2.3, 1, 9, 150).unwrap();
        let rn =
            ReactiveNetwork::new(vec![g.clone()], constant_kernel(Mat::identity(1))).unwrap();
        let cfg = SisConfig::new(0.5, 0.5);
        assert!(matches!(
            simulate_joint(&rn, &cfg, 0, 10, 1, 1),
            Err(ReactiveError::RuleNotMonophilic)
        ));
        let params = MfdParams {
            nu: 0.5,
            delta: 0.5,
            m: 100,
            activation: Activation::UniformX,
            rule: ContagionRule::NonMonophilic,
        };
        let x0 = PopulationState::zeros(9);
        assert!(matches!(
            constrained_ode_trajectory(&rn, &params, &x0, 1),
            Err(ReactiveError::RuleNotMonophilic)
        ));
    }
}
