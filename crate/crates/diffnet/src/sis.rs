//! Exact stochastic simulation of the discrete-time SIS model.
//!
//! One tick: an activation sampler draws a node m; if m is infected it
//! recovers with probability delta, otherwise it draws d(m) observation
//! targets (its graph neighbors, or d(m) uniform nodes in unbiased-degree
//! mode) and becomes infected with probability nu * a / D, where a counts
//! infected targets (non-monophilic) or infected random friends of targets
//! (monophilic).

use std::fmt;
use std::io::Write;

use rand::prelude::*;
use rand_chacha::ChaCha8Rng;

use crate::graph::Graph;
use crate::population::PopulationState;
use crate::sampling;

/// Step-1 activation sampler.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Activation {
    /// Uniform node X.
    UniformX,
    /// Random friend Y (degree-proportional).
    RandomFriendY,
    /// Random friend Z of a random node.
    FriendOfNodeZ,
}

impl Activation {
    pub fn name(self) -> &'static str {
        match self {
            Activation::UniformX => "uniform-x",
            Activation::RandomFriendY => "random-friend-y",
            Activation::FriendOfNodeZ => "friend-of-node-z",
        }
    }
}

/// Step-2 adoption rule.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ContagionRule {
    /// Observe the targets themselves.
    NonMonophilic,
    /// Observe a random friend of each target.
    Monophilic,
}

impl ContagionRule {
    pub fn name(self) -> &'static str {
        match self {
            ContagionRule::NonMonophilic => "non-monophilic",
            ContagionRule::Monophilic => "monophilic",
        }
    }
}

/// Where the d(m) observation targets come from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NeighborMode {
    /// The actual graph neighbors of m.
    Graph,
    /// d(m) uniform nodes drawn with replacement.
    UnbiasedDegree,
}

impl NeighborMode {
    pub fn name(self) -> &'static str {
        match self {
            NeighborMode::Graph => "graph",
            NeighborMode::UnbiasedDegree => "unbiased-degree",
        }
    }
}

#[derive(Debug, Clone)]
pub struct SisConfig {
    /// Infection scale, in [0, 1].
    pub nu: f64,
    /// Recovery probability, in (0, 1].
    pub delta: f64,
    pub activation: Activation,
    pub rule: ContagionRule,
    pub neighbor_mode: NeighborMode,
    /// In unbiased-degree mode, whether m may draw itself as a target
    /// (probability 1/M per draw).
    pub allow_self_observation: bool,
}

impl SisConfig {
    pub fn new(nu: f64, delta: f64) -> SisConfig {
        SisConfig {
            nu,
            delta,
            activation: Activation::UniformX,
            rule: ContagionRule::NonMonophilic,
            neighbor_mode: NeighborMode::UnbiasedDegree,
            allow_self_observation: true,
        }
    }

    pub fn validate(&self) -> Result<(), SisError> {
        if !(0.0..=1.0).contains(&self.nu) {
            return Err(SisError::InvalidParameter("nu must be in [0, 1]".into()));
        }
        if !(self.delta > 0.0 && self.delta <= 1.0) {
            return Err(SisError::InvalidParameter("delta must be in (0, 1]".into()));
        }
        Ok(())
    }

    /// Effective spreading rate lambda = nu/delta.
    pub fn lambda(&self) -> f64 {
        self.nu / self.delta
    }
}

#[derive(Debug)]
pub enum SisError {
    InvalidParameter(String),
}

impl fmt::Display for SisError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SisError::InvalidParameter(msg) => write!(f, "invalid parameter: {msg}"),
        }
    }
}

impl std::error::Error for SisError {}

/// What a single tick did.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct StepEvent {
    /// The activated node m.
    pub node: usize,
    pub state_before: u8,
    pub state_after: u8,
}

impl StepEvent {
    pub fn changed(&self) -> bool {
        self.state_before != self.state_after
    }
}

/// Census of the current labels, per degree class.
pub fn population_state(g: &Graph) -> PopulationState<f64> {
    PopulationState::from_graph(g)
}

/// Advances one tick, mutating `states` in place. `d_max` is the graph's
/// largest degree D (precomputed by the caller).
pub fn sis_step<R: Rng>(
    states: &mut [u8],
    g: &Graph,
    cfg: &SisConfig,
    d_max: usize,
    rng: &mut R,
) -> StepEvent {
    let m = match cfg.activation {
        Activation::UniformX => sampling::sample_uniform_node(g, rng),
        Activation::RandomFriendY => sampling::sample_random_friend(g, rng),
        Activation::FriendOfNodeZ => sampling::sample_friend_of_random_node(g, rng),
    };
    let before = states[m];
    let after = if before == 1 {
        if rng.gen::<f64>() < cfg.delta {
            0
        } else {
            1
        }
    } else {
        let infected_observed = count_infected_observations(states, g, cfg, m, rng);
        debug_assert!(infected_observed <= d_max);
        let p = cfg.nu * infected_observed as f64 / d_max as f64;
        if rng.gen::<f64>() < p {
            1
        } else {
            0
        }
    };
    states[m] = after;
    StepEvent { node: m, state_before: before, state_after: after }
}

fn count_infected_observations<R: Rng>(
    states: &[u8],
    g: &Graph,
    cfg: &SisConfig,
    m: usize,
    rng: &mut R,
) -> usize {
    let n = g.node_count();
    let d_m = g.degree(m);
    let mut count = 0usize;
    for i in 0..d_m {
        let target = match cfg.neighbor_mode {
            NeighborMode::Graph => g.neighbors(m)[i] as usize,
            NeighborMode::UnbiasedDegree => loop {
                let t = rng.gen_range(0..n);
                if cfg.allow_self_observation || t != m {
                    break t;
                }
            },
        };
        let observed = match cfg.rule {
            ContagionRule::NonMonophilic => target,
            ContagionRule::Monophilic => {
                let nbrs = g.neighbors(target);
                nbrs[rng.gen_range(0..nbrs.len())] as usize
            }
        };
        count += states[observed] as usize;
    }
    count
}

/// Runs `ticks` steps from the graph's labels and records the population
/// state census after every tick (ticks + 1 states in total).
pub fn simulate(
    g: &Graph,
    cfg: &SisConfig,
    ticks: usize,
    seed: u64,
) -> Result<Vec<PopulationState<f64>>, SisError> {
    simulate_recorded(g, cfg, ticks, 1, seed)
}

/// Runs `sweeps * M` ticks and records the census every M ticks
/// (sweeps + 1 states).
pub fn simulate_sweeps(
    g: &Graph,
    cfg: &SisConfig,
    sweeps: usize,
    seed: u64,
) -> Result<Vec<PopulationState<f64>>, SisError> {
    simulate_recorded(g, cfg, sweeps * g.node_count(), g.node_count(), seed)
}

fn simulate_recorded(
    g: &Graph,
    cfg: &SisConfig,
    ticks: usize,
    record_every: usize,
    seed: u64,
) -> Result<Vec<PopulationState<f64>>, SisError> {
    cfg.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut sim = SisSimulator::new(g, cfg.clone());
    let mut trajectory = Vec::with_capacity(ticks / record_every + 1);
    trajectory.push(sim.population_state());
    for t in 1..=ticks {
        sim.step(&mut rng);
        if t % record_every == 0 {
            trajectory.push(sim.population_state());
        }
    }
    Ok(trajectory)
}

/// Incremental simulator keeping per-class infected counts so the census
/// is O(D) per record instead of O(M).
pub struct SisSimulator<'g> {
    g: &'g Graph,
    cfg: SisConfig,
    d_max: usize,
    states: Vec<u8>,
    class_counts: Vec<u64>,
    infected_per_class: Vec<u64>,
    infected_total: u64,
}

impl<'g> SisSimulator<'g> {
    pub fn new(g: &'g Graph, cfg: SisConfig) -> SisSimulator<'g> {
        let d_max = g.max_degree();
        let states = g.labels().to_vec();
        let class_counts = g.degree_counts();
        let mut infected_per_class = vec![0u64; d_max + 1];
        let mut infected_total = 0u64;
        for v in 0..g.node_count() {
            if states[v] == 1 {
                infected_per_class[g.degree(v)] += 1;
                infected_total += 1;
            }
        }
        SisSimulator { g, cfg, d_max, states, class_counts, infected_per_class, infected_total }
    }

    pub fn step<R: Rng>(&mut self, rng: &mut R) -> StepEvent {
        let event = sis_step(&mut self.states, self.g, &self.cfg, self.d_max, rng);
        if event.changed() {
            let k = self.g.degree(event.node);
            if event.state_after == 1 {
                self.infected_per_class[k] += 1;
                self.infected_total += 1;
            } else {
                self.infected_per_class[k] -= 1;
                self.infected_total -= 1;
            }
        }
        event
    }

    pub fn population_state(&self) -> PopulationState<f64> {
        let x = self
            .class_counts
            .iter()
            .zip(&self.infected_per_class)
            .map(|(&m, &i)| if m == 0 { 0.0 } else { i as f64 / m as f64 })
            .collect();
        PopulationState::from_fractions(x)
    }

    pub fn infected_total(&self) -> u64 {
        self.infected_total
    }

    pub fn states(&self) -> &[u8] {
        &self.states
    }

    pub fn graph(&self) -> &'g Graph {
        self.g
    }
}

/// Writes a trajectory as CSV rows (sweep, k, x_k) after a comment line
/// recording the configuration and seed.
pub fn write_trajectory_csv<W: Write>(
    mut out: W,
    trajectory: &[PopulationState<f64>],
    cfg: &SisConfig,
    seed: u64,
) -> std::io::Result<()> {
    writeln!(
        out,
        "# nu={} delta={} activation={} rule={} neighbor_mode={} allow_self_observation={} seed={}",
        cfg.nu,
        cfg.delta,
        cfg.activation.name(),
        cfg.rule.name(),
        cfg.neighbor_mode.name(),
        cfg.allow_self_observation,
        seed
    )?;
    writeln!(out, "sweep,k,x_k")?;
    for (sweep, state) in trajectory.iter().enumerate() {
        for k in 1..=state.max_degree() {
            writeln!(out, "{},{},{}", sweep, k, state.get(k))?;
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::testutil::star;
    use crate::graph::{assign_labels, generate_configuration_model};

    #[test]
    fn census_star_with_hub_infected() {
        let g = star(4).with_labels(vec![1, 0, 0, 0, 0]).unwrap();
        let x = population_state(&g);
        assert_eq!(x.get(4), 1.0);
        assert_eq!(x.get(1), 0.0);
    }

    #[test]
    fn exact_count_labels_give_exact_fraction() {
        let g = generate_configuration_model(1000, 2.1, 1, 31, 1).unwrap();
        let labeled = assign_labels(&g, 0.5, 0.0, 0.05, 2).unwrap().graph;
        let stats = labeled.stats();
        let x = population_state(&labeled);
        let theta: f64 = (1..=x.max_degree()).map(|k| stats.degree_dist[k] * x.get(k)).sum();
        assert!((theta - 0.5).abs() < 1e-12);
    }

    #[test]
    fn no_infection_stays_susceptible() {
        let g = star(4);
        let cfg = SisConfig::new(1.0, 0.5);
        let mut states = vec![0u8; 5];
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..1000 {
            let e = sis_step(&mut states, &g, &cfg, 4, &mut rng);
            assert_eq!(e.state_after, 0);
        }
    }

    #[test]
    fn saturated_infection_is_certain_for_full_degree() {
        // All nodes infected, nu = 1: a susceptible activated node with
        // d(m) = D is infected with probability exactly 1.
        let g = crate::graph::testutil::circulant4(10);
        let cfg = SisConfig {
            delta: 1e-9,
            neighbor_mode: NeighborMode::Graph,
            ..SisConfig::new(1.0, 0.5)
        };
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for _ in 0..200 {
            let mut states = vec![1u8; 10];
            states[3] = 0;
            loop {
                let e = sis_step(&mut states, &g, &cfg, 4, &mut rng);
                if e.node == 3 {
                    assert_eq!(e.state_after, 1);
                    break;
                }
            }
        }
    }

    #[test]
    fn leaf_adoption_probability_in_star_is_one_quarter() {
        // Hub infected, graph mode, non-monophilic, nu = 1, D = 4: an
        // activated leaf sees a = 1 of its 1 neighbor and adopts w.p. 1/4.
        let g = star(4).with_labels(vec![1, 0, 0, 0, 0]).unwrap();
        let cfg = SisConfig {
            delta: 1e-12,
            neighbor_mode: NeighborMode::Graph,
            ..SisConfig::new(1.0, 0.5)
        };
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let mut leaf_activations = 0u32;
        let mut adoptions = 0u32;
        for _ in 0..50_000 {
            let mut states = g.labels().to_vec();
            let e = sis_step(&mut states, &g, &cfg, 4, &mut rng);
            if e.node != 0 {
                leaf_activations += 1;
                adoptions += e.state_after as u32;
            }
        }
        let p = adoptions as f64 / leaf_activations as f64;
        let se = (0.25 * 0.75 / leaf_activations as f64).sqrt();
        assert!((p - 0.25).abs() <= 3.0 * se + 1e-9, "p = {p}");
    }

    #[test]
    fn pure_recovery_decays_to_zero() {
        let g = generate_configuration_model(200, 2.1, 1, 14, 6).unwrap();
        let labeled = assign_labels(&g, 0.5, 0.0, 0.5, 7).unwrap().graph;
        let cfg = SisConfig::new(0.0, 0.5);
        let trajectory = simulate_sweeps(&labeled, &cfg, 40, 8).unwrap();
        let totals: Vec<f64> = trajectory
            .iter()
            .map(|x| (1..=x.max_degree()).map(|k| x.get(k)).sum::<f64>())
            .collect();
        assert_eq!(*totals.last().unwrap(), 0.0);
        // With nu = 0 the infected count never rises.
        let stats = labeled.stats();
        let counts: Vec<f64> = trajectory
            .iter()
            .map(|x| {
                (1..=x.max_degree())
                    .map(|k| x.get(k) * stats.degree_counts[k] as f64)
                    .sum::<f64>()
            })
            .collect();
        assert!(counts.windows(2).all(|w| w[1] <= w[0] + 1e-9));
    }

    #[test]
    fn forced_recovery_with_delta_one() {
        let g = star(4).with_labels(vec![1, 1, 1, 1, 1]).unwrap();
        let cfg = SisConfig::new(0.0, 1.0);
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let mut sim = SisSimulator::new(&g, cfg);
        let mut last = sim.infected_total();
        while sim.infected_total() > 0 {
            let e = sim.step(&mut rng);
            if e.state_before == 1 {
                assert_eq!(e.state_after, 0);
            }
            assert!(sim.infected_total() <= last);
            last = sim.infected_total();
        }
    }

    #[test]
    fn vanishing_recovery_makes_infection_monotone() {
        let g = generate_configuration_model(300, 2.2, 1, 14, 19).unwrap();
        let labeled = assign_labels(&g, 0.2, 0.0, 0.5, 20).unwrap().graph;
        let cfg = SisConfig { delta: 1e-12, ..SisConfig::new(0.9, 0.5) };
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        let mut sim = SisSimulator::new(&labeled, cfg);
        let mut last = sim.infected_total();
        for _ in 0..20_000 {
            sim.step(&mut rng);
            assert!(sim.infected_total() >= last);
            last = sim.infected_total();
        }
        assert!(last > 0);
    }

    #[test]
    fn self_observation_can_be_disabled() {
        let g = star(3).with_labels(vec![1, 0, 0, 0]).unwrap();
        let cfg = SisConfig { allow_self_observation: false, ..SisConfig::new(1.0, 0.5) };
        let mut rng = ChaCha8Rng::seed_from_u64(22);
        let mut states = g.labels().to_vec();
        for _ in 0..2000 {
            sis_step(&mut states, &g, &cfg, 3, &mut rng);
        }
    }

    #[test]
    fn only_one_node_changes_per_step_and_fractions_stay_valid() {
        let g = generate_configuration_model(150, 2.2, 1, 12, 10).unwrap();
        let labeled = assign_labels(&g, 0.3, 0.0, 0.5, 11).unwrap().graph;
        let cfg = SisConfig {
            rule: ContagionRule::Monophilic,
            ..SisConfig::new(0.8, 0.3)
        };
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        let mut sim = SisSimulator::new(&labeled, cfg);
        let mut prev = sim.states().to_vec();
        for _ in 0..2000 {
            sim.step(&mut rng);
            let diff = sim
                .states()
                .iter()
                .zip(&prev)
                .filter(|(a, b)| a != b)
                .count();
            assert!(diff <= 1);
            prev = sim.states().to_vec();
            let x = sim.population_state();
            assert!((1..=x.max_degree()).all(|k| (0.0..=1.0).contains(&x.get(k))));
        }
    }

    #[test]
    fn activation_frequencies_match_the_samplers() {
        // Chi-square goodness of fit at the 1% level: activation X is
        // uniform, activation Y is degree-proportional.
        let g = generate_configuration_model(50, 2.1, 1, 7, 13).unwrap();
        let n = g.node_count();
        let steps = 1_000_000usize;
        let uniform: Vec<f64> = vec![1.0 / n as f64; n];
        let by_degree: Vec<f64> = (0..n)
            .map(|v| g.degree(v) as f64 / (2.0 * g.edge_count() as f64))
            .collect();

        for (activation, expected) in
            [(Activation::UniformX, uniform), (Activation::RandomFriendY, by_degree)]
        {
            let cfg = SisConfig { activation, ..SisConfig::new(0.5, 0.5) };
            let mut rng = ChaCha8Rng::seed_from_u64(14);
            let mut states = vec![0u8; n];
            let mut hits = vec![0u64; n];
            for _ in 0..steps {
                let e = sis_step(&mut states, &g, &cfg, g.max_degree(), &mut rng);
                hits[e.node] += 1;
            }
            let chi2: f64 = (0..n)
                .map(|v| {
                    let e = expected[v] * steps as f64;
                    let o = hits[v] as f64;
                    (o - e).powi(2) / e
                })
                .sum();
            // 99th percentile of chi-square with 49 dof is about 74.9.
            assert!(chi2 < 74.9, "chi2 = {chi2} for {activation:?}");
        }
    }

    #[test]
    fn supercritical_run_settles_near_mean_field_fixed_point() {
        let g = generate_configuration_model(2000, 2.1, 1, 10, 15).unwrap();
        let labeled = assign_labels(&g, 0.3, 0.0, 0.5, 16).unwrap().graph;
        let stats = labeled.stats();
        let cfg = SisConfig::new(0.9, 0.1);
        let lambda_star = stats.max_degree as f64 / stats.expected_degree_x();
        assert!(cfg.lambda() > lambda_star, "test needs a supercritical rate");

        let params = crate::meanfield::MfdParams {
            nu: cfg.nu,
            delta: cfg.delta,
            m: labeled.node_count(),
            activation: Activation::UniformX,
            rule: ContagionRule::NonMonophilic,
        };
        let rho = crate::meanfield::stationary_fraction(&stats, &params).unwrap();
        assert!(rho > 0.1);

        let trajectory = simulate_sweeps(&labeled, &cfg, 150, 17).unwrap();
        let long_run: f64 = trajectory[100..]
            .iter()
            .map(|x| (1..=x.max_degree()).map(|k| stats.degree_dist[k] * x.get(k)).sum::<f64>())
            .sum::<f64>()
            / (trajectory.len() - 100) as f64;
        assert!(
            (long_run - rho).abs() <= 0.05,
            "long-run fraction {long_run} vs mean-field {rho}"
        );
    }

    #[test]
    fn trajectory_csv_has_header_and_rows() {
        let g = star(3).with_labels(vec![1, 0, 0, 0]).unwrap();
        let cfg = SisConfig::new(0.5, 0.5);
        let trajectory = simulate_sweeps(&g, &cfg, 2, 18).unwrap();
        let mut buf = Vec::new();
        write_trajectory_csv(&mut buf, &trajectory, &cfg, 18).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("# nu=0.5 delta=0.5"));
        assert!(text.contains("sweep,k,x_k"));
    }
}
