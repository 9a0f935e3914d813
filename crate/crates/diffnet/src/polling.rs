//! Polling estimators for the infected fraction under slow diffusion:
//! intent polling, neighborhood expectation polling (NEP) with uniform
//! nodes, NEP with random-walk sampling, NEP with random friends of random
//! nodes, exact bias/variance formulas for the random-walk estimator, and
//! the Monte-Carlo MSE experiment harness.

use std::fmt;
use std::io::Write;

use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::graph::Graph;
use crate::sampling;
use crate::seed::{derive_seed, tag};

#[derive(Debug)]
pub enum PollingError {
    InvalidParameter(String),
    /// Random-walk sampling needs a connected graph for the stationary law.
    NotConnected,
}

impl fmt::Display for PollingError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PollingError::InvalidParameter(msg) => write!(f, "invalid parameter: {msg}"),
            PollingError::NotConnected => write!(f, "graph is not connected"),
        }
    }
}

impl std::error::Error for PollingError {}

/// Which polling estimator produced a result.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Estimator {
    /// Average of b sampled labels.
    Intent,
    /// Average NEP response of b uniform nodes.
    NepUniform,
    /// Average NEP response of b random-walk endpoints.
    NepRandomWalk,
    /// Average NEP response of a random friend of each of b uniform nodes.
    NepFriendOfNode,
}

impl Estimator {
    pub fn name(self) -> &'static str {
        match self {
            Estimator::Intent => "intent",
            Estimator::NepUniform => "nep-uniform",
            Estimator::NepRandomWalk => "nep-random-walk",
            Estimator::NepFriendOfNode => "nep-friend-of-node",
        }
    }

    pub const ALL: [Estimator; 4] = [
        Estimator::Intent,
        Estimator::NepUniform,
        Estimator::NepRandomWalk,
        Estimator::NepFriendOfNode,
    ];
}

/// A single poll outcome.
#[derive(Debug, Clone)]
pub struct PollResult {
    pub estimate: f64,
    pub estimator: Estimator,
    pub budget: usize,
    /// Walk length N; random-walk estimator only.
    pub walk_length: Option<usize>,
    pub seed: u64,
}

/// NEP response of node s: the fraction of its neighbors with label 1.
pub fn nep_response(g: &Graph, s: usize) -> f64 {
    let nbrs = g.neighbors(s);
    let infected = nbrs.iter().filter(|&&u| g.label(u as usize) == 1).count();
    infected as f64 / nbrs.len() as f64
}

fn all_responses(g: &Graph) -> Vec<f64> {
    (0..g.node_count()).map(|v| nep_response(g, v)).collect()
}

/// Census infected fraction (the estimand).
pub fn true_fraction(g: &Graph) -> f64 {
    g.labels().iter().map(|&s| s as f64).sum::<f64>() / g.node_count() as f64
}

/// Intent polling: average of b sampled labels (with replacement).
pub fn intent_poll(g: &Graph, budget: usize, seed: u64) -> Result<PollResult, PollingError> {
    check_budget(budget)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut acc = 0.0;
    for _ in 0..budget {
        acc += g.label(sampling::sample_uniform_node(g, &mut rng)) as f64;
    }
    Ok(PollResult {
        estimate: acc / budget as f64,
        estimator: Estimator::Intent,
        budget,
        walk_length: None,
        seed,
    })
}

/// NEP with b uniformly sampled nodes.
pub fn nep_uniform(g: &Graph, budget: usize, seed: u64) -> Result<PollResult, PollingError> {
    check_budget(budget)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut acc = 0.0;
    for _ in 0..budget {
        acc += nep_response(g, sampling::sample_uniform_node(g, &mut rng));
    }
    Ok(PollResult {
        estimate: acc / budget as f64,
        estimator: Estimator::NepUniform,
        budget,
        walk_length: None,
        seed,
    })
}

/// NEP with b random-walk endpoints: b walks from uniform starts, each run
/// `walk_length` steps. With walk_length = 0 this is exactly [`nep_uniform`]
/// under the same seed.
pub fn nep_random_walk(
    g: &Graph,
    budget: usize,
    walk_length: usize,
    seed: u64,
) -> Result<PollResult, PollingError> {
    check_budget(budget)?;
    if !g.is_connected() {
        return Err(PollingError::NotConnected);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut acc = 0.0;
    for _ in 0..budget {
        let start = sampling::sample_uniform_node(g, &mut rng);
        let end = sampling::random_walk(g, start, walk_length, &mut rng);
        acc += nep_response(g, end);
    }
    Ok(PollResult {
        estimate: acc / budget as f64,
        estimator: Estimator::NepRandomWalk,
        budget,
        walk_length: Some(walk_length),
        seed,
    })
}

/// NEP with a random friend of each of b uniform nodes.
pub fn nep_friend_of_node(
    g: &Graph,
    budget: usize,
    seed: u64,
) -> Result<PollResult, PollingError> {
    check_budget(budget)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut acc = 0.0;
    for _ in 0..budget {
        acc += nep_response(g, sampling::sample_friend_of_random_node(g, &mut rng));
    }
    Ok(PollResult {
        estimate: acc / budget as f64,
        estimator: Estimator::NepFriendOfNode,
        budget,
        walk_length: None,
        seed,
    })
}

fn check_budget(budget: usize) -> Result<(), PollingError> {
    if budget == 0 {
        return Err(PollingError::InvalidParameter("budget must be >= 1".into()));
    }
    Ok(())
}

/// The large-N bias of the random-walk NEP estimator, by two census routes
/// that are algebraically identical:
/// E[s(Y)] - E[s(X)], and cov(s(X), d(X)) / E[d(X)].
#[derive(Debug, Clone, Copy)]
pub struct RwBias {
    pub via_mean_difference: f64,
    pub via_covariance: f64,
}

impl RwBias {
    pub fn value(&self) -> f64 {
        self.via_mean_difference
    }
}

/// Exact asymptotic bias of [`nep_random_walk`], both formulas.
pub fn exact_bias_rw(g: &Graph) -> Result<RwBias, PollingError> {
    if !g.is_connected() {
        return Err(PollingError::NotConnected);
    }
    let m = g.node_count() as f64;
    // Integer censuses: sum of labels, of degrees, and of label*degree.
    let mut sum_s = 0u64;
    let mut sum_sd = 0u64;
    for v in 0..g.node_count() {
        if g.label(v) == 1 {
            sum_s += 1;
            sum_sd += g.degree(v) as u64;
        }
    }
    let two_e = 2.0 * g.edge_count() as f64;
    let mean_s = sum_s as f64 / m;
    let mean_sd = sum_sd as f64 / m;
    let mean_d = two_e / m;

    let via_mean_difference = sum_sd as f64 / two_e - mean_s;
    let via_covariance = (mean_sd - mean_s * mean_d) / mean_d;
    debug_assert!((via_mean_difference - via_covariance).abs() < 1e-9);
    Ok(RwBias { via_mean_difference, via_covariance })
}

/// Exact asymptotic variance of [`nep_random_walk`]:
/// (1/b) cov(s(Y), q(U)) over the 2|E| directed edge-ends (U, Y).
pub fn exact_var_rw(g: &Graph, budget: usize) -> Result<f64, PollingError> {
    check_budget(budget)?;
    if !g.is_connected() {
        return Err(PollingError::NotConnected);
    }
    let responses = all_responses(g);
    let two_e = 2.0 * g.edge_count() as f64;
    let mut e_sq = 0.0;
    let mut e_s = 0.0;
    let mut e_q = 0.0;
    for u in 0..g.node_count() {
        for &y in g.neighbors(u) {
            let s = g.label(y as usize) as f64;
            let q = responses[u];
            e_sq += s * q;
            e_s += s;
            e_q += q;
        }
    }
    e_sq /= two_e;
    e_s /= two_e;
    e_q /= two_e;
    Ok((e_sq - e_s * e_q) / budget as f64)
}

/// Outcome of the small-budget (b = 1) sufficient-condition check.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ConditionStatus {
    Holds,
    DoesNotHold,
    /// A label class is empty; the conditional expectations are undefined.
    Indeterminate,
}

/// Census quantities behind the b = 1 MSE comparison of the random-walk
/// NEP estimator against intent polling.
#[derive(Debug, Clone, Copy)]
pub struct SmallBudgetReport {
    pub status: ConditionStatus,
    /// E[d(X) | s = 1]; NaN when no node is labeled 1.
    pub mean_degree_infected: f64,
    /// E[d(X) | s = 0]; NaN when no node is labeled 0.
    pub mean_degree_susceptible: f64,
    pub true_fraction: f64,
    pub mean_degree: f64,
}

/// Evaluates the two sufficient conditions:
/// E[d|s=1] <= E[d|s=0] and fraction <= 0.5, or
/// E[d|s=1] >= E[d|s=0] and fraction >= 0.5.
pub fn small_budget_condition(g: &Graph) -> SmallBudgetReport {
    let mut d1 = 0u64;
    let mut n1 = 0u64;
    let mut d0 = 0u64;
    let mut n0 = 0u64;
    for v in 0..g.node_count() {
        let d = g.degree(v) as u64;
        if g.label(v) == 1 {
            d1 += d;
            n1 += 1;
        } else {
            d0 += d;
            n0 += 1;
        }
    }
    let fraction = n1 as f64 / g.node_count() as f64;
    let mean_degree = 2.0 * g.edge_count() as f64 / g.node_count() as f64;
    let mean_degree_infected = if n1 > 0 { d1 as f64 / n1 as f64 } else { f64::NAN };
    let mean_degree_susceptible = if n0 > 0 { d0 as f64 / n0 as f64 } else { f64::NAN };
    let status = if n1 == 0 || n0 == 0 {
        ConditionStatus::Indeterminate
    } else {
        let cond1 = mean_degree_infected <= mean_degree_susceptible && fraction <= 0.5;
        let cond2 = mean_degree_infected >= mean_degree_susceptible && fraction >= 0.5;
        if cond1 || cond2 {
            ConditionStatus::Holds
        } else {
            ConditionStatus::DoesNotHold
        }
    };
    SmallBudgetReport {
        status,
        mean_degree_infected,
        mean_degree_susceptible,
        true_fraction: fraction,
        mean_degree,
    }
}

/// How per-trial seeds are assigned across estimators.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SeedMode {
    /// Each (estimator, budget, trial) gets an independent derived seed.
    Isolated,
    /// Estimators share the (budget, trial) seed, for paired comparisons.
    Paired,
}

#[derive(Debug, Clone)]
pub struct MseRow {
    pub estimator: Estimator,
    pub budget: usize,
    pub mse: f64,
    pub bias: f64,
    pub variance: f64,
    pub trials: usize,
    /// Monte-Carlo standard error of the MSE entry.
    pub mse_se: f64,
}

#[derive(Debug, Clone)]
pub struct MseTable {
    pub true_fraction: f64,
    pub rows: Vec<MseRow>,
}

impl MseTable {
    pub fn row(&self, estimator: Estimator, budget: usize) -> Option<&MseRow> {
        self.rows.iter().find(|r| r.estimator == estimator && r.budget == budget)
    }

    /// CSV with the experiment-grid metadata columns.
    pub fn write_csv<W: Write>(
        &self,
        mut out: W,
        graph_id: &str,
        model: &str,
        r_kk: f64,
        p_ks: f64,
    ) -> std::io::Result<()> {
        writeln!(out, "graph_id,alpha_or_model,r_kk,p_ks,estimator,budget,mse,bias,var,trials")?;
        for r in &self.rows {
            writeln!(
                out,
                "{},{},{},{},{},{},{},{},{},{}",
                graph_id,
                model,
                r_kk,
                p_ks,
                r.estimator.name(),
                r.budget,
                r.mse,
                r.bias,
                r.variance,
                r.trials
            )?;
        }
        Ok(())
    }
}

/// Monte-Carlo MSE/bias/variance of the chosen estimators against the
/// census fraction. Each (estimator, budget, trial) draws its own derived
/// seed (see [`SeedMode`]).
pub fn mse_experiment(
    g: &Graph,
    estimators: &[Estimator],
    budgets: &[usize],
    trials: usize,
    walk_length: usize,
    base_seed: u64,
    seed_mode: SeedMode,
) -> Result<MseTable, PollingError> {
    if trials < 100 {
        return Err(PollingError::InvalidParameter("trials must be >= 100".into()));
    }
    if estimators.contains(&Estimator::NepRandomWalk) && !g.is_connected() {
        return Err(PollingError::NotConnected);
    }
    let truth = true_fraction(g);
    let responses = all_responses(g);

    let mut rows = Vec::new();
    for &estimator in estimators {
        for &budget in budgets {
            check_budget(budget)?;
            // Trials are independent given their derived seeds, so the
            // parallel map is deterministic regardless of thread count.
            let estimates: Vec<f64> = (0..trials)
                .into_par_iter()
                .map(|trial| {
                    let seed = match seed_mode {
                        SeedMode::Isolated => derive_seed(
                            base_seed,
                            &[tag(estimator.name()), budget as u64, trial as u64],
                        ),
                        SeedMode::Paired => {
                            derive_seed(base_seed, &[budget as u64, trial as u64])
                        }
                    };
                    let mut rng = ChaCha8Rng::seed_from_u64(seed);
                    run_estimator(g, &responses, estimator, budget, walk_length, &mut rng)
                })
                .collect();
            let t = trials as f64;
            let mean = estimates.iter().sum::<f64>() / t;
            let bias = mean - truth;
            let variance = estimates.iter().map(|e| (e - mean).powi(2)).sum::<f64>() / t;
            let sq_errors: Vec<f64> = estimates.iter().map(|e| (e - truth).powi(2)).collect();
            let mse = sq_errors.iter().sum::<f64>() / t;
            let mse_var = sq_errors.iter().map(|s| (s - mse).powi(2)).sum::<f64>() / t;
            let mse_se = (mse_var / t).sqrt();
            rows.push(MseRow { estimator, budget, mse, bias, variance, trials, mse_se });
        }
    }
    Ok(MseTable { true_fraction: truth, rows })
}

fn run_estimator<R: Rng>(
    g: &Graph,
    responses: &[f64],
    estimator: Estimator,
    budget: usize,
    walk_length: usize,
    rng: &mut R,
) -> f64 {
    let mut acc = 0.0;
    for _ in 0..budget {
        acc += match estimator {
            Estimator::Intent => g.label(sampling::sample_uniform_node(g, rng)) as f64,
            Estimator::NepUniform => responses[sampling::sample_uniform_node(g, rng)],
            Estimator::NepRandomWalk => {
                let start = sampling::sample_uniform_node(g, rng);
                responses[sampling::random_walk(g, start, walk_length, rng)]
            }
            Estimator::NepFriendOfNode => {
                responses[sampling::sample_friend_of_random_node(g, rng)]
            }
        };
    }
    acc / budget as f64
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::testutil::{circulant4, cycle, path3, star};
    use crate::graph::{assign_labels, generate_configuration_model, Graph};

    fn hub_labeled_path3() -> Graph {
        path3().with_labels(vec![0, 1, 0]).unwrap()
    }

    #[test]
    fn nep_response_on_path3() {
        let g = hub_labeled_path3();
        assert_eq!(nep_response(&g, 0), 1.0);
        assert_eq!(nep_response(&g, 1), 0.0);
        assert_eq!(nep_response(&g, 2), 1.0);
    }

    #[test]
    fn nep_response_saturated_and_regular() {
        let g = cycle(6).with_labels(vec![1; 6]).unwrap();
        for v in 0..6 {
            assert_eq!(nep_response(&g, v), 1.0);
        }
        // 2-regular with exactly one infected neighbor: 1/2.
        let g = cycle(6).with_labels(vec![1, 0, 0, 0, 0, 0]).unwrap();
        assert_eq!(nep_response(&g, 1), 0.5);
    }

    #[test]
    fn intent_poll_is_unbiased_and_converges() {
        let g = generate_configuration_model(1000, 2.1, 1, 31, 41).unwrap();
        let g = assign_labels(&g, 0.3, 0.0, 0.5, 42).unwrap().graph;
        let est = intent_poll(&g, 200_000, 7).unwrap().estimate;
        assert!((est - true_fraction(&g)).abs() <= 0.01);
        // All labels identical: exact for any budget.
        let g = cycle(5).with_labels(vec![1; 5]).unwrap();
        assert_eq!(intent_poll(&g, 1, 1).unwrap().estimate, 1.0);
    }

    #[test]
    fn intent_poll_b1_mse_is_bernoulli_variance() {
        let g = generate_configuration_model(1000, 2.1, 1, 31, 43).unwrap();
        let g = assign_labels(&g, 0.3, 0.0, 0.5, 44).unwrap().graph;
        assert_eq!(true_fraction(&g), 0.3);
        let table = mse_experiment(
            &g,
            &[Estimator::Intent],
            &[1],
            10_000,
            0,
            45,
            SeedMode::Isolated,
        )
        .unwrap();
        let row = table.row(Estimator::Intent, 1).unwrap();
        assert!((row.mse - 0.21).abs() <= 0.01, "mse {}", row.mse);
        // Decomposition is exact with the population-variance normalizer.
        assert!((row.mse - (row.bias.powi(2) + row.variance)).abs() < 1e-12);
    }

    #[test]
    fn nep_uniform_is_heavily_biased_on_labeled_hub_star() {
        let g = star(20).with_labels(
            std::iter::once(1).chain(std::iter::repeat_n(0, 20)).collect(),
        )
        .unwrap();
        let truth = true_fraction(&g);
        let est = nep_uniform(&g, 50_000, 8).unwrap().estimate;
        assert!(est - truth > 0.8, "estimate {est} vs truth {truth}");
    }

    #[test]
    fn nep_uniform_zero_variance_when_every_response_is_the_truth() {
        // C_4 with one label per side: every node's response is exactly 0.5.
        let g = cycle(4).with_labels(vec![1, 1, 0, 0]).unwrap();
        let truth = true_fraction(&g);
        for v in 0..4 {
            assert_eq!(nep_response(&g, v), truth);
        }
        for seed in 0..5 {
            assert_eq!(nep_uniform(&g, 3, seed).unwrap().estimate, truth);
        }
    }

    #[test]
    fn rw_with_zero_steps_equals_uniform_under_shared_seed() {
        let g = crate::graph::testutil::connected_power_law(300, 2.2, 2, 17, 46);
        let g = assign_labels(&g, 0.4, 0.1, 0.05, 47).unwrap().graph;
        for seed in 0..10 {
            let a = nep_random_walk(&g, 13, 0, seed).unwrap().estimate;
            let b = nep_uniform(&g, 13, seed).unwrap().estimate;
            assert_eq!(a, b);
        }
    }

    #[test]
    fn exact_bias_formulas_agree_and_match_path3() {
        let g = hub_labeled_path3();
        let bias = exact_bias_rw(&g).unwrap();
        assert!((bias.via_mean_difference - 1.0 / 6.0).abs() < 1e-15);
        assert!((bias.via_covariance - 1.0 / 6.0).abs() < 1e-15);
        // Constant labels: zero bias.
        let g = cycle(7).with_labels(vec![1; 7]).unwrap();
        let bias = exact_bias_rw(&g).unwrap();
        assert_eq!(bias.via_mean_difference, 0.0);
        assert!(bias.via_covariance.abs() < 1e-15);
    }

    #[test]
    fn uncorrelated_labels_make_rw_unbiased() {
        // Labels chosen so cov(s, d) = 0 exactly: on a regular graph any
        // labeling works.
        let g = circulant4(40).with_labels((0..40).map(|v| (v % 2) as u8).collect()).unwrap();
        let bias = exact_bias_rw(&g).unwrap();
        assert!(bias.via_mean_difference.abs() < 1e-15);
        // Empirical check at large N.
        let table = mse_experiment(
            &g,
            &[Estimator::NepRandomWalk],
            &[1],
            10_000,
            300,
            48,
            SeedMode::Isolated,
        )
        .unwrap();
        let row = table.row(Estimator::NepRandomWalk, 1).unwrap();
        let se = (row.variance / row.trials as f64).sqrt();
        assert!(row.bias.abs() <= 3.0 * se, "bias {} se {}", row.bias, se);
    }

    #[test]
    fn exact_var_scales_as_one_over_b_and_matches_path3() {
        let g = hub_labeled_path3();
        let v1 = exact_var_rw(&g, 1).unwrap();
        let v2 = exact_var_rw(&g, 2).unwrap();
        assert!((v1 - 0.25).abs() < 1e-15, "var {v1}");
        assert_eq!(v1 / 2.0, v2);
        let g = cycle(9).with_labels(vec![1; 9]).unwrap();
        assert_eq!(exact_var_rw(&g, 3).unwrap(), 0.0);
    }

    #[test]
    fn empirical_rw_variance_matches_census_formula() {
        // Non-bipartite graph so a fixed-N walk reaches the stationary law.
        let g = circulant4(60)
            .with_labels((0..60).map(|v| (v % 3 == 0) as u8).collect())
            .unwrap();
        let exact = exact_var_rw(&g, 1).unwrap();
        let trials = 100_000;
        let table = mse_experiment(
            &g,
            &[Estimator::NepRandomWalk],
            &[1],
            trials,
            100,
            49,
            SeedMode::Isolated,
        )
        .unwrap();
        let row = table.row(Estimator::NepRandomWalk, 1).unwrap();
        // SE of an empirical variance ~ var * sqrt(2/(T-1)) for
        // near-Gaussian summands; use a generous 5% band instead.
        assert!(
            (row.variance - exact).abs() <= 0.05 * exact.max(1e-6),
            "empirical {} vs exact {}",
            row.variance,
            exact
        );
    }

    #[test]
    fn disconnected_graph_is_rejected_for_walk_estimators() {
        let g = Graph::from_edges(4, &[(0, 1), (2, 3)]).unwrap();
        assert!(matches!(nep_random_walk(&g, 3, 10, 1), Err(PollingError::NotConnected)));
        assert!(matches!(exact_bias_rw(&g), Err(PollingError::NotConnected)));
        assert!(matches!(exact_var_rw(&g, 1), Err(PollingError::NotConnected)));
    }

    #[test]
    fn small_budget_condition_cases() {
        // Path3 hub labeled: E[d|1]=2 > E[d|0]=1, fraction 1/3 -> false.
        let r = small_budget_condition(&hub_labeled_path3());
        assert_eq!(r.status, ConditionStatus::DoesNotHold);
        assert_eq!(r.mean_degree_infected, 2.0);
        assert_eq!(r.mean_degree_susceptible, 1.0);
        assert!((r.true_fraction - 1.0 / 3.0).abs() < 1e-15);

        // Path3 leaves labeled: E[d|1]=1 < E[d|0]=2, fraction 2/3 -> false.
        let g = path3().with_labels(vec![1, 0, 1]).unwrap();
        let r = small_budget_condition(&g);
        assert_eq!(r.status, ConditionStatus::DoesNotHold);

        // Balanced labels on a regular graph: both conditions hold with
        // equality.
        let g = cycle(8).with_labels(vec![1, 1, 1, 1, 0, 0, 0, 0]).unwrap();
        let r = small_budget_condition(&g);
        assert_eq!(r.status, ConditionStatus::Holds);

        // Empty class: indeterminate.
        let g = cycle(8).with_labels(vec![0; 8]).unwrap();
        let r = small_budget_condition(&g);
        assert_eq!(r.status, ConditionStatus::Indeterminate);
        assert!(r.mean_degree_infected.is_nan());
    }

    #[test]
    fn when_condition_holds_rw_beats_intent_at_b1() {
        // Balanced labels on a connected non-bipartite regular graph.
        let g = circulant4(200)
            .with_labels((0..200).map(|v| (v % 2) as u8).collect())
            .unwrap();
        assert_eq!(small_budget_condition(&g).status, ConditionStatus::Holds);
        let table = mse_experiment(
            &g,
            &[Estimator::NepRandomWalk, Estimator::Intent],
            &[1],
            100_000,
            500,
            50,
            SeedMode::Isolated,
        )
        .unwrap();
        let rw = table.row(Estimator::NepRandomWalk, 1).unwrap();
        let ip = table.row(Estimator::Intent, 1).unwrap();
        let margin = 3.0 * (rw.mse_se.powi(2) + ip.mse_se.powi(2)).sqrt();
        assert!(rw.mse <= ip.mse + margin, "rw {} vs intent {}", rw.mse, ip.mse);
    }

    #[test]
    fn mse_experiment_validates_inputs() {
        let g = cycle(5);
        assert!(mse_experiment(&g, &[Estimator::Intent], &[1], 99, 0, 1, SeedMode::Isolated)
            .is_err());
        assert!(mse_experiment(&g, &[Estimator::Intent], &[0], 100, 0, 1, SeedMode::Isolated)
            .is_err());
    }

    #[test]
    fn paired_seed_mode_couples_estimators() {
        // NepUniform and a zero-step NepRandomWalk consume randomness
        // identically, so paired seeds make their rows coincide exactly.
        let g = crate::graph::testutil::connected_power_law(200, 2.3, 2, 12, 52);
        let g = assign_labels(&g, 0.4, 0.0, 0.1, 53).unwrap().graph;
        let table = mse_experiment(
            &g,
            &[Estimator::NepUniform, Estimator::NepRandomWalk],
            &[3],
            200,
            0,
            54,
            SeedMode::Paired,
        )
        .unwrap();
        let a = table.row(Estimator::NepUniform, 3).unwrap();
        let b = table.row(Estimator::NepRandomWalk, 3).unwrap();
        assert_eq!(a.mse, b.mse);
        assert_eq!(a.bias, b.bias);
    }

    #[test]
    fn mse_decomposition_identity_every_row() {
        let g = crate::graph::testutil::connected_power_law(300, 2.2, 2, 14, 56);
        let g = assign_labels(&g, 0.3, 0.1, 0.1, 57).unwrap().graph;
        let table = mse_experiment(
            &g,
            &Estimator::ALL,
            &[1, 4, 9],
            300,
            50,
            58,
            SeedMode::Isolated,
        )
        .unwrap();
        assert_eq!(table.rows.len(), 12);
        for row in &table.rows {
            assert!(
                (row.mse - (row.bias.powi(2) + row.variance)).abs() <= 1e-12,
                "{:?} b={}: identity violated",
                row.estimator,
                row.budget
            );
        }
    }

    #[test]
    fn mse_csv_schema() {
        let g = cycle(6).with_labels(vec![1, 0, 1, 0, 1, 0]).unwrap();
        let table = mse_experiment(
            &g,
            &[Estimator::Intent, Estimator::NepUniform],
            &[1, 5],
            100,
            0,
            51,
            SeedMode::Isolated,
        )
        .unwrap();
        let mut buf = Vec::new();
        table.write_csv(&mut buf, "g0", "er-50", 0.0, 0.2).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(
            lines.next().unwrap(),
            "graph_id,alpha_or_model,r_kk,p_ks,estimator,budget,mse,bias,var,trials"
        );
        assert_eq!(lines.count(), 4);
    }
}
