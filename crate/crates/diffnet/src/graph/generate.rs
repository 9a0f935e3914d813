//! Synthetic graph generators: configuration model with a truncated
//! power-law degree distribution, and Erdos-Renyi G(n, p).

use rand::prelude::*;
use rand_chacha::ChaCha8Rng;

use crate::graph::{Graph, GraphError};

/// Maximum full restarts of stub matching before giving up.
const MAX_RESTARTS: usize = 50;
/// Rematch rounds for the offending stubs within one attempt.
const MAX_REMATCH_ROUNDS: usize = 200;

/// Samples a degree sequence from P(k) proportional to k^(-alpha) on
/// [d_min, d_max] and wires it with stub matching. Self-loops and parallel
/// edges are resolved by re-matching the offending stubs; the target degree
/// sequence is preserved exactly (up to the odd-stub parity fix, which
/// increments one uniformly chosen node's degree by 1).
pub fn generate_configuration_model(
    n: usize,
    alpha: f64,
    d_min: usize,
    d_max: usize,
    seed: u64,
) -> Result<Graph, GraphError> {
    if n < 2 {
        return Err(GraphError::InvalidParameter("n must be >= 2".into()));
    }
    if !(alpha > 1.0) {
        return Err(GraphError::InvalidParameter("alpha must be > 1".into()));
    }
    if d_min < 1 || d_min > d_max || d_max >= n {
        return Err(GraphError::InvalidParameter(
            "need 1 <= d_min <= d_max < n".into(),
        ));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    // Truncated power-law pmf and its cdf for inverse-cdf sampling.
    let weights: Vec<f64> = (d_min..=d_max).map(|k| (k as f64).powf(-alpha)).collect();
    let total: f64 = weights.iter().sum();
    let mut cdf = Vec::with_capacity(weights.len());
    let mut acc = 0.0;
    for w in &weights {
        acc += w / total;
        cdf.push(acc);
    }

    for _restart in 0..MAX_RESTARTS {
        let mut degrees: Vec<usize> = (0..n)
            .map(|_| {
                let u: f64 = rng.gen();
                let idx = cdf.partition_point(|&c| c < u).min(cdf.len() - 1);
                d_min + idx
            })
            .collect();
        if degrees.iter().sum::<usize>() % 2 == 1 {
            let v = rng.gen_range(0..n);
            degrees[v] += 1;
        }
        if let Some(edges) = match_stubs(&degrees, &mut rng) {
            return Graph::from_edges(n, &edges);
        }
    }
    Err(GraphError::GenerationFailed(format!(
        "stub matching failed after {MAX_RESTARTS} restarts (n={n}, alpha={alpha})"
    )))
}

/// One stub-matching attempt; `None` if the offending stubs could not be
/// resolved within the rematch budget.
fn match_stubs(degrees: &[usize], rng: &mut ChaCha8Rng) -> Option<Vec<(usize, usize)>> {
    let mut stubs: Vec<u32> = Vec::with_capacity(degrees.iter().sum());
    for (v, &d) in degrees.iter().enumerate() {
        stubs.extend(std::iter::repeat_n(v as u32, d));
    }
    stubs.shuffle(rng);

    let mut edges: Vec<(usize, usize)> = Vec::with_capacity(stubs.len() / 2);
    let mut seen = std::collections::HashSet::with_capacity(stubs.len() / 2);
    let mut pending = stubs;
    for _ in 0..MAX_REMATCH_ROUNDS {
        let mut rejected = Vec::new();
        for pair in pending.chunks(2) {
            let (u, v) = (pair[0] as usize, pair[1] as usize);
            let key = ((u.min(v) as u64) << 32) | u.max(v) as u64;
            if u == v || !seen.insert(key) {
                rejected.push(pair[0]);
                rejected.push(pair[1]);
            } else {
                edges.push((u, v));
            }
        }
        if rejected.is_empty() {
            return Some(edges);
        }
        if rejected.len() == 2 && rejected[0] == rejected[1] {
            // A lone self-pair can never be fixed by reshuffling.
            return None;
        }
        rejected.shuffle(rng);
        pending = rejected;
    }
    None
}

/// G(n, p) with p = avg_degree/(n-1); isolated nodes are removed and the
/// remaining nodes relabeled to keep ids contiguous.
pub fn generate_erdos_renyi(n: usize, avg_degree: f64, seed: u64) -> Result<Graph, GraphError> {
    if n < 2 {
        return Err(GraphError::InvalidParameter("n must be >= 2".into()));
    }
    if !(avg_degree > 0.0) || avg_degree > (n - 1) as f64 {
        return Err(GraphError::InvalidParameter(
            "need 0 < avg_degree <= n-1".into(),
        ));
    }
    let p = (avg_degree / (n - 1) as f64).min(1.0);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    // Skip-sampling over the n(n-1)/2 pair slots: the gap to the next
    // present edge is geometric with parameter p.
    let mut edges: Vec<(usize, usize)> = Vec::new();
    if p >= 1.0 {
        for u in 0..n {
            for v in u + 1..n {
                edges.push((u, v));
            }
        }
    } else {
        let total_pairs = n as u64 * (n as u64 - 1) / 2;
        let log_q = (1.0 - p).ln();
        let mut slot: u64 = 0;
        loop {
            let u: f64 = rng.gen();
            let gap = ((1.0 - u).ln() / log_q).floor() as u64;
            slot = slot.saturating_add(gap);
            if slot >= total_pairs {
                break;
            }
            edges.push(pair_from_slot(slot, n));
            slot += 1;
        }
    }

    // Drop isolated nodes, relabeling the rest in order.
    let mut present = vec![false; n];
    for &(u, v) in &edges {
        present[u] = true;
        present[v] = true;
    }
    let mut relabel = vec![usize::MAX; n];
    let mut kept = 0usize;
    for v in 0..n {
        if present[v] {
            relabel[v] = kept;
            kept += 1;
        }
    }
    if kept < 2 {
        return Err(GraphError::GenerationFailed(
            "fewer than 2 non-isolated nodes; avg_degree too small".into(),
        ));
    }
    let edges: Vec<(usize, usize)> =
        edges.into_iter().map(|(u, v)| (relabel[u], relabel[v])).collect();
    Graph::from_edges(kept, &edges)
}

/// Maps a linear slot index to the (u, v) pair in row-major upper-triangle
/// order.
fn pair_from_slot(slot: u64, n: usize) -> (usize, usize) {
    // Row u owns (n-1-u) slots; find u by walking rows. Binary search over
    // the cumulative row sizes keeps this O(log n).
    let nf = n as u64;
    let mut lo = 0u64;
    let mut hi = nf - 1;
    // first slot of row u: S(u) = u*n - u(u+3)/2 ... derived below by sum.
    let row_start = |u: u64| u * (2 * nf - u - 1) / 2;
    while lo < hi {
        let mid = (lo + hi).div_ceil(2);
        if row_start(mid) <= slot {
            lo = mid;
        } else {
            hi = mid - 1;
        }
    }
    let u = lo;
    let v = u + 1 + (slot - row_start(u));
    (u as usize, v as usize)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pair_from_slot_enumerates_all_pairs() {
        let n = 7;
        let total = n * (n - 1) / 2;
        let mut seen = std::collections::HashSet::new();
        for s in 0..total as u64 {
            let (u, v) = pair_from_slot(s, n);
            assert!(u < v && v < n);
            assert!(seen.insert((u, v)));
        }
        assert_eq!(seen.len(), total);
    }

    #[test]
    fn k2_is_forced_for_matched_stubs() {
        let g = generate_configuration_model(2, 2.0, 1, 1, 3).unwrap();
        assert_eq!(g.node_count(), 2);
        assert_eq!(g.edge_count(), 1);
    }

    #[test]
    fn er_with_p_one_is_complete() {
        let g = generate_erdos_renyi(2, 1.0, 9).unwrap();
        assert_eq!(g.edge_count(), 1);
        let g = generate_erdos_renyi(5, 4.0, 9).unwrap();
        assert_eq!(g.edge_count(), 10);
    }

    #[test]
    fn configuration_model_mean_degree_matches_truncated_law() {
        // Analytic mean of the truncated power law, alpha = 2.4 on [1, 31].
        let (n, alpha, d_min, d_max) = (1000usize, 2.4f64, 1usize, 31usize);
        let weights: Vec<f64> = (d_min..=d_max).map(|k| (k as f64).powf(-alpha)).collect();
        let total: f64 = weights.iter().sum();
        let mean: f64 = (d_min..=d_max)
            .zip(&weights)
            .map(|(k, w)| k as f64 * w / total)
            .sum();
        let second: f64 = (d_min..=d_max)
            .zip(&weights)
            .map(|(k, w)| (k as f64).powi(2) * w / total)
            .sum();
        let se = ((second - mean * mean) / n as f64).sqrt();

        let g = generate_configuration_model(n, alpha, d_min, d_max, 42).unwrap();
        let sample_mean = 2.0 * g.edge_count() as f64 / g.node_count() as f64;
        // Parity fix can add at most 1 to the stub sum => 2/n to the mean.
        assert!(
            (sample_mean - mean).abs() <= 3.0 * se + 2.0 / n as f64,
            "sample mean {sample_mean} vs analytic {mean} (se {se})"
        );
    }

    #[test]
    fn large_power_law_graph_is_heavy_tailed() {
        let g = generate_configuration_model(10_000, 2.1, 1, 100, 21).unwrap();
        let counts = g.degree_counts();
        let p = |k: usize| counts.get(k).copied().unwrap_or(0) as f64 / 10_000.0;
        assert!(p(1) > p(5) && p(5) > p(20));
        // The tail actually reaches high degrees.
        assert!(g.max_degree() >= 50, "max degree {}", g.max_degree());
    }

    #[test]
    fn configuration_model_preserves_simplicity_and_reproducibility() {
        let g1 = generate_configuration_model(500, 2.1, 1, 22, 7).unwrap();
        let g2 = generate_configuration_model(500, 2.1, 1, 22, 7).unwrap();
        assert_eq!(g1, g2);
        let g3 = generate_configuration_model(500, 2.1, 1, 22, 8).unwrap();
        assert_ne!(g1, g3);
    }

    #[test]
    fn er_is_seed_deterministic() {
        let a = generate_erdos_renyi(400, 6.0, 5).unwrap();
        let b = generate_erdos_renyi(400, 6.0, 5).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, generate_erdos_renyi(400, 6.0, 6).unwrap());
    }

    #[test]
    fn er_mean_degree_is_close() {
        let (n, avg) = (5000usize, 50.0f64);
        let g = generate_erdos_renyi(n, avg, 11).unwrap();
        let p = avg / (n - 1) as f64;
        let se = (2.0 * p * (1.0 - p) * (n - 1) as f64 / n as f64).sqrt();
        let sample_mean = 2.0 * g.edge_count() as f64 / g.node_count() as f64;
        assert!((sample_mean - avg).abs() <= 3.0 * se);
    }

    #[test]
    fn er_assortativity_is_near_zero_on_average() {
        let mut acc = 0.0;
        let trials = 50;
        for t in 0..trials {
            let g = generate_erdos_renyi(1000, 10.0, 1000 + t).unwrap();
            acc += g.stats().assortativity;
        }
        let mean_rkk = acc / trials as f64;
        assert!(mean_rkk.abs() <= 0.02, "mean r_kk over seeds: {mean_rkk}");
    }

    #[test]
    fn parameter_validation() {
        assert!(generate_configuration_model(1, 2.0, 1, 1, 0).is_err());
        assert!(generate_configuration_model(10, 1.0, 1, 3, 0).is_err());
        assert!(generate_configuration_model(10, 2.0, 0, 3, 0).is_err());
        assert!(generate_configuration_model(10, 2.0, 4, 3, 0).is_err());
        assert!(generate_configuration_model(10, 2.0, 1, 10, 0).is_err());
        assert!(generate_erdos_renyi(1, 0.5, 0).is_err());
        assert!(generate_erdos_renyi(10, 0.0, 0).is_err());
    }
}
