//! Node samplers (uniform X, random friend Y, random friend Z of a random
//! node), random-walk sampling, MCMC/RDS estimation, and the exact census
//! verification of the friendship-paradox orderings.

use std::fmt;
use std::io::Write;

use rand::prelude::*;
use rand_chacha::ChaCha8Rng;

use crate::graph::Graph;

#[derive(Debug)]
pub enum SamplingError {
    ZeroTotalWeight,
    Disconnected,
    EmptyChain,
}

impl fmt::Display for SamplingError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SamplingError::ZeroTotalWeight => write!(f, "edge weights sum to zero"),
            SamplingError::Disconnected => write!(f, "graph is not connected"),
            SamplingError::EmptyChain => write!(f, "chain length must be >= 1"),
        }
    }
}

impl std::error::Error for SamplingError {}

/// Uniform node X: every node with probability 1/M.
pub fn sample_uniform_node<R: Rng>(g: &Graph, rng: &mut R) -> usize {
    rng.gen_range(0..g.node_count())
}

/// Random friend Y: a uniform end of a uniform edge, so node probability
/// d(v)/2|E|.
pub fn sample_random_friend<R: Rng>(g: &Graph, rng: &mut R) -> usize {
    let end = rng.gen_range(0..2 * g.edge_count());
    // Owner of the end = the node whose CSR slice contains it.
    owner_of_end(g, end)
}

fn owner_of_end(g: &Graph, end: usize) -> usize {
    let mut lo = 0usize;
    let mut hi = g.node_count() - 1;
    while lo < hi {
        let mid = (lo + hi).div_ceil(2);
        if g.offsets()[mid] <= end {
            lo = mid;
        } else {
            hi = mid - 1;
        }
    }
    lo
}

/// Random friend Z of a random node: uniform node, then a uniform neighbor
/// of it. Node probability sum_{u in N(v)} 1/(M d(u)).
pub fn sample_friend_of_random_node<R: Rng>(g: &Graph, rng: &mut R) -> usize {
    let u = rng.gen_range(0..g.node_count());
    let nbrs = g.neighbors(u);
    nbrs[rng.gen_range(0..nbrs.len())] as usize
}

/// Position after `steps` uniform-neighbor moves from `start`.
pub fn random_walk<R: Rng>(g: &Graph, start: usize, steps: usize, rng: &mut R) -> usize {
    let mut node = start;
    for _ in 0..steps {
        let nbrs = g.neighbors(node);
        node = nbrs[rng.gen_range(0..nbrs.len())] as usize;
    }
    node
}

/// RDS/MCMC estimate of a per-node statistic.
#[derive(Debug, Clone)]
pub struct RdsEstimate {
    pub estimate: f64,
    /// Number of chain samples used (including the start node).
    pub samples: usize,
    /// Set when a 2-coloring exists; the aperiodicity argument behind
    /// asymptotic unbiasedness does not apply then.
    pub bipartite_warning: bool,
}

/// Runs a weighted chain (transition W_ij / sum_j W_ij) for `chain_length`
/// samples and returns the importance-reweighted average
/// sum_l stat(m_l)/pi(m_l) / sum_l 1/pi(m_l), with pi(i) proportional to
/// sum_j W_ij.
///
/// `weights` must be symmetric and positive on edges; asymmetry is the
/// caller's bug, not detected here.
pub fn rds_estimate<W, F>(
    g: &Graph,
    weights: W,
    chain_length: usize,
    seed: u64,
    statistic: F,
) -> Result<RdsEstimate, SamplingError>
where
    W: Fn(usize, usize) -> f64,
    F: Fn(usize) -> f64,
{
    if chain_length == 0 {
        return Err(SamplingError::EmptyChain);
    }
    let n = g.node_count();
    let mut node_weight = vec![0.0f64; n];
    let mut total = 0.0;
    for u in 0..n {
        for &v in g.neighbors(u) {
            let w = weights(u, v as usize);
            node_weight[u] += w;
            total += w;
        }
    }
    if total <= 0.0 {
        return Err(SamplingError::ZeroTotalWeight);
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut node = rng.gen_range(0..n);
    // pi(i) = node_weight[i]/total; the constant cancels in the ratio.
    let mut num = 0.0;
    let mut den = 0.0;
    for step in 0..chain_length {
        if step > 0 {
            let target = rng.gen::<f64>() * node_weight[node];
            let mut acc = 0.0;
            let mut next = *g.neighbors(node).last().unwrap() as usize;
            for &v in g.neighbors(node) {
                acc += weights(node, v as usize);
                if target < acc {
                    next = v as usize;
                    break;
                }
            }
            node = next;
        }
        let inv_pi = 1.0 / node_weight[node];
        num += statistic(node) * inv_pi;
        den += inv_pi;
    }
    Ok(RdsEstimate {
        estimate: num / den,
        samples: chain_length,
        bipartite_warning: g.is_bipartite(),
    })
}

/// Census verification of the three friendship-paradox statements.
#[derive(Debug, Clone)]
pub struct ParadoxReport {
    pub mean_dx: f64,
    pub mean_dy: f64,
    pub mean_dz: f64,
    /// CDFs over degree 0..=D.
    pub cdf_dx: Vec<f64>,
    pub cdf_dy: Vec<f64>,
    pub cdf_dz: Vec<f64>,
    /// F_{d(Z)}(n) <= F_{d(X)}(n) for all n.
    pub fosd_zx_holds: bool,
    /// f_Y(k)/f_X(k) nondecreasing over the support.
    pub lr_yx_monotone: bool,
}

impl ParadoxReport {
    /// CSV rows (degree, cdf_X, cdf_Y, cdf_Z).
    pub fn write_csv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "degree,cdf_x,cdf_y,cdf_z")?;
        for k in 1..self.cdf_dx.len() {
            writeln!(out, "{},{},{},{}", k, self.cdf_dx[k], self.cdf_dy[k], self.cdf_dz[k])?;
        }
        Ok(())
    }
}

/// Exact distributions of d(X), d(Y), d(Z) by enumeration.
///
/// X: node histogram. Y: edge-end histogram. Z: two-stage sum
/// P(Z = v) = sum_{u in N(v)} 1/(M d(u)).
pub fn verify_friendship_paradox(g: &Graph) -> ParadoxReport {
    let n = g.node_count();
    let d_max = g.max_degree();
    let width = d_max + 1;

    let mut f_x = vec![0.0f64; width];
    let mut f_y = vec![0.0f64; width];
    let mut f_z = vec![0.0f64; width];
    let total_ends = 2.0 * g.edge_count() as f64;
    for v in 0..n {
        let d = g.degree(v);
        f_x[d] += 1.0 / n as f64;
        f_y[d] += d as f64 / total_ends;
        // Mass flowing into v from each of its neighbors' uniform picks.
        let mut mass = 0.0;
        for &u in g.neighbors(v) {
            mass += 1.0 / (n as f64 * g.degree(u as usize) as f64);
        }
        f_z[d] += mass;
    }

    let mean = |f: &[f64]| f.iter().enumerate().map(|(k, &p)| k as f64 * p).sum::<f64>();
    let cdf = |f: &[f64]| {
        let mut acc = 0.0;
        f.iter()
            .map(|&p| {
                acc += p;
                acc
            })
            .collect::<Vec<_>>()
    };

    let cdf_dx = cdf(&f_x);
    let cdf_dy = cdf(&f_y);
    let cdf_dz = cdf(&f_z);
    let fosd_zx_holds = cdf_dz
        .iter()
        .zip(&cdf_dx)
        .all(|(&z, &x)| z <= x + 1e-12);
    let ratios: Vec<f64> = (1..width)
        .filter(|&k| f_x[k] > 0.0)
        .map(|k| f_y[k] / f_x[k])
        .collect();
    let lr_yx_monotone = ratios.windows(2).all(|w| w[1] >= w[0] - 1e-12);

    ParadoxReport {
        mean_dx: mean(&f_x),
        mean_dy: mean(&f_y),
        mean_dz: mean(&f_z),
        cdf_dx,
        cdf_dy,
        cdf_dz,
        fosd_zx_holds,
        lr_yx_monotone,
    }
}

/// Mixing diagnostic for random-walk sampling: total-variation distance
/// between the empirical degree distribution of walk endpoints (uniform
/// starts, `walk_length` steps, `replicas` walks) and the census q(k).
pub fn walk_mixing_diagnostic(
    g: &Graph,
    walk_length: usize,
    replicas: usize,
    seed: u64,
) -> f64 {
    let stats = g.stats();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut hist = vec![0.0f64; stats.width()];
    for _ in 0..replicas {
        let start = sample_uniform_node(g, &mut rng);
        hist[g.degree(random_walk(g, start, walk_length, &mut rng))] += 1.0 / replicas as f64;
    }
    tv_distance(&hist, &stats.neighbor_degree_dist)
}

/// Total-variation distance between an empirical degree histogram and a
/// reference distribution; the random-walk mixing diagnostic.
pub fn tv_distance(empirical: &[f64], reference: &[f64]) -> f64 {
    let width = empirical.len().max(reference.len());
    let get = |v: &[f64], i: usize| v.get(i).copied().unwrap_or(0.0);
    0.5 * (0..width)
        .map(|i| (get(empirical, i) - get(reference, i)).abs())
        .sum::<f64>()
}
