//! Exact degree-statistics census.
//!
//! Everything here is computed by full enumeration over nodes and directed
//! edge-ends; no sampling. All probability vectors are indexed by degree
//! (index 0 present but unused, since every node has degree >= 1).

use crate::graph::Graph;
use crate::scalar::Scalar;

/// Census statistics of a labeled graph's degree structure.
#[derive(Debug, Clone)]
pub struct DegreeStats<S> {
    /// Largest degree D.
    pub max_degree: usize,
    /// M(k): number of nodes with degree k.
    pub degree_counts: Vec<u64>,
    /// P(k) = M(k)/M.
    pub degree_dist: Vec<S>,
    /// q(k) = k P(k) / k_bar: degree distribution of a random edge-end.
    pub neighbor_degree_dist: Vec<S>,
    /// e(k,k'): joint degree distribution over directed edge-ends,
    /// row-major (max_degree+1)^2, symmetric.
    pub joint_edge_dist: Vec<S>,
    /// P(k|k') = e(k,k')/q(k'), row-major indexed `[k][k']`; zero where
    /// q(k') = 0.
    pub conditional: Vec<S>,
    /// w_Z(k) = sum_{k'} P(k') P(k|k'): degree distribution of a random
    /// neighbor Z of a random node.
    pub z_weights: Vec<S>,
    /// k_bar = E[d(X)].
    pub mean_degree: S,
    /// Assortativity r_kk; 0 with `degenerate_degrees` when sigma_q = 0.
    pub assortativity: S,
    /// Degree-label correlation p_ks; 0 with `degenerate_labels` when a
    /// label class or the degree sequence has zero variance.
    pub degree_label_corr: S,
    /// Std of q(k).
    pub sigma_q: S,
    /// Std of the degree distribution P(k).
    pub sigma_k: S,
    /// Std of the label distribution.
    pub sigma_s: S,
    /// Fraction of labeled-1 nodes.
    pub infected_fraction: S,
    pub degenerate_degrees: bool,
    pub degenerate_labels: bool,
}

impl<S: Scalar> DegreeStats<S> {
    /// Full census over `g`'s nodes and directed edge-ends.
    pub fn from_graph(g: &Graph) -> DegreeStats<S> {
        let n = g.node_count();
        let d_max = g.max_degree();
        let width = d_max + 1;
        let m = S::from_count(n);

        let degree_counts = g.degree_counts();
        let degree_dist: Vec<S> =
            degree_counts.iter().map(|&c| S::from_count(c as usize) / m).collect();

        let mut end_counts = vec![0u64; width * width];
        for u in 0..n {
            let du = g.degree(u);
            for &v in g.neighbors(u) {
                end_counts[du * width + g.degree(v as usize)] += 1;
            }
        }
        let total_ends = S::from_count(2 * g.edge_count());
        let joint_edge_dist: Vec<S> =
            end_counts.iter().map(|&c| S::from_count(c as usize) / total_ends).collect();

        // q as the row marginal of e; identical to k P(k)/k_bar on a census.
        let mut neighbor_degree_dist = vec![S::zero(); width];
        for k in 0..width {
            neighbor_degree_dist[k] =
                (0..width).map(|kp| joint_edge_dist[k * width + kp]).sum();
        }

        let mean_degree: S =
            (1..width).map(|k| S::from_count(k) * degree_dist[k]).sum();

        let mut conditional = vec![S::zero(); width * width];
        for kp in 0..width {
            let q_kp = neighbor_degree_dist[kp];
            if q_kp > S::zero() {
                for k in 0..width {
                    conditional[k * width + kp] = joint_edge_dist[k * width + kp] / q_kp;
                }
            }
        }

        let mut z_weights = vec![S::zero(); width];
        for k in 0..width {
            z_weights[k] = (1..width)
                .map(|kp| degree_dist[kp] * conditional[k * width + kp])
                .sum();
        }

        let mean_q: S = (1..width).map(|k| S::from_count(k) * neighbor_degree_dist[k]).sum();
        let var_q: S = (1..width)
            .map(|k| {
                let d = S::from_count(k) - mean_q;
                d * d * neighbor_degree_dist[k]
            })
            .sum();
        let sigma_q = var_q.max(S::zero()).sqrt();

        let degenerate_degrees = sigma_q == S::zero();
        let assortativity = if degenerate_degrees {
            S::zero()
        } else {
            let mut acc = S::zero();
            for k in 1..width {
                for kp in 1..width {
                    let centered = joint_edge_dist[k * width + kp]
                        - neighbor_degree_dist[k] * neighbor_degree_dist[kp];
                    acc = acc + S::from_count(k) * S::from_count(kp) * centered;
                }
            }
            acc / var_q
        };

        let var_k: S = (1..width)
            .map(|k| {
                let d = S::from_count(k) - mean_degree;
                d * d * degree_dist[k]
            })
            .sum();
        let sigma_k = var_k.max(S::zero()).sqrt();

        let infected_nodes = g.labels().iter().filter(|&&s| s == 1).count();
        let infected_fraction = S::from_count(infected_nodes) / m;
        let var_s = infected_fraction * (S::one() - infected_fraction);
        let sigma_s = var_s.max(S::zero()).sqrt();

        let degenerate_labels = sigma_s == S::zero() || sigma_k == S::zero();
        let degree_label_corr = if degenerate_labels {
            S::zero()
        } else {
            // cov(d, s) = E[d s] - E[d] E[s], by node census.
            let mean_ds: S = (0..n)
                .filter(|&v| g.label(v) == 1)
                .map(|v| S::from_count(g.degree(v)))
                .sum::<S>()
                / m;
            (mean_ds - mean_degree * infected_fraction) / (sigma_k * sigma_s)
        };

        DegreeStats {
            max_degree: d_max,
            degree_counts,
            degree_dist,
            neighbor_degree_dist,
            joint_edge_dist,
            conditional,
            z_weights,
            mean_degree,
            assortativity,
            degree_label_corr,
            sigma_q,
            sigma_k,
            sigma_s,
            infected_fraction,
            degenerate_degrees,
            degenerate_labels,
        }
    }

    /// Builds synthetic statistics from a joint edge-end distribution
    /// e(k,k') alone (must be symmetric with zero row/column 0). The degree
    /// distribution is recovered from the marginal: P(k) proportional to
    /// q(k)/k. Label-related fields are reported degenerate.
    pub fn from_joint_edge_dist(e: &[Vec<S>]) -> DegreeStats<S> {
        let width = e.len();
        assert!(width >= 2, "need at least degree 1");
        let mut joint = vec![S::zero(); width * width];
        let mut total = S::zero();
        for (k, row) in e.iter().enumerate() {
            assert_eq!(row.len(), width, "e must be square");
            for (kp, &v) in row.iter().enumerate() {
                assert!(v >= S::zero(), "e must be nonnegative");
                assert!(
                    (v - e[kp][k]).abs() <= S::from_f64_lossy(1e-12),
                    "e must be symmetric"
                );
                joint[k * width + kp] = v;
                total = total + v;
            }
        }
        assert!(total > S::zero(), "e must have positive mass");
        for v in joint.iter_mut() {
            *v = *v / total;
        }

        let mut q = vec![S::zero(); width];
        for k in 0..width {
            q[k] = (0..width).map(|kp| joint[k * width + kp]).sum();
        }
        assert!(q[0] == S::zero(), "degree 0 must carry no edge-end mass");

        // P(k) = (q(k)/k) / sum_j q(j)/j, and k_bar is the normalizer inverse.
        let inv_kbar: S = (1..width).map(|k| q[k] / S::from_count(k)).sum();
        let mean_degree = S::one() / inv_kbar;
        let mut p = vec![S::zero(); width];
        for k in 1..width {
            p[k] = q[k] / S::from_count(k) / inv_kbar;
        }

        let mut conditional = vec![S::zero(); width * width];
        for kp in 0..width {
            if q[kp] > S::zero() {
                for k in 0..width {
                    conditional[k * width + kp] = joint[k * width + kp] / q[kp];
                }
            }
        }
        let mut z_weights = vec![S::zero(); width];
        for k in 0..width {
            z_weights[k] = (1..width).map(|kp| p[kp] * conditional[k * width + kp]).sum();
        }

        let mean_q: S = (1..width).map(|k| S::from_count(k) * q[k]).sum();
        let var_q: S = (1..width)
            .map(|k| {
                let d = S::from_count(k) - mean_q;
                d * d * q[k]
            })
            .sum();
        let sigma_q = var_q.max(S::zero()).sqrt();
        let degenerate_degrees = sigma_q == S::zero();
        let assortativity = if degenerate_degrees {
            S::zero()
        } else {
            let mut acc = S::zero();
            for k in 1..width {
                for kp in 1..width {
                    let centered = joint[k * width + kp] - q[k] * q[kp];
                    acc = acc + S::from_count(k) * S::from_count(kp) * centered;
                }
            }
            acc / var_q
        };
        let var_k: S = (1..width)
            .map(|k| {
                let d = S::from_count(k) - mean_degree;
                d * d * p[k]
            })
            .sum();

        DegreeStats {
            max_degree: width - 1,
            degree_counts: vec![0; width],
            degree_dist: p,
            neighbor_degree_dist: q,
            joint_edge_dist: joint,
            conditional,
            z_weights,
            mean_degree,
            assortativity,
            degree_label_corr: S::zero(),
            sigma_q,
            sigma_k: var_k.max(S::zero()).sqrt(),
            sigma_s: S::zero(),
            infected_fraction: S::zero(),
            degenerate_degrees,
            degenerate_labels: true,
        }
    }

    pub fn width(&self) -> usize {
        self.max_degree + 1
    }

    /// e(k, k').
    pub fn joint(&self, k: usize, kp: usize) -> S {
        self.joint_edge_dist[k * self.width() + kp]
    }

    /// P(k | k').
    pub fn conditional(&self, k: usize, kp: usize) -> S {
        self.conditional[k * self.width() + kp]
    }

    /// E[d(X)] = k_bar.
    pub fn expected_degree_x(&self) -> S {
        self.mean_degree
    }

    /// E[d(Y)] = sum_k k q(k).
    pub fn expected_degree_y(&self) -> S {
        (1..self.width())
            .map(|k| S::from_count(k) * self.neighbor_degree_dist[k])
            .sum()
    }

    /// E[d(Z)] = sum_k k w_Z(k).
    pub fn expected_degree_z(&self) -> S {
        (1..self.width()).map(|k| S::from_count(k) * self.z_weights[k]).sum()
    }

    /// Degree classes with at least one node (from graph censuses).
    pub fn support(&self) -> Vec<usize> {
        (1..self.width()).filter(|&k| self.degree_dist[k] > S::zero()).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::testutil::{cycle, path3, star};

    fn assert_close(a: f64, b: f64, tol: f64) {
        assert!((a - b).abs() <= tol, "|{a} - {b}| > {tol}");
    }

    #[test]
    fn star_census_matches_hand_enumeration() {
        // 4 edges, 8 edge-ends; hub has degree 4, leaves degree 1.
        let s: DegreeStats<f64> = star(4).stats();
        assert_eq!(s.max_degree, 4);
        assert_close(s.degree_dist[1], 0.8, 1e-15);
        assert_close(s.degree_dist[4], 0.2, 1e-15);
        assert_close(s.neighbor_degree_dist[1], 0.5, 1e-15);
        assert_close(s.neighbor_degree_dist[4], 0.5, 1e-15);
        assert_close(s.mean_degree, 1.6, 1e-15);
        assert_close(s.assortativity, -1.0, 1e-12);
        assert_close(s.expected_degree_x(), 1.6, 1e-15);
        assert_close(s.expected_degree_y(), 2.5, 1e-15);
        assert_close(s.expected_degree_z(), 3.4, 1e-12);
        assert_close(s.z_weights[4], 0.8, 1e-12);
        assert_close(s.z_weights[1], 0.2, 1e-12);
    }

    #[test]
    fn regular_graph_is_degree_degenerate() {
        let s: DegreeStats<f64> = cycle(6).stats();
        assert!(s.degenerate_degrees);
        assert_eq!(s.assortativity, 0.0);
        assert_close(s.neighbor_degree_dist[2], 1.0, 1e-15);
    }

    #[test]
    fn path3_label_census() {
        let g = path3().with_labels(vec![0, 1, 0]).unwrap();
        let s: DegreeStats<f64> = g.stats();
        assert_close(s.mean_degree, 4.0 / 3.0, 1e-15);
        // cov(s, d) = E[ds] - E[s]E[d] = 2/3 - (1/3)(4/3) = 2/9,
        // sigma_k = sigma_s = sqrt(2)/3, so p_ks = 1.
        assert_close(s.degree_label_corr, 1.0, 1e-12);
        assert!(!s.degenerate_labels);
    }

    #[test]
    fn q_identity_holds_exactly() {
        let g = star(7);
        let s: DegreeStats<f64> = g.stats();
        for k in 1..s.width() {
            let expected = k as f64 * s.degree_dist[k] / s.mean_degree;
            assert_close(s.neighbor_degree_dist[k], expected, 1e-15);
        }
    }

    #[test]
    fn assortativity_matches_pearson_over_edge_ends() {
        // Cross-check the definitional double sum against the Pearson
        // correlation of degree pairs over directed edge-ends.
        let g = Graph::from_edges(
            6,
            &[(0, 1), (0, 2), (0, 3), (1, 2), (3, 4), (4, 5), (2, 5)],
        )
        .unwrap();
        let s: DegreeStats<f64> = g.stats();
        let mut pairs = Vec::new();
        for u in 0..g.node_count() {
            for &v in g.neighbors(u) {
                pairs.push((g.degree(u) as f64, g.degree(v as usize) as f64));
            }
        }
        let n = pairs.len() as f64;
        let mx = pairs.iter().map(|p| p.0).sum::<f64>() / n;
        let my = pairs.iter().map(|p| p.1).sum::<f64>() / n;
        let cov = pairs.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum::<f64>() / n;
        let vx = pairs.iter().map(|p| (p.0 - mx).powi(2)).sum::<f64>() / n;
        let vy = pairs.iter().map(|p| (p.1 - my).powi(2)).sum::<f64>() / n;
        let pearson = cov / (vx.sqrt() * vy.sqrt());
        assert_close(s.assortativity, pearson, 1e-10);
    }

    #[test]
    fn synthetic_uncorrelated_joint_yields_z_equal_q() {
        // e = q (x) q has conditional independent of k'.
        let q = [0.0, 0.25, 0.0, 0.75];
        let mut e = vec![vec![0.0; 4]; 4];
        for k in 0..4 {
            for kp in 0..4 {
                e[k][kp] = q[k] * q[kp];
            }
        }
        let s: DegreeStats<f64> = DegreeStats::from_joint_edge_dist(&e);
        for k in 1..4 {
            assert_close(s.z_weights[k], q[k], 1e-14);
        }
        assert_close(s.assortativity, 0.0, 1e-12);
        // P recovered from q: P(k) ~ q(k)/k -> 0.25/1, 0.75/3 = 0.25 each -> 0.5/0.5.
        assert_close(s.degree_dist[1], 0.5, 1e-14);
        assert_close(s.degree_dist[3], 0.5, 1e-14);
        assert_close(s.mean_degree, 2.0, 1e-14);
    }

    #[test]
    fn census_works_in_single_precision() {
        let s: DegreeStats<f32> = DegreeStats::from_graph(&star(4));
        assert!((s.mean_degree - 1.6f32).abs() < 1e-6);
        assert!((s.expected_degree_z() - 3.4f32).abs() < 1e-5);
        assert!((s.assortativity + 1.0f32).abs() < 1e-5);
    }

    use crate::graph::Graph;
}
