//! Infected population state indexed by degree class.

use crate::graph::Graph;
use crate::scalar::Scalar;

/// x(k): infected fraction per degree class k in {1..D}. Vectors are dense
/// over 0..=D with index 0 unused; classes with no nodes carry x(k) = 0.
#[derive(Debug, Clone, PartialEq)]
pub struct PopulationState<S> {
    x: Vec<S>,
    /// M(k) when the state came from a node census.
    counts: Option<Vec<u64>>,
}

impl<S: Scalar> PopulationState<S> {
    /// Census of the graph's current labels.
    pub fn from_graph(g: &Graph) -> PopulationState<S> {
        let width = g.max_degree() + 1;
        let mut infected = vec![0u64; width];
        let mut counts = vec![0u64; width];
        for v in 0..g.node_count() {
            let k = g.degree(v);
            counts[k] += 1;
            infected[k] += g.label(v) as u64;
        }
        let x = counts
            .iter()
            .zip(&infected)
            .map(|(&m, &i)| {
                if m == 0 {
                    S::zero()
                } else {
                    S::from_count(i as usize) / S::from_count(m as usize)
                }
            })
            .collect();
        PopulationState { x, counts: Some(counts) }
    }

    /// Mean-field state from raw per-class fractions (index 0 unused).
    pub fn from_fractions(x: Vec<S>) -> PopulationState<S> {
        assert!(
            x.iter().all(|&v| v >= S::zero() && v <= S::one()),
            "fractions must lie in [0, 1]"
        );
        PopulationState { x, counts: None }
    }

    /// For mean-field iterates, which may sit within numerical tolerance of
    /// the [0, 1] boundary; range checking is the caller's responsibility.
    pub(crate) fn from_fractions_unchecked(x: Vec<S>) -> PopulationState<S> {
        PopulationState { x, counts: None }
    }

    /// Constant state c over degree classes 1..=d_max.
    pub fn constant(c: S, d_max: usize) -> PopulationState<S> {
        let mut x = vec![c; d_max + 1];
        x[0] = S::zero();
        PopulationState { x, counts: None }
    }

    pub fn zeros(d_max: usize) -> PopulationState<S> {
        PopulationState { x: vec![S::zero(); d_max + 1], counts: None }
    }

    /// Largest representable degree class.
    pub fn max_degree(&self) -> usize {
        self.x.len().saturating_sub(1)
    }

    pub fn get(&self, k: usize) -> S {
        self.x.get(k).copied().unwrap_or_else(S::zero)
    }

    pub fn fractions(&self) -> &[S] {
        &self.x
    }

    pub fn fractions_mut(&mut self) -> &mut [S] {
        &mut self.x
    }

    /// M(k), present only for census states.
    pub fn class_counts(&self) -> Option<&[u64]> {
        self.counts.as_deref()
    }

    /// Degree classes with M(k) > 0 (census states only).
    pub fn support(&self) -> Option<Vec<usize>> {
        self.counts.as_ref().map(|c| {
            (1..c.len()).filter(|&k| c[k] > 0).collect()
        })
    }

    /// sup-norm distance over the union of the two supports.
    pub fn max_abs_diff(&self, other: &PopulationState<S>) -> S {
        let width = self.x.len().max(other.x.len());
        (0..width)
            .map(|k| (self.get(k) - other.get(k)).abs())
            .fold(S::zero(), S::max)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::testutil::star;

    #[test]
    fn census_of_star_with_infected_hub() {
        let g = star(4).with_labels(vec![1, 0, 0, 0, 0]).unwrap();
        let x: PopulationState<f64> = PopulationState::from_graph(&g);
        assert_eq!(x.get(4), 1.0);
        assert_eq!(x.get(1), 0.0);
        assert_eq!(x.support().unwrap(), vec![1, 4]);
        let counts = x.class_counts().unwrap();
        assert_eq!(counts[1], 4);
        assert_eq!(counts[4], 1);
    }

    #[test]
    fn all_susceptible_is_zero() {
        let x: PopulationState<f64> = PopulationState::from_graph(&star(5));
        assert!(x.fractions().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn census_fractions_times_counts_are_integral() {
        let g = star(9).with_labels(vec![1, 1, 0, 1, 0, 0, 0, 1, 0, 0]).unwrap();
        let x: PopulationState<f64> = PopulationState::from_graph(&g);
        let counts = x.class_counts().unwrap();
        for k in 1..=x.max_degree() {
            if counts[k] > 0 {
                let prod = x.get(k) * counts[k] as f64;
                assert!((prod - prod.round()).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn max_abs_diff_handles_different_widths() {
        let a: PopulationState<f64> = PopulationState::constant(0.5, 3);
        let b: PopulationState<f64> = PopulationState::constant(0.25, 5);
        assert_eq!(a.max_abs_diff(&b), 0.25);
    }
}
