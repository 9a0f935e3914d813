//! Quadratic polynomial dynamics f(x) = A0 + A1 x + A2 x x' and the
//! construction of the mean-field instance.

use crate::graph::DegreeStats;
use crate::linalg::Mat;
use crate::meanfield::{rule_weights, MfdParams};
use crate::scalar::Scalar;

/// Dense order-3 tensor, row-major over (out, j1, j2).
#[derive(Debug, Clone, PartialEq)]
pub struct Tensor3<S> {
    dim_out: usize,
    dim_in: usize,
    data: Vec<S>,
}

impl<S: Scalar> Tensor3<S> {
    pub fn zeros(dim_out: usize, dim_in: usize) -> Tensor3<S> {
        Tensor3 { dim_out, dim_in, data: vec![S::zero(); dim_out * dim_in * dim_in] }
    }

    pub fn get(&self, r: usize, i: usize, j: usize) -> S {
        self.data[(r * self.dim_in + i) * self.dim_in + j]
    }

    pub fn set(&mut self, r: usize, i: usize, j: usize, value: S) {
        self.data[(r * self.dim_in + i) * self.dim_in + j] = value;
    }

    /// The slice A2(r, ., .) as a matrix Q_r.
    pub fn slice(&self, r: usize) -> Mat<S> {
        let mut q = Mat::zeros(self.dim_in, self.dim_in);
        for i in 0..self.dim_in {
            for j in 0..self.dim_in {
                q[(i, j)] = self.get(r, i, j);
            }
        }
        q
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|&v| v == S::zero())
    }
}

/// f(x) = A0 + A1 x + A2 x x'.
#[derive(Debug, Clone)]
pub struct PolynomialDynamics<S> {
    pub a0: Vec<S>,
    pub a1: Mat<S>,
    pub a2: Tensor3<S>,
    /// Degree class of each state coordinate (empty for abstract systems).
    pub classes: Vec<usize>,
}

impl<S: Scalar> PolynomialDynamics<S> {
    pub fn new(a0: Vec<S>, a1: Mat<S>, a2: Tensor3<S>) -> PolynomialDynamics<S> {
        let dim = a0.len();
        assert_eq!(a1.rows(), dim);
        assert_eq!(a1.cols(), dim);
        assert_eq!(a2.dim_out, dim);
        assert_eq!(a2.dim_in, dim);
        PolynomialDynamics { a0, a1, a2, classes: Vec::new() }
    }

    /// Linear system A0 + A1 x (A2 = 0).
    pub fn linear(a0: Vec<S>, a1: Mat<S>) -> PolynomialDynamics<S> {
        let dim = a0.len();
        PolynomialDynamics::new(a0, a1, Tensor3::zeros(dim, dim))
    }

    pub fn dim(&self) -> usize {
        self.a0.len()
    }

    pub fn eval(&self, x: &[S]) -> Vec<S> {
        assert_eq!(x.len(), self.dim());
        let mut out = self.a0.clone();
        for r in 0..self.dim() {
            let mut acc = out[r];
            for j in 0..self.dim() {
                acc = acc + self.a1[(r, j)] * x[j];
            }
            for i in 0..self.dim() {
                if x[i] == S::zero() {
                    continue;
                }
                for j in 0..self.dim() {
                    acc = acc + self.a2.get(r, i, j) * x[i] * x[j];
                }
            }
            out[r] = acc;
        }
        out
    }
}

/// Encodes one mean-field tick
/// x'(k) = x(k) + (1/M)[(1 - x(k)) nu k theta / D - delta x(k)]
/// over the occupied degree classes:
/// A0 = 0, A1(k,j) = delta_kj (1 - delta/M) + (nu k/(M D)) w_j,
/// A2(k,k,j) = -(nu k/(M D)) w_j.
pub fn build_dynamics<S: Scalar>(
    stats: &DegreeStats<S>,
    params: &MfdParams<S>,
) -> PolynomialDynamics<S> {
    let classes = stats.support();
    let dim = classes.len();
    let weights = rule_weights(stats, params.rule);
    let m = S::from_count(params.m);
    let d = S::from_count(stats.max_degree);

    let a0 = vec![S::zero(); dim];
    let mut a1 = Mat::zeros(dim, dim);
    let mut a2 = Tensor3::zeros(dim, dim);
    for (i, &k) in classes.iter().enumerate() {
        let gain = params.nu * S::from_count(k) / (m * d);
        for (j, &kj) in classes.iter().enumerate() {
            a1[(i, j)] = gain * weights[kj];
            a2.set(i, i, j, -(gain * weights[kj]));
        }
        a1[(i, i)] = a1[(i, i)] + S::one() - params.delta / m;
    }
    let mut dynamics = PolynomialDynamics::new(a0, a1, a2);
    dynamics.classes = classes;
    dynamics
}
