//! Exact Gaussian moments of a quadratic map.
//!
//! For x ~ N(mu, Sigma) and f_r(x) = c_r + b_r'e + e'Q_r e with e = x - mu,
//!
//!   E[f_r]      = c_r + tr(Q_r Sigma)
//!   E[f_r f_s]  = c_r c_s + c_r t_s + c_s t_r + t_r t_s
//!               + b_r' Sigma b_s + tr(Q_r Sigma (Q_s + Q_s') Sigma)
//!
//! with t_r = tr(Q_r Sigma). The quartic term is Isserlis' theorem applied
//! to the quadratic forms; everything is closed form, no sampling and no
//! linearization.

use crate::linalg::{dot, Mat};
use crate::scalar::Scalar;
use crate::tracking::dynamics::PolynomialDynamics;

/// Returns (E[f(x)], E[f(x) f(x)']) for x ~ N(mean, cov).
pub fn gaussian_quadratic_moments<S: Scalar>(
    mean: &[S],
    cov: &Mat<S>,
    dynamics: &PolynomialDynamics<S>,
) -> (Vec<S>, Mat<S>) {
    let dim = dynamics.dim();
    assert_eq!(mean.len(), dim);
    assert_eq!(cov.rows(), dim);
    assert_eq!(cov.cols(), dim);

    // Per output row r: Q_r, c_r = a0_r + a1_r.mu + mu'Q_r mu,
    // b_r = a1_r + (Q_r + Q_r') mu.
    let mut q_mats = Vec::with_capacity(dim);
    let mut c = vec![S::zero(); dim];
    let mut b = Vec::with_capacity(dim);
    for r in 0..dim {
        let q = dynamics.a2.slice(r);
        let qsym_mu: Vec<S> = (0..dim)
            .map(|i| (0..dim).map(|j| (q[(i, j)] + q[(j, i)]) * mean[j]).sum())
            .collect();
        let a1_row = dynamics.a1.row(r);
        let mu_q_mu: S = (0..dim)
            .map(|i| (0..dim).map(|j| mean[i] * q[(i, j)] * mean[j]).sum::<S>())
            .sum();
        c[r] = dynamics.a0[r] + dot(a1_row, mean) + mu_q_mu;
        b.push((0..dim).map(|i| a1_row[i] + qsym_mu[i]).collect::<Vec<S>>());
        q_mats.push(q);
    }

    // t_r = tr(Q_r Sigma); Sigma b_r; G_s = Sigma (Q_s + Q_s') Sigma.
    let t: Vec<S> = q_mats
        .iter()
        .map(|q| {
            (0..dim)
                .map(|i| (0..dim).map(|j| q[(i, j)] * cov[(j, i)]).sum::<S>())
                .sum()
        })
        .collect();
    let cov_b: Vec<Vec<S>> = b.iter().map(|br| cov.matvec(br)).collect();
    let g_mats: Vec<Mat<S>> = q_mats
        .iter()
        .map(|q| {
            let qsym = q.add(&q.transpose());
            cov.matmul(&qsym).matmul(cov)
        })
        .collect();

    let e_f: Vec<S> = (0..dim).map(|r| c[r] + t[r]).collect();
    let mut e_ff = Mat::zeros(dim, dim);
    for r in 0..dim {
        for s in r..dim {
            // tr(Q_r G_s) with G_s symmetric.
            let quartic: S = (0..dim)
                .map(|i| (0..dim).map(|j| q_mats[r][(i, j)] * g_mats[s][(i, j)]).sum::<S>())
                .sum();
            let v = c[r] * c[s]
                + c[r] * t[s]
                + c[s] * t[r]
                + t[r] * t[s]
                + dot(&b[r], &cov_b[s])
                + quartic;
            e_ff[(r, s)] = v;
            e_ff[(s, r)] = v;
        }
    }
    (e_f, e_ff)
}
