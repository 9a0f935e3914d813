//! Gaussian filter recursion for the quadratic dynamics: exact-moment
//! prediction, standard gain update in Joseph form.

use std::fmt;

use crate::linalg::Mat;
use crate::scalar::Scalar;
use crate::tracking::dynamics::PolynomialDynamics;
use crate::tracking::moments::gaussian_quadratic_moments;

#[derive(Debug)]
pub enum TrackingError {
    DimensionMismatch(String),
    /// Predicted covariance had an eigenvalue below -1e-8.
    NotPositiveSemidefinite { min_eigenvalue: f64 },
    /// The innovation covariance R + C H C' is not positive definite.
    SingularInnovation,
    InvalidParameter(String),
}

impl fmt::Display for TrackingError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TrackingError::DimensionMismatch(msg) => write!(f, "dimension mismatch: {msg}"),
            TrackingError::NotPositiveSemidefinite { min_eigenvalue } => {
                write!(f, "covariance not PSD within tolerance: min eigenvalue {min_eigenvalue}")
            }
            TrackingError::SingularInnovation => write!(f, "singular innovation covariance"),
            TrackingError::InvalidParameter(msg) => write!(f, "invalid parameter: {msg}"),
        }
    }
}

impl std::error::Error for TrackingError {}

/// Gaussian belief over the population state.
#[derive(Debug, Clone)]
pub struct FilterState<S> {
    pub mean: Vec<S>,
    pub cov: Mat<S>,
}

impl<S: Scalar> FilterState<S> {
    pub fn new(mean: Vec<S>, cov: Mat<S>) -> FilterState<S> {
        assert_eq!(mean.len(), cov.rows());
        assert_eq!(cov.rows(), cov.cols());
        FilterState { mean, cov }
    }

    pub fn dim(&self) -> usize {
        self.mean.len()
    }

    /// Per-coordinate standard deviations.
    pub fn stds(&self) -> Vec<S> {
        (0..self.dim()).map(|i| self.cov[(i, i)].max(S::zero()).sqrt()).collect()
    }
}

/// Tolerance for the PSD repair in the prediction step.
const PSD_REPAIR_TOL: f64 = 1e-8;

/// Time update: mean <- `E[f(x)]`, cov <- `E[ff'] - E[f]E[f]' + Q`, with the
/// expectations taken in closed form under the Gaussian belief. The output
/// covariance is symmetrized and floor-repaired; an eigenvalue below
/// -1e-8 is an error.
pub fn predict<S: Scalar>(
    state: &FilterState<S>,
    dynamics: &PolynomialDynamics<S>,
    process_noise: &Mat<S>,
) -> Result<FilterState<S>, TrackingError> {
    if dynamics.dim() != state.dim() {
        return Err(TrackingError::DimensionMismatch(format!(
            "dynamics dim {} vs state dim {}",
            dynamics.dim(),
            state.dim()
        )));
    }
    if process_noise.rows() != state.dim() || process_noise.cols() != state.dim() {
        return Err(TrackingError::DimensionMismatch("process noise shape".into()));
    }
    let (e_f, e_ff) = gaussian_quadratic_moments(&state.mean, &state.cov, dynamics);
    let dim = state.dim();
    let mut cov = Mat::zeros(dim, dim);
    for r in 0..dim {
        for s in 0..dim {
            cov[(r, s)] = e_ff[(r, s)] - e_f[r] * e_f[s] + process_noise[(r, s)];
        }
    }
    let cov = psd_repair(&cov.symmetrized())?;
    Ok(FilterState { mean: e_f, cov })
}

fn psd_repair<S: Scalar>(cov: &Mat<S>) -> Result<Mat<S>, TrackingError> {
    let (eig, v) = cov.symmetric_eigen();
    let min_eig = eig.iter().copied().fold(S::infinity(), S::min);
    if min_eig >= S::zero() {
        return Ok(cov.clone());
    }
    if min_eig < S::from_f64_lossy(-PSD_REPAIR_TOL) {
        return Err(TrackingError::NotPositiveSemidefinite {
            min_eigenvalue: min_eig.to_f64().unwrap_or(f64::NAN),
        });
    }
    let clamped: Vec<S> = eig.into_iter().map(|e| e.max(S::zero())).collect();
    Ok(v.matmul(&Mat::from_diag(&clamped)).matmul(&v.transpose()).symmetrized())
}

/// Measurement update with gain K = H C'(R + C H C')^-1 and the Joseph-form
/// covariance (I - KC) H (I - KC)' + K R K'.
pub fn update<S: Scalar>(
    prior: &FilterState<S>,
    y: &[S],
    c: &Mat<S>,
    r: &Mat<S>,
) -> Result<FilterState<S>, TrackingError> {
    let dim = prior.dim();
    let obs = y.len();
    if c.rows() != obs || c.cols() != dim || r.rows() != obs || r.cols() != obs {
        return Err(TrackingError::DimensionMismatch(format!(
            "observation dims: y {obs}, C {}x{}, R {}x{}",
            c.rows(),
            c.cols(),
            r.rows(),
            r.cols()
        )));
    }
    // S_inn = R + C H C'.
    let hc_t = prior.cov.matmul(&c.transpose());
    let s_inn = r.add(&c.matmul(&hc_t)).symmetrized();
    // K = H C' S^-1, via the SPD solve S K' = (H C')'.
    let k_t = s_inn
        .spd_solve(&hc_t.transpose())
        .ok_or(TrackingError::SingularInnovation)?;
    let k = k_t.transpose();

    let c_mean = c.matvec(&prior.mean);
    let innovation: Vec<S> = (0..obs).map(|i| y[i] - c_mean[i]).collect();
    let correction = k.matvec(&innovation);
    let mean: Vec<S> = (0..dim).map(|i| prior.mean[i] + correction[i]).collect();

    let i_kc = Mat::identity(dim).sub(&k.matmul(c));
    let cov = i_kc
        .matmul(&prior.cov)
        .matmul(&i_kc.transpose())
        .add(&k.matmul(r).matmul(&k.transpose()))
        .symmetrized();
    Ok(FilterState { mean, cov })
}

/// Normalized innovation squared (y - C x)' S^-1 (y - C x); its long-run
/// average should sit near the observation dimension for a consistent
/// filter.
pub fn normalized_innovation_squared<S: Scalar>(
    prior: &FilterState<S>,
    y: &[S],
    c: &Mat<S>,
    r: &Mat<S>,
) -> Result<S, TrackingError> {
    let s_inn = r.add(&c.matmul(&prior.cov.matmul(&c.transpose()))).symmetrized();
    let c_mean = c.matvec(&prior.mean);
    let innovation: Vec<S> = (0..y.len()).map(|i| y[i] - c_mean[i]).collect();
    let mut rhs = Mat::zeros(y.len(), 1);
    for i in 0..y.len() {
        rhs[(i, 0)] = innovation[i];
    }
    let solved = s_inn.spd_solve(&rhs).ok_or(TrackingError::SingularInnovation)?;
    Ok((0..y.len()).map(|i| innovation[i] * solved[(i, 0)]).sum())
}
