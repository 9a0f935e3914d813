//! Network diffusion laboratory: discrete-time SIS dynamics on undirected
//! graphs, friendship-paradox based sampling and polling, degree-based
//! mean-field analysis with critical thresholds, reactive (state-dependent)
//! graph processes, and an exact-moment Gaussian filter for tracking the
//! infected population state.
//!
//! The numeric kernels are generic over the scalar type through
//! [`Scalar`] (any `num_traits::Float`, in practice `f32`/`f64`); the
//! stochastic simulators work in `f64`. Concrete `f64` aliases for the
//! generic types live at the crate root.

pub mod graph;
pub mod linalg;
pub mod meanfield;
pub mod polling;
pub mod population;
pub mod reactive;
pub mod sampling;
pub mod scalar;
pub mod seed;
pub mod sis;
pub mod tracking;

pub use graph::Graph;
pub use population::PopulationState;
pub use scalar::Scalar;

/// Degree statistics at the default simulation precision.
pub type DegreeStats = graph::DegreeStats<f64>;
/// Population state at the default simulation precision.
pub type PopState = population::PopulationState<f64>;
/// Mean-field parameters at the default simulation precision.
pub type MfdParams = meanfield::MfdParams<f64>;
/// Dense matrix at the default simulation precision.
pub type Mat = linalg::Mat<f64>;
/// Filter state at the default simulation precision.
pub type FilterState = tracking::FilterState<f64>;
/// Polynomial dynamics at the default simulation precision.
pub type PolynomialDynamics = tracking::PolynomialDynamics<f64>;

/// Single-precision variants of the numeric kernels.
pub type DegreeStats32 = graph::DegreeStats<f32>;
pub type PopState32 = population::PopulationState<f32>;
