//! Stationary sequence models with known dependence structure and
//! reproducible samplers.
//!
//! Associated families are built constructively: Gaussian AR(1) with
//! `rho >= 0` and nonnegative-weight moving averages of iid Gaussian noise.
//! The phi-mixing family is the finite-state stationary Markov chain.

mod bivariate;
mod marginal;
mod markov;
mod model;

pub use bivariate::{normal_joint_cdf, normal_orthant_covariance, QUADRATURE_TOL};
pub use marginal::{Cdf, FnCdf, Marginal};
pub use markov::MarkovChainSpec;
pub use model::{CovarianceEstimate, EstimateMode, ModelKind, Path, SampleBudget, StationaryModel};
