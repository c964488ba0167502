//! Simulation and verification toolkit for Glivenko-Cantelli behaviour of
//! stationary dependent sequences.
//!
//! * [`generators`]: iid, associated (Gaussian AR(1), moving average) and
//!   phi-mixing (finite Markov chain) sequence models.
//! * [`empirical`]: empirical measures, exact Kolmogorov-Smirnov
//!   sup-deviations and bracket upper bounds.
//! * [`entropy`]: bracketing nets, brute-force shattering and VC indices.
//! * [`conditions`]: normalised-variance, Cesaro and mixing-rate conditions.
//! * [`inequalities`]: covariance inequalities for associated and mixing pairs.
//! * [`montecarlo`]: replicated convergence studies and condition suites.

// `!(x > 0.0)` style guards are used on purpose: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod conditions;
pub mod empirical;
pub mod entropy;
pub mod error;
pub mod generators;
pub mod inequalities;
pub mod montecarlo;
pub mod numeric;
pub mod rng;

pub use error::{Error, Result};
pub use conditions::{ConditionReport, LagCovariance, Verdict};
pub use empirical::{DeviationPath, Observable};
pub use generators::{Cdf, EstimateMode, Marginal, MarkovChainSpec, Path, StationaryModel};
pub use inequalities::{BivariatePair, InequalityVerdict};
pub use montecarlo::{ExperimentSpec, ModelSpec};
