//! Optimal single-period portfolio weights for an investor with power
//! (CRRA) utility `U(W) = W^{1-gamma} / (1-gamma)` facing jointly normal
//! excess returns `R ~ N(mu, Sigma)` and a risk-free gross return `R_f`.
//!
//! Three allocation methods are provided:
//!
//! * [`closed_form::solve_analytical`]: weights `c * Sigma^{-1} mu` from a
//!   log-normal approximation of terminal wealth, valid for
//!   `gamma >= 1 + 4 mu' Sigma^{-1} mu`.
//! * [`gradient::gd_solve`]: gradient ascent on the sample-average utility
//!   over simulated scenarios.
//! * [`taylor::taylor_solve`]: fixed-point iteration on the first-order
//!   condition of a fourth-order Taylor expansion of expected utility.
//!
//! [`compare`] runs all three on one scenario set and tabulates the
//! realised utility distribution.

// Negated float comparisons are used on purpose so that NaN fails checks.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod benchmark;
pub mod cli;
pub mod closed_form;
pub mod compare;
pub mod error;
pub mod gradient;
pub mod io;
pub mod linalg;
pub mod market;
pub mod reduce;
pub mod simulation;
pub mod stats;
pub mod taylor;
mod utility;

pub use closed_form::{
    frontier_point, solve_analytical, tangency, ClosedFormSolution, FrontierPoint, TangencyResult,
};
pub use compare::{compare, compare_on, CompareConfig, ComparisonReport};
pub use error::{Error, Result};
pub use gradient::{gd_solve, v0, v0_gradient, v0_hessian, GdConfig, GdReport, LearningRate};
pub use market::{estimate_params, gamma_lower_bound, make_params, MarketParams, PriceSeries, RiskAversion};
pub use simulation::{evaluate_strategy, simulate, Method, ScenarioSet, StrategyOutcome};
pub use stats::{ecdf, summarize, EcdfPoint, SummaryStats};
pub use taylor::{taylor_solve, TaylorConfig, TaylorReport, TaylorStart};
pub use utility::crra_utility;

pub(crate) fn ser_dvec<S: serde::Serializer>(
    v: &nalgebra::DVector<f64>,
    s: S,
) -> std::result::Result<S::Ok, S::Error> {
    s.collect_seq(v.iter())
}
