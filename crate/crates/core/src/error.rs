use thiserror::Error;

use crate::gradient::GdReport;
use crate::taylor::TaylorReport;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("non-finite input in {0}")]
    NonFiniteInput(&'static str),

    #[error("covariance matrix is not symmetric (max deviation {deviation:e})")]
    NotSymmetric { deviation: f64 },

    #[error("covariance matrix is not positive definite")]
    NotPositiveDefinite,

    #[error("gross risk-free return must be positive, got {0}")]
    NonPositiveRiskFree(f64),

    #[error("need at least 3 price rows, got {0}")]
    TooFewObservations(usize),

    #[error("price at row {row}, column {col} is not strictly positive")]
    NonPositivePrice { row: usize, col: usize },

    #[error("missing or unparsable value at row {row}, column {col}")]
    MissingValue { row: usize, col: usize },

    #[error("dates must be strictly increasing (row {0})")]
    DatesNotIncreasing(usize),

    #[error("invalid date {value:?} at row {row}")]
    InvalidDate { row: usize, value: String },

    #[error("risk aversion must be positive and different from one, got {0}")]
    InvalidRiskAversion(f64),

    #[error("risk aversion {gamma} is below the lower bound 1+4J = {bound}")]
    GammaBelowBound { gamma: f64, bound: f64 },

    #[error("mean vector is (numerically) zero, J = {0:e}")]
    DegenerateMu(f64),

    #[error("R_f + w'mu must be positive, got {0}")]
    NonPositiveGrossMean(f64),

    #[error("1'Sigma^-1 mu is (numerically) zero: {0:e}")]
    SingularDenominator(f64),

    #[error("scenario {0} yields non-positive wealth")]
    NonPositiveWealthScenario(usize),

    #[error("step halving exhausted without reaching a feasible ascent point")]
    StepIntoInfeasible,

    #[error("gradient ascent did not converge after {} iterations (|grad| = {:e})", .0.iterations, .0.final_gradient_norm)]
    GdNotConverged(Box<GdReport>),

    #[error("Taylor iteration did not converge after {} iterations", .0.iterations)]
    TaylorNotConverged(Box<TaylorReport>),

    #[error("sample second-moment matrix is singular")]
    SingularSecondMoment,

    #[error("iterate became non-finite")]
    NonFiniteIterate,

    #[error("every scenario yields non-positive wealth")]
    AllScenariosInfeasible,

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("csv: {0}")]
    Csv(#[from] csv::Error),

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),

    #[error("io: {0}")]
    Io(#[from] std::io::Error),
}
