//! Weekly moments of the DAX index, Nasdaq futures and Russell 2000 futures
//! (16 Jan 2012 to 9 Sep 2019) as quoted to three significant digits, with a
//! weekly risk-free rate of 0.06%.
//!
//! Two readings of the quoted mean vector are provided. [`excess_params`]
//! subtracts `r_f` from the quoted weekly means. [`study_params`] uses the
//! quoted means directly as the excess-return mean; this is the reading
//! under which the simulated utility statistics of the comparison study are
//! reproduced.

use nalgebra::{DMatrix, DVector};

use crate::market::{make_params, MarketParams};

pub const RISK_FREE: f64 = 0.0006;

pub const WEEKLY_MEANS: [f64; 3] = [0.00134, 0.00231, 0.00139];

pub const WEEKLY_COVARIANCE: [[f64; 3]; 3] = [
    [0.000545, 0.000319, 0.000341],
    [0.000319, 0.000410, 0.000393],
    [0.000341, 0.000393, 0.000487],
];

pub const ASSET_NAMES: [&str; 3] = ["DAX", "NASDAQ_FUT", "RUSSELL2000_FUT"];

/// Lower bound `1 + 4J` reported alongside the quoted moments.
pub const REPORTED_GAMMA_BOUND: f64 = 1.076384;

fn build(mu: [f64; 3]) -> MarketParams {
    let sigma = DMatrix::from_fn(3, 3, |r, c| WEEKLY_COVARIANCE[r][c]);
    make_params(DVector::from_row_slice(&mu), sigma, RISK_FREE)
        .and_then(|p| p.with_asset_names(ASSET_NAMES.iter().map(|s| s.to_string()).collect()))
        .expect("benchmark covariance is positive definite")
}

/// Mean excess return `mean - r_f`: `[0.00074, 0.00171, 0.00079]`.
pub fn excess_params() -> MarketParams {
    build(WEEKLY_MEANS.map(|m| m - RISK_FREE))
}

/// Quoted means used as-is for the excess-return mean.
pub fn study_params() -> MarketParams {
    build(WEEKLY_MEANS)
}

/// Risk-aversion levels of the comparison study.
pub const STUDY_GAMMAS: [f64; 4] = [5.0, 10.0, 15.0, 20.0];

/// Scenario count of the comparison study.
pub const STUDY_SAMPLES: usize = 1_000_000;

/// Reported utility statistics `(mean, sd, median, mad)` per risk aversion,
/// in the order analytical, Taylor, gradient ascent.
pub const REPORTED_UTILITY_STATS: [(f64, [[f64; 4]; 3]); 4] = [
    (
        5.0,
        [
            [-0.24761, 0.03487, -0.24461, 0.03387],
            [-0.24748, 0.02747, -0.24560, 0.02698],
            [-0.24748, 0.02699, -0.24566, 0.02653],
        ],
    ),
    (
        10.0,
        [
            [-0.10957, 0.01530, -0.10840, 0.01497],
            [-0.10956, 0.01369, -0.10861, 0.01345],
            [-0.10956, 0.01343, -0.10865, 0.01321],
        ],
    ),
    (
        15.0,
        [
            [-0.07020, 0.00978, -0.06947, 0.00959],
            [-0.07020, 0.00909, -0.06957, 0.00894],
            [-0.07020, 0.00892, -0.06959, 0.00878],
        ],
    ),
    (
        20.0,
        [
            [-0.05156, 0.00718, -0.05104, 0.00704],
            [-0.05156, 0.00680, -0.05109, 0.00668],
            [-0.05156, 0.00667, -0.05111, 0.00657],
        ],
    ),
];
