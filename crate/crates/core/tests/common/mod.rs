#![allow(dead_code)]

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_distr::StandardNormal;

use crra_opt::{make_params, MarketParams};

/// Random positive definite instance with `1 <= k <= max_k`: volatilities
/// of 1% to 10%, means of up to one volatility, net risk-free rate in
/// `[0, 1%)`.
pub fn random_params<R: Rng>(rng: &mut R, max_k: usize) -> MarketParams {
    let k = rng.random_range(1..=max_k);
    let a = DMatrix::from_fn(k, k, |_, _| rng.sample::<f64, _>(StandardNormal));
    let corr_raw = &a * a.transpose() + DMatrix::identity(k, k) * 0.5;
    let d = corr_raw.diagonal().map(|v| 1.0 / v.sqrt());
    let corr = DMatrix::from_fn(k, k, |r, c| corr_raw[(r, c)] * d[r] * d[c]);
    let vol = DVector::from_fn(k, |_, _| rng.random_range(0.01..0.1));
    let sigma = DMatrix::from_fn(k, k, |r, c| corr[(r, c)] * vol[r] * vol[c]);
    let mu = DVector::from_fn(k, |i, _| vol[i] * rng.random_range(-1.0..1.0));
    let r_f = rng.random_range(0.0..0.01);
    make_params(mu, sigma, r_f).expect("constructed positive definite")
}
