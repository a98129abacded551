//! Sample-based solvers on a single risky asset with mu = 0.05,
//! sigma^2 = 0.01, R_f = 1, gamma = 10 and one million scenarios.
//!
//! Reference values, computed independently by quadrature:
//! the exact maximiser of E[(1 + w R)^{-9} / -9] under R ~ N(0.05, 0.01) is
//! 0.4987177, and the fixed point of the Taylor map with exact normal
//! moments is 0.4753041. The closed form gives 0.5887451.

use nalgebra::{DMatrix, DVector};

use crra_opt::{
    gd_solve, make_params, simulate, solve_analytical, taylor_solve, GdConfig, MarketParams,
    RiskAversion, ScenarioSet, TaylorConfig,
};

const EXACT_ARGMAX: f64 = 0.498_717_660_5;
const TAYLOR_POPULATION: f64 = 0.475_304_090_6;

fn scalar() -> (MarketParams, ScenarioSet, RiskAversion) {
    let p = make_params(DVector::from_element(1, 0.05), DMatrix::from_element(1, 1, 0.01), 0.0)
        .unwrap();
    let s = simulate(&p, 1_000_000, 2024).unwrap();
    (p, s, RiskAversion::new(10.0).unwrap())
}

/// Newton's method on the scalar first-order condition of the sample
/// objective, written out directly.
fn sample_argmax(s: &ScenarioSet) -> f64 {
    let mut w = 0.0;
    for _ in 0..50 {
        let (mut g, mut h) = (0.0, 0.0);
        for r in s.rows() {
            let wealth = 1.0 + w * r[0];
            g += r[0] * wealth.powi(-10);
            h -= 10.0 * r[0] * r[0] * wealth.powi(-11);
        }
        w -= g / h;
    }
    w
}

#[test]
fn gradient_ascent_finds_the_sample_maximiser() {
    let (_, s, ra) = scalar();
    let r = gd_solve(&s, ra, 1.0, &GdConfig::curvature_scaled()).unwrap();
    assert!(r.converged);
    let oracle = sample_argmax(&s);
    assert!((r.weights[0] - oracle).abs() < 1e-6, "{} vs {oracle}", r.weights[0]);
    assert!((r.weights[0] - EXACT_ARGMAX).abs() < 0.01, "{}", r.weights[0]);
}

#[test]
fn taylor_fixed_point_matches_population_value() {
    let (_, s, ra) = scalar();
    let r = taylor_solve(&s, ra, 1.0, &TaylorConfig::default()).unwrap();
    assert!(r.converged);
    assert!((r.weights[0] - TAYLOR_POPULATION).abs() < 0.01, "{}", r.weights[0]);
}

#[test]
fn closed_form_overshoots_the_exact_maximiser() {
    let (p, _, ra) = scalar();
    let w = solve_analytical(&p, ra).unwrap().weights[0];
    assert!((w - 0.5887451).abs() < 1e-7);
    assert!(w > EXACT_ARGMAX + 0.05);
}
