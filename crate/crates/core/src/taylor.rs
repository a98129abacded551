//! Fourth-order Taylor-expansion benchmark for the single-period problem.
//!
//! Expanding the power utility around `W = R_f` to fourth order and solving
//! the resulting first-order condition for the linear term gives the
//! fixed-point map
//!
//! ```text
//! omega <- (1/gamma) M2^{-1} [ R_f m1
//!                             + gamma(gamma+1)/(2 R_f)             E[(omega'R)^2 R]
//!                             - gamma(gamma+1)(gamma+2)/(6 R_f^2)  E[(omega'R)^3 R] ]
//! ```
//!
//! started from `(R_f/gamma) M2^{-1} m1`, where `m1 = E[R]` and
//! `M2 = E[R R']`. All expectations are sample means over one
//! [`ScenarioSet`]; `M2` is factored once.

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{self, Factor};
use crate::market::{MarketParams, RiskAversion};
use crate::reduce::sum_rows;
use crate::simulation::{dot, ScenarioSet};

/// Relative pivot below which the second-moment matrix counts as singular.
const SINGULAR_PIVOT_REL: f64 = 1e-12;

/// Consecutive growing steps that switch on damping.
const OSCILLATION_STEPS: usize = 5;
const DAMPING: f64 = 0.5;

#[derive(Clone, Debug, Default)]
pub enum TaylorStart {
    /// `(R_f/gamma) M2^{-1} m1` from the scenario set.
    #[default]
    SampleMoments,
    /// `(R_f/gamma) (sigma + mu mu')^{-1} mu` from exact parameters.
    Population(MarketParams),
}

#[derive(Clone, Debug)]
pub struct TaylorConfig {
    /// Stop once `|omega(i+1) - omega(i)|_2 <= tol`.
    pub tol: f64,
    pub max_iter: usize,
    pub start: TaylorStart,
}

impl Default for TaylorConfig {
    fn default() -> Self {
        Self {
            tol: 1e-10,
            max_iter: 1000,
            start: TaylorStart::SampleMoments,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TaylorReport {
    #[serde(serialize_with = "crate::ser_dvec")]
    pub weights: DVector<f64>,
    pub iterations: usize,
    pub converged: bool,
    /// Norm of the last fixed-point update.
    pub last_step: f64,
    /// Whether oscillation damping was switched on.
    pub damped: bool,
}

/// `m1 = E[R]` and the Cholesky factor of `M2 = E[R R']` over a scenario set.
#[derive(Clone, Debug)]
pub struct SampleMoments {
    m1: DVector<f64>,
    m2: DMatrix<f64>,
    factor: Factor,
}

impl SampleMoments {
    pub fn new(scenarios: &ScenarioSet) -> Result<Self> {
        let k = scenarios.k();
        let acc = sum_rows::<Error, _>(scenarios.as_slice(), k, k + k * k, |_, row, acc| {
            for (a, r) in acc[..k].iter_mut().zip(row) {
                *a += r;
            }
            for r in 0..k {
                for c in 0..k {
                    acc[k + r * k + c] += row[r] * row[c];
                }
            }
            Ok(())
        })?;
        let n = scenarios.n() as f64;
        let m1 = DVector::from_iterator(k, acc[..k].iter().map(|a| a / n));
        let m2 = DMatrix::from_row_slice(k, k, &acc[k..]) / n;
        let factor = factor_second_moment(&m2)?;
        Ok(Self { m1, m2, factor })
    }

    pub fn mean(&self) -> &DVector<f64> {
        &self.m1
    }

    pub fn second_moment(&self) -> &DMatrix<f64> {
        &self.m2
    }

    fn solve_scaled(&self, rhs: &DVector<f64>, gamma: f64) -> DVector<f64> {
        linalg::solve(&self.factor, rhs) / gamma
    }
}

fn factor_second_moment(m2: &DMatrix<f64>) -> Result<Factor> {
    let factor = linalg::cholesky(m2).map_err(|_| Error::SingularSecondMoment)?;
    let scale = m2.diagonal().max();
    let l = factor.l_dirty();
    let min_pivot = (0..m2.nrows()).map(|i| l[(i, i)] * l[(i, i)]).fold(f64::INFINITY, f64::min);
    if !(scale > 0.0) || min_pivot <= SINGULAR_PIVOT_REL * scale {
        return Err(Error::SingularSecondMoment);
    }
    Ok(factor)
}

pub fn taylor_initial(scenarios: &ScenarioSet, ra: RiskAversion, gross_rf: f64) -> Result<DVector<f64>> {
    let mom = SampleMoments::new(scenarios)?;
    Ok(initial_from(&mom, ra, gross_rf))
}

fn initial_from(mom: &SampleMoments, ra: RiskAversion, gross_rf: f64) -> DVector<f64> {
    mom.solve_scaled(&(&mom.m1 * gross_rf), ra.gamma())
}

/// `(R_f/gamma) (sigma + mu mu')^{-1} mu`.
pub fn taylor_initial_population(p: &MarketParams, ra: RiskAversion) -> Result<DVector<f64>> {
    let m2 = p.sigma() + p.mu() * p.mu().transpose();
    let factor = factor_second_moment(&m2)?;
    Ok(linalg::solve(&factor, &(p.mu() * p.gross_rf())) / ra.gamma())
}

pub fn taylor_step(
    scenarios: &ScenarioSet,
    ra: RiskAversion,
    gross_rf: f64,
    weights: &DVector<f64>,
) -> Result<DVector<f64>> {
    let mom = SampleMoments::new(scenarios)?;
    step_with(&mom, scenarios, ra, gross_rf, weights)
}

fn step_with(
    mom: &SampleMoments,
    scenarios: &ScenarioSet,
    ra: RiskAversion,
    gross_rf: f64,
    weights: &DVector<f64>,
) -> Result<DVector<f64>> {
    let k = scenarios.k();
    if weights.len() != k {
        return Err(Error::DimensionMismatch(format!("{} weights for {k} assets", weights.len())));
    }
    let w = weights.as_slice();
    let acc = sum_rows::<Error, _>(scenarios.as_slice(), k, 2 * k, |_, row, acc| {
        let p = dot(w, row);
        let p2 = p * p;
        let p3 = p2 * p;
        let (sq, cu) = acc.split_at_mut(k);
        for ((s, c), r) in sq.iter_mut().zip(cu.iter_mut()).zip(row) {
            *s += p2 * r;
            *c += p3 * r;
        }
        Ok(())
    })?;
    let n = scenarios.n() as f64;
    let g = ra.gamma();
    let c2 = g * (g + 1.0) / (2.0 * gross_rf);
    let c3 = g * (g + 1.0) * (g + 2.0) / (6.0 * gross_rf * gross_rf);
    let rhs = DVector::from_fn(k, |i, _| {
        gross_rf * mom.m1[i] + c2 * (acc[i] / n) - c3 * (acc[k + i] / n)
    });
    let next = mom.solve_scaled(&rhs, g);
    if next.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFiniteIterate);
    }
    Ok(next)
}

/// Fixed-point iteration of [`taylor_step`] from the configured start.
///
/// If the update norm grows for five consecutive iterations the map is
/// damped, `omega <- omega + 0.5 (step(omega) - omega)`, for the rest of the
/// run.
pub fn taylor_solve(
    scenarios: &ScenarioSet,
    ra: RiskAversion,
    gross_rf: f64,
    cfg: &TaylorConfig,
) -> Result<TaylorReport> {
    if !(cfg.tol > 0.0) || cfg.max_iter == 0 {
        return Err(Error::InvalidConfig("Taylor tol and max_iter must be positive".into()));
    }
    let mom = SampleMoments::new(scenarios)?;
    let mut w = match &cfg.start {
        TaylorStart::SampleMoments => initial_from(&mom, ra, gross_rf),
        TaylorStart::Population(p) => {
            if p.k() != scenarios.k() {
                return Err(Error::DimensionMismatch("population start dimension".into()));
            }
            taylor_initial_population(p, ra)?
        }
    };

    let mut damping = 1.0;
    let mut growing = 0;
    let mut prev = f64::INFINITY;
    let mut last_step = f64::INFINITY;
    let mut iterations = 0;
    while iterations < cfg.max_iter {
        let mut next = step_with(&mom, scenarios, ra, gross_rf, &w)?;
        if damping < 1.0 {
            next = &w + (next - &w) * damping;
        }
        last_step = (&next - &w).norm();
        w = next;
        iterations += 1;
        if last_step <= cfg.tol {
            break;
        }
        growing = if last_step > prev { growing + 1 } else { 0 };
        if growing >= OSCILLATION_STEPS && damping == 1.0 {
            damping = DAMPING;
            growing = 0;
        }
        prev = last_step;
    }

    let report = TaylorReport {
        weights: w,
        iterations,
        converged: last_step <= cfg.tol,
        last_step,
        damped: damping < 1.0,
    };
    if report.converged {
        Ok(report)
    } else {
        Err(Error::TaylorNotConverged(Box::new(report)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::market::make_params;
    use crate::simulation::simulate;

    fn ra(g: f64) -> RiskAversion {
        RiskAversion::new(g).unwrap()
    }

    fn paired(rows: &[Vec<f64>]) -> ScenarioSet {
        let mut all = rows.to_vec();
        all.extend(rows.iter().map(|r| r.iter().map(|v| -v).collect::<Vec<_>>()));
        ScenarioSet::from_rows(&all).unwrap()
    }

    #[test]
    fn population_start_for_scalar_case() {
        let p = make_params(
            DVector::from_vec(vec![0.05]),
            DMatrix::from_vec(1, 1, vec![0.01]),
            0.0,
        )
        .unwrap();
        let w = taylor_initial_population(&p, ra(10.0)).unwrap();
        assert!((w[0] - 0.4).abs() < 1e-14);
    }

    #[test]
    fn zero_weights_step_equals_initial_bitwise() {
        let p = crate::benchmark::study_params();
        let s = simulate(&p, 5000, 3).unwrap();
        let init = taylor_initial(&s, ra(7.0), p.gross_rf()).unwrap();
        let step = taylor_step(&s, ra(7.0), p.gross_rf(), &DVector::zeros(3)).unwrap();
        assert_eq!(init, step);
    }

    #[test]
    fn identical_scenarios_are_singular() {
        let s = ScenarioSet::from_rows(&vec![vec![0.01, 0.02]; 10]).unwrap();
        assert!(matches!(
            taylor_initial(&s, ra(5.0), 1.0),
            Err(Error::SingularSecondMoment)
        ));
    }

    #[test]
    fn symmetric_sample_stays_at_zero() {
        let s = paired(&[vec![0.02, -0.01], vec![0.01, 0.03], vec![-0.04, 0.01]]);
        let init = taylor_initial(&s, ra(5.0), 1.0).unwrap();
        assert!(init.amax() < 1e-12);
        let r = taylor_solve(&s, ra(5.0), 1.0, &TaylorConfig::default()).unwrap();
        assert!(r.iterations <= 2);
        assert!(r.weights.amax() < 1e-12);
    }

    #[test]
    fn symmetric_sample_step_is_pure_cubic_correction() {
        let s = paired(&[vec![0.02, -0.01], vec![0.01, 0.03], vec![-0.04, 0.01]]);
        let w = DVector::from_vec(vec![0.7, -0.4]);
        let mom = SampleMoments::new(&s).unwrap();
        let g = 5.0;
        let c3 = g * (g + 1.0) * (g + 2.0) / 6.0;
        let mut cube = DVector::zeros(2);
        for row in s.rows() {
            let p = w[0] * row[0] + w[1] * row[1];
            cube += DVector::from_row_slice(row) * p.powi(3);
        }
        cube /= s.n() as f64;
        let expected = mom.solve_scaled(&(cube * -c3), g);
        let got = taylor_step(&s, ra(g), 1.0, &w).unwrap();
        assert!((&got - &expected).amax() < 1e-12 * expected.amax());
    }

    #[test]
    fn fixed_point_residual_within_tol() {
        let p = crate::benchmark::study_params();
        let s = simulate(&p, 20_000, 4).unwrap();
        let cfg = TaylorConfig::default();
        let r = taylor_solve(&s, ra(10.0), p.gross_rf(), &cfg).unwrap();
        let again = taylor_step(&s, ra(10.0), p.gross_rf(), &r.weights).unwrap();
        assert!((again - &r.weights).norm() <= cfg.tol);
        let r2 = taylor_solve(&s, ra(10.0), p.gross_rf(), &cfg).unwrap();
        assert_eq!(r, r2);
    }

    #[test]
    fn population_start_converges_to_same_point() {
        let p = crate::benchmark::study_params();
        let s = simulate(&p, 20_000, 4).unwrap();
        let a = taylor_solve(&s, ra(10.0), p.gross_rf(), &TaylorConfig::default()).unwrap();
        let cfg = TaylorConfig {
            start: TaylorStart::Population(p.clone()),
            ..TaylorConfig::default()
        };
        let b = taylor_solve(&s, ra(10.0), p.gross_rf(), &cfg).unwrap();
        assert!((a.weights - b.weights).amax() < 1e-8);
    }

    #[test]
    fn iteration_cap_reports_partial_result() {
        let p = crate::benchmark::study_params();
        let s = simulate(&p, 5000, 4).unwrap();
        let cfg = TaylorConfig {
            max_iter: 2,
            ..TaylorConfig::default()
        };
        match taylor_solve(&s, ra(5.0), p.gross_rf(), &cfg) {
            Err(Error::TaylorNotConverged(r)) => {
                assert_eq!(r.iterations, 2);
                assert!(!r.converged);
            }
            other => panic!("unexpected {other:?}"),
        }
    }
}
