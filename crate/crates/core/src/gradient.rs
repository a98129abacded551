//! Gradient ascent on the sample-average power utility
//!
//! ```text
//! V0(omega) = 1/N sum_i (R_f + omega'R_i)^{1-gamma} / (1-gamma)
//! grad V0   = 1/N sum_i R_i / (R_f + omega'R_i)^gamma
//! hess V0   = -gamma/N sum_i R_i R_i' / (R_f + omega'R_i)^{1+gamma}
//! ```
//!
//! The Hessian is negative semi-definite wherever every scenario wealth is
//! positive, so `V0` is concave on its domain and the update
//! `omega <- omega + eta * grad V0` climbs to the global maximum.
//!
//! Only the CRRA instance is implemented. Any concave utility `U` fits the
//! same loop: the gradient becomes `1/N sum U'(W_i) W0 R_i` and the Hessian
//! `1/N sum U''(W_i) W0^2 R_i R_i'`.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::market::RiskAversion;
use crate::reduce::sum_rows;
use crate::simulation::{dot, ScenarioSet};
use crate::utility::Power;

/// How the step length `eta` is chosen.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum LearningRate {
    /// Constant `eta` in `omega + eta * grad`.
    Fixed(f64),
    /// `eta = scale / L` with `L` the largest eigenvalue of `-hess V0` at
    /// the starting point.
    Curvature(f64),
}

#[derive(Clone, Debug)]
pub struct GdConfig {
    pub learning_rate: LearningRate,
    /// Stop once `|grad V0|_2 <= tol`.
    pub tol: f64,
    pub max_iter: usize,
    /// Starting point; `None` means all wealth in the risk-free asset.
    pub initial_weights: Option<DVector<f64>>,
    /// Step halvings tried per iteration before giving up.
    pub max_halvings: u32,
    /// Keep `V0` after every accepted step in [`GdReport::history`].
    pub record_history: bool,
}

impl Default for GdConfig {
    fn default() -> Self {
        Self {
            learning_rate: LearningRate::Fixed(0.1),
            tol: 1e-8,
            max_iter: 100_000,
            initial_weights: None,
            max_halvings: 60,
            record_history: false,
        }
    }
}

impl GdConfig {
    /// Defaults with the curvature-scaled step `1 / L`.
    pub fn curvature_scaled() -> Self {
        Self {
            learning_rate: LearningRate::Curvature(1.0),
            ..Self::default()
        }
    }

    fn validate(&self) -> Result<()> {
        let eta = match self.learning_rate {
            LearningRate::Fixed(e) | LearningRate::Curvature(e) => e,
        };
        if !(eta > 0.0 && eta.is_finite()) {
            return Err(Error::InvalidConfig(format!("learning rate must be positive, got {eta}")));
        }
        if !(self.tol > 0.0) {
            return Err(Error::InvalidConfig(format!("tol must be positive, got {}", self.tol)));
        }
        if self.max_iter == 0 {
            return Err(Error::InvalidConfig("max_iter must be at least 1".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GdReport {
    #[serde(serialize_with = "crate::ser_dvec")]
    pub weights: DVector<f64>,
    pub iterations: usize,
    pub final_gradient_norm: f64,
    /// `V0` at `weights`.
    pub objective: f64,
    pub converged: bool,
    /// Step length actually used before any halving.
    pub learning_rate: f64,
    #[serde(skip)]
    pub history: Vec<f64>,
}

fn check_dims(scenarios: &ScenarioSet, weights: &DVector<f64>) -> Result<()> {
    if weights.len() != scenarios.k() {
        return Err(Error::DimensionMismatch(format!(
            "{} weights for {} assets",
            weights.len(),
            scenarios.k()
        )));
    }
    Ok(())
}

/// `V0` and its gradient in one pass over the scenarios.
pub fn v0_with_gradient(
    scenarios: &ScenarioSet,
    weights: &DVector<f64>,
    ra: RiskAversion,
    gross_rf: f64,
) -> Result<(f64, DVector<f64>)> {
    check_dims(scenarios, weights)?;
    let k = scenarios.k();
    let gamma = ra.gamma();
    let neg_gamma = Power::new(-gamma);
    let w = weights.as_slice();
    let acc = sum_rows(scenarios.as_slice(), k, k + 1, |i, row, acc| {
        let wealth = gross_rf + dot(w, row);
        if !(wealth > 0.0) {
            return Err(Error::NonPositiveWealthScenario(i));
        }
        let t = neg_gamma.apply(wealth);
        acc[0] += wealth * t;
        for (a, r) in acc[1..].iter_mut().zip(row) {
            *a += r * t;
        }
        Ok(())
    })?;
    let n = scenarios.n() as f64;
    let value = acc[0] / (n * (1.0 - gamma));
    let grad = DVector::from_iterator(k, acc[1..].iter().map(|a| a / n));
    Ok((value, grad))
}

pub fn v0(
    scenarios: &ScenarioSet,
    weights: &DVector<f64>,
    ra: RiskAversion,
    gross_rf: f64,
) -> Result<f64> {
    check_dims(scenarios, weights)?;
    let gamma = ra.gamma();
    let pow = Power::new(1.0 - gamma);
    let w = weights.as_slice();
    let acc = sum_rows(scenarios.as_slice(), scenarios.k(), 1, |i, row, acc| {
        let wealth = gross_rf + dot(w, row);
        if !(wealth > 0.0) {
            return Err(Error::NonPositiveWealthScenario(i));
        }
        acc[0] += pow.apply(wealth);
        Ok(())
    })?;
    Ok(acc[0] / (scenarios.n() as f64 * (1.0 - gamma)))
}

pub fn v0_gradient(
    scenarios: &ScenarioSet,
    weights: &DVector<f64>,
    ra: RiskAversion,
    gross_rf: f64,
) -> Result<DVector<f64>> {
    v0_with_gradient(scenarios, weights, ra, gross_rf).map(|(_, g)| g)
}

pub fn v0_hessian(
    scenarios: &ScenarioSet,
    weights: &DVector<f64>,
    ra: RiskAversion,
    gross_rf: f64,
) -> Result<DMatrix<f64>> {
    check_dims(scenarios, weights)?;
    let k = scenarios.k();
    let gamma = ra.gamma();
    let pow = Power::new(-1.0 - gamma);
    let w = weights.as_slice();
    let acc = sum_rows(scenarios.as_slice(), k, k * k, |i, row, acc| {
        let wealth = gross_rf + dot(w, row);
        if !(wealth > 0.0) {
            return Err(Error::NonPositiveWealthScenario(i));
        }
        let t = pow.apply(wealth);
        for r in 0..k {
            for c in 0..k {
                acc[r * k + c] += row[r] * row[c] * t;
            }
        }
        Ok(())
    })?;
    let scale = -gamma / scenarios.n() as f64;
    Ok(DMatrix::from_row_slice(k, k, &acc) * scale)
}

fn resolve_learning_rate(
    rate: LearningRate,
    scenarios: &ScenarioSet,
    start: &DVector<f64>,
    ra: RiskAversion,
    gross_rf: f64,
) -> Result<f64> {
    match rate {
        LearningRate::Fixed(eta) => Ok(eta),
        LearningRate::Curvature(scale) => {
            let h = v0_hessian(scenarios, start, ra, gross_rf)?;
            let top = SymmetricEigen::new(-h).eigenvalues.max();
            if !(top > 0.0) {
                return Err(Error::InvalidConfig(
                    "V0 has no curvature at the starting point".into(),
                ));
            }
            Ok(scale / top)
        }
    }
}

/// Iterates `omega <- omega + eta * grad V0` until `|grad V0| <= tol`.
///
/// A trial step is accepted when every scenario wealth stays positive and
/// the step is uphill: either `V0` does not decrease or the directional
/// derivative at the trial point is still positive (by concavity the
/// latter implies `V0` increased along the whole segment). Otherwise the
/// step is halved, up to `max_halvings` times.
pub fn gd_solve(
    scenarios: &ScenarioSet,
    ra: RiskAversion,
    gross_rf: f64,
    cfg: &GdConfig,
) -> Result<GdReport> {
    cfg.validate()?;
    let mut w = cfg
        .initial_weights
        .clone()
        .unwrap_or_else(|| DVector::zeros(scenarios.k()));
    let (mut value, mut grad) = v0_with_gradient(scenarios, &w, ra, gross_rf)?;
    let eta = resolve_learning_rate(cfg.learning_rate, scenarios, &w, ra, gross_rf)?;
    let mut history = Vec::new();
    if cfg.record_history {
        history.push(value);
    }

    let mut iterations = 0;
    let mut grad_norm = grad.norm();
    while grad_norm > cfg.tol && iterations < cfg.max_iter {
        let mut step = eta;
        let mut accepted = None;
        for _ in 0..=cfg.max_halvings {
            let trial = &w + &grad * step;
            if let Ok((tv, tg)) = v0_with_gradient(scenarios, &trial, ra, gross_rf) {
                if tv >= value || tg.dot(&grad) > 0.0 {
                    accepted = Some((trial, tv, tg));
                    break;
                }
            }
            step *= 0.5;
        }
        let (trial, tv, tg) = accepted.ok_or(Error::StepIntoInfeasible)?;
        if !tv.is_finite() || tg.iter().any(|g| !g.is_finite()) {
            return Err(Error::NonFiniteIterate);
        }
        w = trial;
        value = tv;
        grad = tg;
        grad_norm = grad.norm();
        iterations += 1;
        if cfg.record_history {
            history.push(value);
        }
    }

    let report = GdReport {
        weights: w,
        iterations,
        final_gradient_norm: grad_norm,
        objective: value,
        converged: grad_norm <= cfg.tol,
        learning_rate: eta,
        history,
    };
    if report.converged {
        Ok(report)
    } else {
        Err(Error::GdNotConverged(Box::new(report)))
    }
}
