//! Closed-form weights under the log-normal approximation of the normal
//! portfolio return, the approximate objective `G`, and the derived
//! frontier and tangency quantities.
//!
//! Writing `omega = c * sigma^{-1} mu` and `J = mu' sigma^{-1} mu`, the first
//! order condition of `G` reduces to the scalar quadratic
//!
//! ```text
//! (R_f + c J)^2 + (1 - gamma) c R_f = 0
//! ```
//!
//! with discriminant proportional to `D = (gamma-1)^2/4 - (gamma-1) J`.
//! Real roots exist for `gamma >= 1 + 4J`; the smaller root
//! `c_- = R_f (a - sqrt D) / J^2`, `a = (gamma-1)/2 - J`, is the maximizer.

use nalgebra::DVector;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::market::{gamma_lower_bound, MarketParams, RiskAversion};

/// Numerical guards used by the closed-form routines.
#[derive(Clone, Copy, Debug)]
pub struct ClosedFormTolerances {
    /// `gamma` may undershoot `1 + 4J` by this much and still be accepted.
    pub bound_slack: f64,
    /// `J` at or below this is treated as a zero mean vector.
    pub degenerate_j: f64,
    /// `|1' sigma^{-1} mu|` at or below this has no tangency portfolio.
    pub singular_denominator: f64,
}

impl Default for ClosedFormTolerances {
    fn default() -> Self {
        Self {
            bound_slack: 1e-12,
            degenerate_j: 1e-14,
            singular_denominator: 1e-14,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ClosedFormSolution {
    #[serde(serialize_with = "crate::ser_dvec")]
    pub weights: DVector<f64>,
    /// Scale in `omega = c sigma^{-1} mu`.
    pub c: f64,
    pub j: f64,
    /// Discriminant `(gamma-1)^2/4 - (gamma-1) J`, clamped at zero.
    pub d: f64,
    pub gamma: f64,
    /// `omega' mu`.
    pub expected_excess_return: f64,
    /// `omega' sigma omega`.
    pub variance: f64,
    pub gross_rf: f64,
}

impl ClosedFormSolution {
    /// `(R_f + cJ)^2 + (1 - gamma) c R_f`, zero at an exact solution.
    pub fn foc_residual(&self) -> f64 {
        foc_residual(self.c, self.j, self.gamma, self.gross_rf)
    }
}

pub fn foc_residual(c: f64, j: f64, gamma: f64, gross_rf: f64) -> f64 {
    (gross_rf + c * j).powi(2) + (1.0 - gamma) * c * gross_rf
}

/// Both roots `(c_-, c_+)` of the first-order condition, or `None` when the
/// discriminant is negative.
///
/// `c_-` is computed as `R_f / (a + sqrt D)`, which equals
/// `R_f (a - sqrt D) / J^2` (the roots multiply to `R_f^2 / J^2`) without the
/// cancellation that the difference form suffers for large `gamma`.
pub fn scale_roots(j: f64, gamma: f64, gross_rf: f64) -> Option<(f64, f64)> {
    let d = discriminant(j, gamma);
    if d < 0.0 {
        return None;
    }
    let a = 0.5 * (gamma - 1.0) - j;
    let s = d.sqrt();
    let c_plus = gross_rf * (a + s) / (j * j);
    let c_minus = gross_rf / (a + s);
    Some((c_minus, c_plus))
}

/// `D = (gamma-1)^2/4 - (gamma-1) J`. `gamma` itself is only resolved to
/// `eps * gamma`, so `|D|` below about `eps * gamma * (gamma-1)` is rounding
/// noise and is returned as exactly zero. A `gamma` that equals `1 + 4J` up
/// to a few ulps then yields the double root instead of one perturbed by
/// `sqrt(eps)`.
pub fn discriminant(j: f64, gamma: f64) -> f64 {
    let g1 = gamma - 1.0;
    let d = g1 * (0.25 * g1 - j);
    if d.abs() <= 4.0 * f64::EPSILON * g1.abs() * (gamma.abs() + g1.abs()) {
        0.0
    } else {
        d
    }
}

pub fn solve_analytical(p: &MarketParams, ra: RiskAversion) -> Result<ClosedFormSolution> {
    solve_analytical_with(p, ra, &ClosedFormTolerances::default())
}

pub fn solve_analytical_with(
    p: &MarketParams,
    ra: RiskAversion,
    tol: &ClosedFormTolerances,
) -> Result<ClosedFormSolution> {
    let j = p.j();
    let gamma = ra.gamma();
    if j <= tol.degenerate_j {
        return Err(Error::DegenerateMu(j));
    }
    let bound = gamma_lower_bound(p);
    if gamma < bound - tol.bound_slack {
        return Err(Error::GammaBelowBound { gamma, bound });
    }
    // Accepted gammas within `bound_slack` below the bound give D < 0.
    let d = discriminant(j, gamma).max(0.0);
    let rf = p.gross_rf();
    let a = 0.5 * (gamma - 1.0) - j;
    let c = rf / (a + d.sqrt());
    let weights = p.sigma_inv_mu() * c;
    let expected_excess_return = weights.dot(p.mu());
    let variance = (p.sigma() * &weights).dot(&weights);
    Ok(ClosedFormSolution {
        weights,
        c,
        j,
        d,
        gamma,
        expected_excess_return,
        variance,
        gross_rf: rf,
    })
}

fn gross_mean(p: &MarketParams, weights: &DVector<f64>) -> Result<f64> {
    if weights.len() != p.k() {
        return Err(Error::DimensionMismatch(format!(
            "{} weights for {} assets",
            weights.len(),
            p.k()
        )));
    }
    let m = p.gross_rf() + weights.dot(p.mu());
    if m <= 0.0 {
        return Err(Error::NonPositiveGrossMean(m));
    }
    Ok(m)
}

/// `G(omega) = ln(R_f + omega'mu) + (1-gamma)/2 * omega'sigma omega / (R_f + omega'mu)^2`,
/// a monotone transform of the approximate expected utility.
pub fn objective_g(p: &MarketParams, weights: &DVector<f64>, ra: RiskAversion) -> Result<f64> {
    let m = gross_mean(p, weights)?;
    let v = (p.sigma() * weights).dot(weights);
    Ok(m.ln() + 0.5 * (1.0 - ra.gamma()) * v / (m * m))
}

/// Analytic gradient of [`objective_g`]:
/// `mu/m + (1-gamma) (sigma omega / m^2 - (omega'sigma omega) mu / m^3)`.
pub fn objective_g_gradient(
    p: &MarketParams,
    weights: &DVector<f64>,
    ra: RiskAversion,
) -> Result<DVector<f64>> {
    let m = gross_mean(p, weights)?;
    let sw = p.sigma() * weights;
    let v = sw.dot(weights);
    let k = 1.0 - ra.gamma();
    Ok(p.mu() / m + (sw / (m * m) - p.mu() * (v / (m * m * m))) * k)
}

/// Log-normal approximation of `E[U(W)]` for `W = w0 (R_f + omega'R)`:
///
/// ```text
/// w0^{1-g}/(1-g) * exp[(1-g) ln m + (1-g)^2/2 * v / m^2],  m = R_f + omega'mu, v = omega'sigma omega
/// ```
pub fn approx_expected_utility(
    p: &MarketParams,
    weights: &DVector<f64>,
    ra: RiskAversion,
    w0: f64,
) -> Result<f64> {
    if !(w0 > 0.0 && w0.is_finite()) {
        return Err(Error::InvalidConfig(format!(
            "initial wealth must be positive, got {w0}"
        )));
    }
    let m = gross_mean(p, weights)?;
    let v = (p.sigma() * weights).dot(weights);
    let k = 1.0 - ra.gamma();
    Ok(w0.powf(k) / k * (k * m.ln() + 0.5 * k * k * v / (m * m)).exp())
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TangencyResult {
    #[serde(serialize_with = "crate::ser_dvec")]
    pub weights: DVector<f64>,
    pub gamma_tgc: f64,
    /// `omega_tgc' mu`.
    pub expected_excess_return: f64,
    /// `omega_tgc' sigma omega_tgc`.
    pub variance: f64,
    pub gross_rf: f64,
}

impl TangencyResult {
    /// Whether the closed form at `gamma_tgc` returns this portfolio.
    pub fn on_selected_root(&self) -> bool {
        self.expected_excess_return <= self.gross_rf
    }
}

/// Fully-invested portfolio on the closed-form ray, `sigma^{-1}mu / (1'sigma^{-1}mu)`,
/// and the risk aversion `gamma_tgc` at which it solves the first-order
/// condition.
///
/// `c = 1 / 1'sigma^{-1}mu` is the root [`solve_analytical`] selects only
/// when the portfolio's excess return `J / 1'sigma^{-1}mu` is at most `R_f`;
/// beyond that it is the discarded root `c_+` and `solve_analytical(gamma_tgc)`
/// returns a less leveraged portfolio. See [`TangencyResult::on_selected_root`].
pub fn tangency(p: &MarketParams) -> Result<TangencyResult> {
    tangency_with(p, &ClosedFormTolerances::default())
}

pub fn tangency_with(p: &MarketParams, tol: &ClosedFormTolerances) -> Result<TangencyResult> {
    let x = p.sigma_inv_mu();
    let s = x.sum();
    if s.abs() <= tol.singular_denominator {
        return Err(Error::SingularDenominator(s));
    }
    let rf = p.gross_rf();
    let weights = x / s;
    let gamma_tgc = (p.j() / s + rf).powi(2) * s / rf + 1.0;
    let expected_excess_return = weights.dot(p.mu());
    let variance = (p.sigma() * &weights).dot(&weights);
    Ok(TangencyResult {
        weights,
        gamma_tgc,
        expected_excess_return,
        variance,
        gross_rf: rf,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct FrontierPoint {
    pub gamma: f64,
    pub mean: f64,
    pub variance: f64,
}

/// Expected excess return and variance of the closed-form portfolio.
pub fn frontier_point(p: &MarketParams, ra: RiskAversion) -> Result<FrontierPoint> {
    let sol = solve_analytical(p, ra)?;
    Ok(FrontierPoint {
        gamma: sol.gamma,
        mean: sol.expected_excess_return,
        variance: sol.variance,
    })
}
