//! Market parameters of the normal excess-return model, price-series
//! ingestion and moment estimation.

use chrono::NaiveDateTime;
use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::linalg::{self, Factor};

/// Mean and covariance of per-period excess returns together with the
/// per-period net risk-free rate. Immutable once built; the Cholesky factor
/// of `sigma` and the vector `sigma^{-1} mu` are cached.
#[derive(Clone, Debug)]
pub struct MarketParams {
    mu: DVector<f64>,
    sigma: DMatrix<f64>,
    r_f: f64,
    asset_names: Option<Vec<String>>,
    factor: Factor,
    sigma_inv_mu: DVector<f64>,
    j: f64,
}

/// Validates and assembles [`MarketParams`]. `sigma` is symmetrized before
/// the definiteness check.
pub fn make_params(mu: DVector<f64>, sigma: DMatrix<f64>, r_f: f64) -> Result<MarketParams> {
    let k = mu.len();
    if k == 0 {
        return Err(Error::DimensionMismatch("mean vector is empty".into()));
    }
    if sigma.nrows() != k || sigma.ncols() != k {
        return Err(Error::DimensionMismatch(format!(
            "mean has length {k} but covariance is {}x{}",
            sigma.nrows(),
            sigma.ncols()
        )));
    }
    if mu.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFiniteInput("mu"));
    }
    if sigma.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFiniteInput("sigma"));
    }
    if !r_f.is_finite() {
        return Err(Error::NonFiniteInput("r_f"));
    }
    if 1.0 + r_f <= 0.0 {
        return Err(Error::NonPositiveRiskFree(1.0 + r_f));
    }
    let sigma = linalg::symmetrize(&sigma)?;
    let factor = linalg::cholesky(&sigma)?;
    let sigma_inv_mu = linalg::solve(&factor, &mu);
    let j = mu.dot(&sigma_inv_mu);
    Ok(MarketParams {
        mu,
        sigma,
        r_f,
        asset_names: None,
        factor,
        sigma_inv_mu,
        j,
    })
}

impl MarketParams {
    pub fn with_asset_names(mut self, names: Vec<String>) -> Result<Self> {
        if names.len() != self.k() {
            return Err(Error::DimensionMismatch(format!(
                "{} asset names for {} assets",
                names.len(),
                self.k()
            )));
        }
        self.asset_names = Some(names);
        Ok(self)
    }

    pub fn k(&self) -> usize {
        self.mu.len()
    }

    pub fn mu(&self) -> &DVector<f64> {
        &self.mu
    }

    pub fn sigma(&self) -> &DMatrix<f64> {
        &self.sigma
    }

    /// Net per-period risk-free rate `r_f`.
    pub fn r_f(&self) -> f64 {
        self.r_f
    }

    /// Gross risk-free return `R_f = 1 + r_f`.
    pub fn gross_rf(&self) -> f64 {
        1.0 + self.r_f
    }

    pub fn asset_names(&self) -> Option<&[String]> {
        self.asset_names.as_deref()
    }

    pub fn cholesky(&self) -> &Factor {
        &self.factor
    }

    /// Lower Cholesky factor `L` with `L L' = sigma`.
    pub fn cholesky_lower(&self) -> DMatrix<f64> {
        self.factor.l()
    }

    /// `sigma^{-1} b` via the cached factor.
    pub fn solve(&self, b: &DVector<f64>) -> DVector<f64> {
        linalg::solve(&self.factor, b)
    }

    pub fn sigma_inv_mu(&self) -> &DVector<f64> {
        &self.sigma_inv_mu
    }

    /// The quadratic form `J = mu' sigma^{-1} mu`.
    pub fn j(&self) -> f64 {
        self.j
    }
}

/// Smallest risk aversion for which the closed-form weights exist: `1 + 4J`.
pub fn gamma_lower_bound(p: &MarketParams) -> f64 {
    1.0 + 4.0 * p.j()
}

/// Relative risk aversion of a power-utility investor.
#[derive(Clone, Copy, Debug, PartialEq, PartialOrd)]
pub struct RiskAversion(f64);

impl RiskAversion {
    pub fn new(gamma: f64) -> Result<Self> {
        if !gamma.is_finite() || gamma <= 0.0 || gamma == 1.0 {
            return Err(Error::InvalidRiskAversion(gamma));
        }
        Ok(Self(gamma))
    }

    pub fn gamma(self) -> f64 {
        self.0
    }
}

/// Strictly positive prices on strictly increasing dates, one column per asset.
#[derive(Clone, Debug)]
pub struct PriceSeries {
    dates: Vec<NaiveDateTime>,
    prices: DMatrix<f64>,
    asset_names: Vec<String>,
}

impl PriceSeries {
    pub fn new(
        dates: Vec<NaiveDateTime>,
        prices: DMatrix<f64>,
        asset_names: Vec<String>,
    ) -> Result<Self> {
        let (t, k) = prices.shape();
        if dates.len() != t {
            return Err(Error::DimensionMismatch(format!(
                "{} dates for {t} price rows",
                dates.len()
            )));
        }
        if asset_names.len() != k || k == 0 {
            return Err(Error::DimensionMismatch(format!(
                "{} asset names for {k} price columns",
                asset_names.len()
            )));
        }
        if t < 3 {
            return Err(Error::TooFewObservations(t));
        }
        for row in 1..t {
            if dates[row] <= dates[row - 1] {
                return Err(Error::DatesNotIncreasing(row));
            }
        }
        for row in 0..t {
            for col in 0..k {
                let v = prices[(row, col)];
                if !v.is_finite() {
                    return Err(Error::MissingValue { row, col });
                }
                if v <= 0.0 {
                    return Err(Error::NonPositivePrice { row, col });
                }
            }
        }
        Ok(Self {
            dates,
            prices,
            asset_names,
        })
    }

    pub fn dates(&self) -> &[NaiveDateTime] {
        &self.dates
    }

    pub fn prices(&self) -> &DMatrix<f64> {
        &self.prices
    }

    pub fn asset_names(&self) -> &[String] {
        &self.asset_names
    }

    pub fn len(&self) -> usize {
        self.dates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.dates.is_empty()
    }

    /// Simple net returns `P_t / P_{t-1} - 1`, shape `(T-1) x k`.
    pub fn simple_returns(&self) -> DMatrix<f64> {
        let (t, k) = self.prices.shape();
        DMatrix::from_fn(t - 1, k, |r, c| {
            self.prices[(r + 1, c)] / self.prices[(r, c)] - 1.0
        })
    }
}

/// Sample mean and (n-1)-denominator covariance of excess returns
/// `r_t - r_f`, wrapped through [`make_params`].
pub fn estimate_params(series: &PriceSeries, r_f: f64) -> Result<MarketParams> {
    if series.len() < 3 {
        return Err(Error::TooFewObservations(series.len()));
    }
    let excess = series.simple_returns().add_scalar(-r_f);
    let (n, k) = excess.shape();
    let mean = DVector::from_fn(k, |c, _| excess.column(c).sum() / n as f64);
    let centered = DMatrix::from_fn(n, k, |r, c| excess[(r, c)] - mean[c]);
    let cov = (centered.transpose() * &centered) / (n as f64 - 1.0);
    make_params(mean, cov, r_f)?.with_asset_names(series.asset_names().to_vec())
}
