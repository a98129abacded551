//! Seeded multivariate-normal scenario generation and per-scenario
//! evaluation of a fixed allocation.

use nalgebra::DVector;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::market::{MarketParams, RiskAversion};
use crate::reduce::CHUNK_ROWS;
use crate::utility::Power;

/// `N` excess-return vectors stored row-major, with the seed that produced
/// them (0 for hand-built sets).
#[derive(Clone, Debug, PartialEq)]
pub struct ScenarioSet {
    returns: Vec<f64>,
    k: usize,
    seed: u64,
}

impl ScenarioSet {
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let k = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != k) {
            return Err(Error::DimensionMismatch("ragged scenario rows".into()));
        }
        Self::from_flat(k, rows.concat(), 0)
    }

    pub fn from_flat(k: usize, returns: Vec<f64>, seed: u64) -> Result<Self> {
        if k == 0 || returns.is_empty() || !returns.len().is_multiple_of(k) {
            return Err(Error::DimensionMismatch(format!(
                "{} values do not form rows of width {k}",
                returns.len()
            )));
        }
        if returns.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFiniteInput("scenarios"));
        }
        Ok(Self { returns, k, seed })
    }

    pub fn n(&self) -> usize {
        self.returns.len() / self.k
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.returns[i * self.k..(i + 1) * self.k]
    }

    pub fn rows(&self) -> std::slice::ChunksExact<'_, f64> {
        self.returns.chunks_exact(self.k)
    }

    /// Row-major view of all returns.
    pub fn as_slice(&self) -> &[f64] {
        &self.returns
    }

    pub fn column_means(&self) -> DVector<f64> {
        let mut m = DVector::zeros(self.k);
        for row in self.rows() {
            for (a, r) in m.iter_mut().zip(row) {
                *a += r;
            }
        }
        m / self.n() as f64
    }
}

/// Draws `R_i = mu + L z_i` with `L` the lower Cholesky factor of `sigma`
/// and `z_i` i.i.d. standard normal.
///
/// Rows are produced in blocks of [`CHUNK_ROWS`]; block `b` uses a ChaCha8
/// stream seeded with `seed` on stream `b`, so the output depends only on
/// `(params, n, seed)` and not on the thread count.
pub fn simulate(p: &MarketParams, n: usize, seed: u64) -> Result<ScenarioSet> {
    if n == 0 {
        return Err(Error::InvalidConfig("scenario count must be positive".into()));
    }
    let k = p.k();
    let l = p.cholesky_lower();
    let mu = p.mu();
    let mut returns = vec![0.0; n * k];
    returns
        .par_chunks_mut(CHUNK_ROWS * k)
        .enumerate()
        .for_each(|(block, out)| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(block as u64);
            let mut z = vec![0.0; k];
            for row in out.chunks_exact_mut(k) {
                for zi in z.iter_mut() {
                    *zi = rng.sample(StandardNormal);
                }
                for (j, r) in row.iter_mut().enumerate() {
                    let mut acc = mu[j];
                    for (c, zc) in z.iter().enumerate().take(j + 1) {
                        acc += l[(j, c)] * zc;
                    }
                    *r = acc;
                }
            }
        });
    ScenarioSet::from_flat(k, returns, seed)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Analytical,
    Taylor,
    Gd,
}

impl Method {
    pub const ALL: [Method; 3] = [Method::Analytical, Method::Taylor, Method::Gd];

    pub fn as_str(self) -> &'static str {
        match self {
            Method::Analytical => "analytical",
            Method::Taylor => "taylor",
            Method::Gd => "gd",
        }
    }
}

impl std::fmt::Display for Method {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Terminal wealth and utility of one allocation on every scenario.
/// Utilities at non-positive wealth are NaN and counted in
/// `infeasible_count`.
#[derive(Clone, Debug)]
pub struct StrategyOutcome {
    pub method: Method,
    pub gamma: f64,
    pub weights: DVector<f64>,
    pub wealths: Vec<f64>,
    pub utilities: Vec<f64>,
    pub infeasible_count: usize,
}

impl StrategyOutcome {
    pub fn feasible_utilities(&self) -> Vec<f64> {
        self.utilities.iter().copied().filter(|u| !u.is_nan()).collect()
    }
}

/// Evaluates `W_i = R_f + omega'R_i` (unit initial wealth) and its utility.
pub fn evaluate_strategy(
    scenarios: &ScenarioSet,
    weights: &DVector<f64>,
    ra: RiskAversion,
    gross_rf: f64,
    method: Method,
) -> Result<StrategyOutcome> {
    evaluate_strategy_with_wealth(scenarios, weights, ra, gross_rf, method, 1.0)
}

pub fn evaluate_strategy_with_wealth(
    scenarios: &ScenarioSet,
    weights: &DVector<f64>,
    ra: RiskAversion,
    gross_rf: f64,
    method: Method,
    w0: f64,
) -> Result<StrategyOutcome> {
    if weights.len() != scenarios.k() {
        return Err(Error::DimensionMismatch(format!(
            "{} weights for {} assets",
            weights.len(),
            scenarios.k()
        )));
    }
    if !(w0 > 0.0 && w0.is_finite()) {
        return Err(Error::InvalidConfig(format!(
            "initial wealth must be positive, got {w0}"
        )));
    }
    let gamma = ra.gamma();
    let pow = Power::new(1.0 - gamma);
    let w = weights.as_slice();
    let wealths: Vec<f64> = scenarios
        .as_slice()
        .par_chunks(scenarios.k())
        .map(|row| w0 * (gross_rf + dot(w, row)))
        .collect();
    let utilities: Vec<f64> = wealths
        .par_iter()
        .map(|&x| {
            if x > 0.0 {
                pow.apply(x) / (1.0 - gamma)
            } else {
                f64::NAN
            }
        })
        .collect();
    let infeasible_count = utilities.iter().filter(|u| u.is_nan()).count();
    if infeasible_count == wealths.len() {
        return Err(Error::AllScenariosInfeasible);
    }
    Ok(StrategyOutcome {
        method,
        gamma,
        weights: weights.clone(),
        wealths,
        utilities,
        infeasible_count,
    })
}

#[inline]
pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::market::make_params;
    use nalgebra::DMatrix;

    fn ra(g: f64) -> RiskAversion {
        RiskAversion::new(g).unwrap()
    }

    #[test]
    fn same_seed_same_rows() {
        let p = crate::benchmark::study_params();
        let a = simulate(&p, 1, 42).unwrap();
        let b = simulate(&p, 1, 42).unwrap();
        assert_eq!(a, b);
        let c = simulate(&p, 1, 43).unwrap();
        assert_ne!(a.row(0), c.row(0));
    }

    #[test]
    fn prefix_is_stable_across_sizes() {
        let p = crate::benchmark::study_params();
        let a = simulate(&p, 100, 9).unwrap();
        let b = simulate(&p, CHUNK_ROWS + 100, 9).unwrap();
        assert_eq!(a.as_slice(), &b.as_slice()[..300]);
    }

    #[test]
    fn scaling_variance_scales_deviations() {
        let mk = |v: f64| {
            make_params(
                DVector::from_vec(vec![0.01]),
                DMatrix::from_vec(1, 1, vec![v]),
                0.0,
            )
            .unwrap()
        };
        let a = simulate(&mk(0.01), 1000, 5).unwrap();
        let b = simulate(&mk(0.04), 1000, 5).unwrap();
        for (x, y) in a.as_slice().iter().zip(b.as_slice()) {
            assert!((y - (0.01 + 2.0 * (x - 0.01))).abs() < 1e-15);
        }
    }

    #[test]
    fn large_sample_moments() {
        let sd = [0.02, 0.05, 0.01];
        let p = make_params(
            DVector::zeros(3),
            DMatrix::from_diagonal(&DVector::from_vec(sd.iter().map(|s| s * s).collect())),
            0.0,
        )
        .unwrap();
        let n = 1_000_000;
        let s = simulate(&p, n, 2024).unwrap();
        let m = s.column_means();
        let mut cov = DMatrix::<f64>::zeros(3, 3);
        for row in s.rows() {
            for r in 0..3 {
                for c in 0..3 {
                    cov[(r, c)] += (row[r] - m[r]) * (row[c] - m[c]);
                }
            }
        }
        cov /= n as f64 - 1.0;
        for j in 0..3 {
            assert!(m[j].abs() < 4.0 * sd[j] / (n as f64).sqrt(), "mean {j}");
            let v = sd[j] * sd[j];
            assert!((cov[(j, j)] - v).abs() < 0.01 * v, "var {j}");
        }
        // Off-diagonal correlations within 4/sqrt(n).
        for (r, c) in [(0, 1), (0, 2), (1, 2)] {
            let corr = cov[(r, c)] / (sd[r] * sd[c]);
            assert!(corr.abs() < 4.0 / (n as f64).sqrt(), "corr {r}{c}");
        }
    }

    #[test]
    fn riskless_strategy_utilities() {
        let p = crate::benchmark::study_params();
        let s = simulate(&p, 50, 1).unwrap();
        let out = evaluate_strategy(&s, &DVector::zeros(3), ra(5.0), 1.0006, Method::Analytical)
            .unwrap();
        let expected = 1.0006f64.powi(-4) / -4.0;
        assert!(out.utilities.iter().all(|&u| (u - expected).abs() < 1e-16));
        assert!((expected + 0.24940089892113).abs() < 1e-13);
        assert_eq!(out.infeasible_count, 0);
    }

    #[test]
    fn two_scenario_utilities() {
        let s = ScenarioSet::from_rows(&[vec![0.1], vec![-0.1]]).unwrap();
        let out = evaluate_strategy(&s, &DVector::from_vec(vec![1.0]), ra(2.0), 1.0, Method::Gd)
            .unwrap();
        assert!((out.utilities[0] + 1.0 / 1.1).abs() < 1e-15);
        assert!((out.utilities[1] + 1.0 / 0.9).abs() < 1e-15);
        assert!((out.wealths[0] - 1.1).abs() < 1e-15);
    }

    #[test]
    fn infeasible_scenarios_are_counted() {
        let s = ScenarioSet::from_rows(&[vec![0.5], vec![-0.5], vec![0.1]]).unwrap();
        let out =
            evaluate_strategy(&s, &DVector::from_vec(vec![3.0]), ra(2.0), 1.0, Method::Gd).unwrap();
        assert_eq!(out.infeasible_count, 1);
        assert_eq!(out.feasible_utilities().len(), 2);
        let all_bad = ScenarioSet::from_rows(&[vec![-0.5], vec![-0.6]]).unwrap();
        assert!(matches!(
            evaluate_strategy(&all_bad, &DVector::from_vec(vec![3.0]), ra(2.0), 1.0, Method::Gd),
            Err(Error::AllScenariosInfeasible)
        ));
    }

    #[test]
    fn scenario_set_validation() {
        assert!(ScenarioSet::from_rows(&[vec![0.1, 0.2], vec![0.3]]).is_err());
        assert!(ScenarioSet::from_rows(&[vec![f64::NAN]]).is_err());
        assert!(ScenarioSet::from_rows(&[]).is_err());
    }
}
