//! Summary statistics and empirical distribution tables.

use serde::Serialize;

use crate::error::{Error, Result};

/// Normal-consistency factor applied to the raw median absolute deviation.
pub const MAD_SCALE: f64 = 1.4826;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SummaryStats {
    pub mean: f64,
    /// Sample standard deviation, `n - 1` denominator.
    pub sd: f64,
    pub median: f64,
    /// `1.4826 * median(|x - median(x)|)`.
    pub mad: f64,
}

/// Mean, sd, median and scaled MAD. `None` for fewer than two values.
pub fn summarize(values: &[f64]) -> Option<SummaryStats> {
    let n = values.len();
    if n < 2 {
        return None;
    }
    let mean = values.iter().sum::<f64>() / n as f64;
    let ss: f64 = values.iter().map(|v| (v - mean) * (v - mean)).sum();
    let sd = (ss / (n as f64 - 1.0)).sqrt();
    let mut scratch = values.to_vec();
    let median = median_in_place(&mut scratch);
    for (s, v) in scratch.iter_mut().zip(values) {
        *s = (v - median).abs();
    }
    let mad = MAD_SCALE * median_in_place(&mut scratch);
    Some(SummaryStats {
        mean,
        sd,
        median,
        mad,
    })
}

/// Median by selection; the two middle order statistics are averaged for
/// even lengths. Reorders `v`.
pub fn median_in_place(v: &mut [f64]) -> f64 {
    let n = v.len();
    let mid = n / 2;
    let (lower, m, _) = v.select_nth_unstable_by(mid, f64::total_cmp);
    let upper = *m;
    if n % 2 == 1 {
        upper
    } else {
        let below = lower.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        0.5 * (below + upper)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct EcdfPoint {
    pub x: f64,
    #[serde(rename = "F")]
    pub f: f64,
}

/// Right-continuous empirical CDF `F(x) = #{v <= x} / N` evaluated on
/// `grid_points` equally spaced points from `min` to `max`. A constant
/// sample yields the single point `(c, 1)`.
pub fn ecdf(values: &[f64], grid_points: usize) -> Result<Vec<EcdfPoint>> {
    if values.is_empty() {
        return Err(Error::InvalidConfig("ECDF of an empty sample".into()));
    }
    if grid_points < 2 {
        return Err(Error::InvalidConfig("ECDF grid needs at least 2 points".into()));
    }
    let mut sorted = values.to_vec();
    sorted.sort_unstable_by(f64::total_cmp);
    let n = sorted.len() as f64;
    let (lo, hi) = (sorted[0], sorted[sorted.len() - 1]);
    if lo == hi {
        return Ok(vec![EcdfPoint { x: lo, f: 1.0 }]);
    }
    let step = (hi - lo) / (grid_points - 1) as f64;
    Ok((0..grid_points)
        .map(|i| {
            let x = if i == grid_points - 1 { hi } else { lo + step * i as f64 };
            let count = sorted.partition_point(|&v| v <= x);
            EcdfPoint {
                x,
                f: count as f64 / n,
            }
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn small_sample_summary() {
        let s = summarize(&[1.0, 2.0, 3.0]).unwrap();
        assert_eq!(s.mean, 2.0);
        assert_eq!(s.sd, 1.0);
        assert_eq!(s.median, 2.0);
        assert!((s.mad - 1.4826).abs() < 1e-15);
    }

    #[test]
    fn constant_sample_has_no_spread() {
        let s = summarize(&[0.75; 10]).unwrap();
        assert_eq!(s.sd, 0.0);
        assert_eq!(s.mad, 0.0);
        assert_eq!(s.median, 0.75);
    }

    #[test]
    fn even_length_median_averages_middle_pair() {
        let s = summarize(&[4.0, 1.0, 3.0, 2.0]).unwrap();
        assert_eq!(s.median, 2.5);
        // |x - 2.5| = {1.5, 0.5, 0.5, 1.5}
        assert!((s.mad - 1.4826).abs() < 1e-15);
        assert!(summarize(&[1.0]).is_none());
    }

    #[test]
    fn ecdf_on_sample_points() {
        let t = ecdf(&[3.0, 1.0, 4.0, 2.0], 4).unwrap();
        let f: Vec<f64> = t.iter().map(|p| p.f).collect();
        let x: Vec<f64> = t.iter().map(|p| p.x).collect();
        assert_eq!(x, vec![1.0, 2.0, 3.0, 4.0]);
        assert_eq!(f, vec![0.25, 0.5, 0.75, 1.0]);
    }

    #[test]
    fn ecdf_of_constant_sample() {
        assert_eq!(ecdf(&[2.0; 5], 10).unwrap(), vec![EcdfPoint { x: 2.0, f: 1.0 }]);
        assert!(ecdf(&[], 3).is_err());
        assert!(ecdf(&[1.0, 2.0], 1).is_err());
    }

    proptest! {
        #[test]
        fn ecdf_is_a_distribution_function(
            values in prop::collection::vec(-1e3f64..1e3, 1..200),
            grid in 2usize..64,
        ) {
            let t = ecdf(&values, grid).unwrap();
            prop_assert!(t.iter().all(|p| p.f > 0.0 && p.f <= 1.0));
            prop_assert!(t.windows(2).all(|w| w[0].f <= w[1].f && w[0].x <= w[1].x));
            prop_assert_eq!(t.last().unwrap().f, 1.0);
        }

        #[test]
        fn summary_invariants(values in prop::collection::vec(-1e3f64..1e3, 2..200)) {
            let s = summarize(&values).unwrap();
            let lo = values.iter().copied().fold(f64::INFINITY, f64::min);
            let hi = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            prop_assert!(s.sd >= 0.0 && s.mad >= 0.0);
            prop_assert!(lo <= s.median && s.median <= hi);
            prop_assert!(lo - 1e-9 <= s.mean && s.mean <= hi + 1e-9);
        }
    }
}
