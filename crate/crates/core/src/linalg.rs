//! Small dense helpers on top of nalgebra. Every `A^{-1} x` in the crate
//! goes through a Cholesky solve; no explicit inverses are formed.

use nalgebra::{Cholesky, DMatrix, DVector, Dyn};

use crate::error::{Error, Result};

/// Relative asymmetry above which a covariance matrix is rejected.
pub const ASYMMETRY_REL_TOL: f64 = 1e-8;

pub type Factor = Cholesky<f64, Dyn>;

/// Returns `(A + A')/2`, rejecting matrices that are not symmetric up to
/// [`ASYMMETRY_REL_TOL`] relative to the largest entry.
pub fn symmetrize(a: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    if !a.is_square() {
        return Err(Error::DimensionMismatch(format!(
            "matrix is {}x{}, expected square",
            a.nrows(),
            a.ncols()
        )));
    }
    let scale = a.amax();
    let deviation = (a - a.transpose()).amax();
    if deviation > ASYMMETRY_REL_TOL * scale {
        return Err(Error::NotSymmetric { deviation });
    }
    Ok((a + a.transpose()) * 0.5)
}

pub fn cholesky(a: &DMatrix<f64>) -> Result<Factor> {
    Cholesky::new(a.clone()).ok_or(Error::NotPositiveDefinite)
}

pub fn solve(factor: &Factor, b: &DVector<f64>) -> DVector<f64> {
    factor.solve(b)
}
