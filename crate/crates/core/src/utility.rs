//! Power (CRRA) utility `U(W) = W^{1-gamma} / (1-gamma)`.

/// `x^e` that uses repeated multiplication when `e` is integral, which is
/// several times cheaper than `powf` in the per-scenario inner loops.
#[derive(Clone, Copy, Debug)]
pub(crate) struct Power {
    exp: f64,
    int: Option<i32>,
}

impl Power {
    pub(crate) fn new(exp: f64) -> Self {
        let int = (exp.fract() == 0.0 && exp.abs() < 1024.0).then_some(exp as i32);
        Self { exp, int }
    }

    #[inline]
    pub(crate) fn apply(self, x: f64) -> f64 {
        match self.int {
            Some(n) => x.powi(n),
            None => x.powf(self.exp),
        }
    }
}

/// CRRA utility of wealth. Returns NaN for non-positive wealth.
pub fn crra_utility(wealth: f64, gamma: f64) -> f64 {
    if wealth > 0.0 {
        Power::new(1.0 - gamma).apply(wealth) / (1.0 - gamma)
    } else {
        f64::NAN
    }
}
