//! Mean and variance of the closed-form portfolio as risk aversion grows,
//! for a single risky asset with mu = 0.05, sigma^2 = 0.01 and R_f = 1.
//!
//!     cargo run --example frontier_sweep

use nalgebra::{DMatrix, DVector};

use crra_opt::{frontier_point, gamma_lower_bound, make_params, tangency, RiskAversion};

fn main() -> crra_opt::Result<()> {
    let p = make_params(DVector::from_element(1, 0.05), DMatrix::from_element(1, 1, 0.01), 0.0)?;
    let bound = gamma_lower_bound(&p);

    println!("gamma,mean_excess,variance,mean^2/variance");
    for i in 0..=18 {
        let gamma = bound + i as f64;
        let fp = frontier_point(&p, RiskAversion::new(gamma)?)?;
        println!("{gamma},{:.8},{:.8},{:.6}", fp.mean, fp.variance, fp.mean * fp.mean / fp.variance);
    }

    let t = tangency(&p)?;
    let fp = frontier_point(&p, RiskAversion::new(t.gamma_tgc)?)?;
    println!(
        "tangency at gamma {:.4}: weight {:.6}, mean {:.6}, variance {:.6}",
        t.gamma_tgc, t.weights[0], fp.mean, fp.variance
    );
    Ok(())
}
