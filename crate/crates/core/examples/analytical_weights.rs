//! Closed-form weights on the three-index benchmark over a range of risk
//! aversions, with the first-order-condition residual and the tangency
//! portfolio.
//!
//!     cargo run --example analytical_weights

use crra_opt::benchmark::study_params;
use crra_opt::closed_form::approx_expected_utility;
use crra_opt::{gamma_lower_bound, solve_analytical, tangency, RiskAversion};

fn main() -> crra_opt::Result<()> {
    let p = study_params();
    let bound = gamma_lower_bound(&p);
    println!("J = {:.8}, gamma must be at least {bound:.6}", p.j());

    println!("{:>6} {:>10} {:>10} {:>10} {:>10} {:>10} {:>10}", "gamma", "DAX", "NASDAQ", "R2000", "mean", "sd", "foc");
    for gamma in [2.0, 3.0, 5.0, 10.0, 15.0, 20.0, 50.0] {
        let s = solve_analytical(&p, RiskAversion::new(gamma)?)?;
        let w = &s.weights;
        println!(
            "{gamma:>6} {:>10.4} {:>10.4} {:>10.4} {:>10.6} {:>10.6} {:>10.1e}",
            w[0],
            w[1],
            w[2],
            s.expected_excess_return,
            s.variance.sqrt(),
            s.foc_residual()
        );
    }

    let ra = RiskAversion::new(10.0)?;
    let s = solve_analytical(&p, ra)?;
    let eu = approx_expected_utility(&p, &s.weights, ra, 1.0)?;
    println!("approximate expected utility at gamma 10: {eu:.6}");

    let t = tangency(&p)?;
    println!(
        "tangency portfolio [{:.4}, {:.4}, {:.4}] is chosen at gamma {:.4}",
        t.weights[0], t.weights[1], t.weights[2], t.gamma_tgc
    );
    Ok(())
}
