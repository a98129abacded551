//! Gradient ascent on the sample-average utility of simulated scenarios,
//! with a fixed and with a curvature-scaled step.
//!
//!     cargo run --release --example gradient_ascent

use crra_opt::benchmark::study_params;
use crra_opt::gradient::v0_hessian;
use crra_opt::{gd_solve, simulate, solve_analytical, v0, GdConfig, LearningRate, RiskAversion};

fn main() -> crra_opt::Result<()> {
    let p = study_params();
    let rf = p.gross_rf();
    let ra = RiskAversion::new(10.0)?;
    let scenarios = simulate(&p, 200_000, 42)?;

    let auto = GdConfig {
        record_history: true,
        ..GdConfig::curvature_scaled()
    };
    let r = gd_solve(&scenarios, ra, rf, &auto)?;
    println!(
        "curvature step eta = {:.2}: {} iterations, |grad| = {:.2e}, V0 = {:.8}",
        r.learning_rate, r.iterations, r.final_gradient_norm, r.objective
    );
    println!("weights {:.5?}", r.weights.as_slice());
    let increasing = r.history.windows(2).all(|w| w[1] >= w[0]);
    println!("objective non-decreasing along the path: {increasing}");

    let eig = v0_hessian(&scenarios, &r.weights, ra, rf)?.symmetric_eigenvalues();
    let eig: Vec<String> = eig.iter().map(|e| format!("{e:.3e}")).collect();
    println!("Hessian eigenvalues at the optimum [{}]", eig.join(", "));

    // The textbook step is far too small for these weekly moments; cap the
    // run to show how far it gets.
    let fixed = GdConfig {
        learning_rate: LearningRate::Fixed(0.1),
        max_iter: 2_000,
        ..GdConfig::default()
    };
    match gd_solve(&scenarios, ra, rf, &fixed) {
        Ok(r) => println!("eta = 0.1 converged in {} iterations", r.iterations),
        Err(crra_opt::Error::GdNotConverged(r)) => println!(
            "eta = 0.1 after {} iterations: |grad| = {:.2e}, weights {:.5?}",
            r.iterations,
            r.final_gradient_norm,
            r.weights.as_slice()
        ),
        Err(e) => return Err(e),
    }

    let cf = solve_analytical(&p, ra)?;
    println!(
        "V0 at the closed-form weights {:.8} (gradient ascent {:.8})",
        v0(&scenarios, &cf.weights, ra, rf)?,
        r.objective
    );
    Ok(())
}
