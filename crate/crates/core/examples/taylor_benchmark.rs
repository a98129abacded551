//! The Taylor fixed-point solver against gradient ascent on one shared
//! scenario set.
//!
//!     cargo run --release --example taylor_benchmark

use crra_opt::benchmark::{study_params, STUDY_GAMMAS};
use crra_opt::{gd_solve, simulate, taylor_solve, v0, GdConfig, RiskAversion, TaylorConfig};

fn main() -> crra_opt::Result<()> {
    let p = study_params();
    let rf = p.gross_rf();
    let scenarios = simulate(&p, 200_000, 7)?;

    println!("{:>6} {:>6} {:>12} {:>14} {:>14}", "gamma", "iters", "max |diff|", "V0 taylor", "V0 gd");
    for gamma in STUDY_GAMMAS {
        let ra = RiskAversion::new(gamma)?;
        let t = taylor_solve(&scenarios, ra, rf, &TaylorConfig::default())?;
        let g = gd_solve(&scenarios, ra, rf, &GdConfig::curvature_scaled())?;
        println!(
            "{gamma:>6} {:>6} {:>12.2e} {:>14.9} {:>14.9}",
            t.iterations,
            (&t.weights - &g.weights).amax(),
            v0(&scenarios, &t.weights, ra, rf)?,
            g.objective
        );
    }
    Ok(())
}
