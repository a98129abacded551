//! The full comparison study: one simulated scenario set, three methods,
//! four risk aversions. Writes the long CSV, JSON and ECDF tables.
//!
//!     cargo run --release --example comparison_study -- [samples] [seed]

use crra_opt::benchmark::{study_params, REPORTED_UTILITY_STATS, STUDY_GAMMAS};
use crra_opt::compare::{render_table, write_outputs};
use crra_opt::{compare, CompareConfig, Method};

fn main() -> crra_opt::Result<()> {
    let mut args = std::env::args().skip(1);
    let n: usize = args.next().and_then(|s| s.parse().ok()).unwrap_or(200_000);
    let seed: u64 = args.next().and_then(|s| s.parse().ok()).unwrap_or(7);

    let p = study_params();
    let report = compare(&p, &STUDY_GAMMAS, n, seed, &CompareConfig::default())?;
    print!("{}", render_table(&report));

    println!("\nmean utility minus reported value");
    for (gamma, rows) in REPORTED_UTILITY_STATS {
        let diffs: Vec<String> = Method::ALL
            .iter()
            .zip(rows)
            .map(|(&m, reported)| match &report.cell(gamma, m).unwrap().outcome {
                Ok(c) => format!("{m} {:+.1e}", c.stats.mean - reported[0]),
                Err(e) => format!("{m} failed: {e}"),
            })
            .collect();
        println!("gamma {gamma:>4}: {}", diffs.join(", "));
    }

    let dir = std::env::temp_dir().join("crra-opt-comparison-example");
    let files = write_outputs(&report, &dir)?;
    println!("\n{} files written to {}", files.len(), dir.display());
    Ok(())
}
