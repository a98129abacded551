//! Builds a synthetic weekly price file, reads it back and estimates the
//! params JSON the solvers consume.
//!
//!     cargo run --example estimate_from_prices

use std::fmt::Write as _;

use chrono::{Duration, NaiveDate};
use crra_opt::benchmark::study_params;
use crra_opt::io::{read_params_json, read_price_csv, write_params_json};
use crra_opt::{estimate_params, gamma_lower_bound, simulate};

fn main() -> crra_opt::Result<()> {
    let truth = study_params();
    let weeks = 400;
    let returns = simulate(&truth, weeks, 2019)?;

    let mut csv = String::from("date,DAX,NASDAQ_FUT,RUSSELL2000_FUT\n");
    let mut prices = [100.0_f64; 3];
    let start = NaiveDate::from_ymd_opt(2012, 1, 16).unwrap();
    for t in 0..=weeks {
        if t > 0 {
            for (p, r) in prices.iter_mut().zip(returns.row(t - 1)) {
                *p *= 1.0 + truth.r_f() + r;
            }
        }
        let date = start + Duration::weeks(t as i64);
        let _ = writeln!(csv, "{date},{:.4},{:.4},{:.4}", prices[0], prices[1], prices[2]);
    }

    let dir = std::env::temp_dir().join("crra-opt-estimate-example");
    std::fs::create_dir_all(&dir)?;
    let price_path = dir.join("weekly.csv");
    std::fs::write(&price_path, csv)?;

    let series = read_price_csv(&price_path)?;
    let est = estimate_params(&series, truth.r_f())?;
    let params_path = dir.join("params.json");
    write_params_json(&est, &params_path)?;
    let back = read_params_json(&params_path)?;

    println!("{} weekly prices, {} assets", series.len(), est.k());
    for (i, name) in series.asset_names().iter().enumerate() {
        println!(
            "{name:>16}  mu {:+.5} (true {:+.5})  var {:.6} (true {:.6})",
            est.mu()[i],
            truth.mu()[i],
            est.sigma()[(i, i)],
            truth.sigma()[(i, i)]
        );
    }
    println!("1+4J estimated {:.6}, true {:.6}", gamma_lower_bound(&est), gamma_lower_bound(&truth));
    println!("params written to {} (round trip exact: {})", params_path.display(), back.mu() == est.mu());
    Ok(())
}
