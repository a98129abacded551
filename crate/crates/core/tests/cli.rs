use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use tempfile::TempDir;

const BIN: &str = env!("CARGO_BIN_EXE_crra-opt");

const STUDY_PARAMS: &str = r#"{
  "mu": [0.00134, 0.00231, 0.00139],
  "sigma": [[0.000545, 0.000319, 0.000341], [0.000319, 0.000410, 0.000393], [0.000341, 0.000393, 0.000487]],
  "r_f": 0.0006,
  "asset_names": ["DAX", "NASDAQ_FUT", "RUSSELL2000_FUT"]
}"#;

const SCALAR_PARAMS: &str = r#"{"mu": [0.05], "sigma": [[0.01]], "r_f": 0.0}"#;

fn run(args: &[&str]) -> Output {
    Command::new(BIN).args(args).output().expect("binary runs")
}

fn put(dir: &TempDir, name: &str, body: &str) -> PathBuf {
    let p = dir.path().join(name);
    fs::write(&p, body).unwrap();
    p
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn stdout_json(out: &Output) -> serde_json::Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

#[test]
fn estimate_writes_params_and_summary() {
    let dir = TempDir::new().unwrap();
    let prices = put(
        &dir,
        "weekly.csv",
        "date,A,B\n2020-01-06,100,50\n2020-01-13,101,49\n2020-01-20,103,50.5\n2020-01-27,102,51\n2020-02-03,104,50\n",
    );
    let out_path = dir.path().join("params.json");
    let out = run(&["estimate", "--prices", s(&prices), "--rf", "0.0006", "--out", s(&out_path)]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("k = 2") && text.contains("T = 5") && text.contains("1+4J"));
    let params: serde_json::Value = serde_json::from_str(&fs::read_to_string(out_path).unwrap()).unwrap();
    assert_eq!(params["r_f"], 0.0006);
    assert_eq!(params["asset_names"][1], "B");
}

#[test]
fn estimate_exit_codes() {
    let dir = TempDir::new().unwrap();
    let missing = dir.path().join("nope.csv");
    assert_eq!(run(&["estimate", "--prices", s(&missing)]).status.code(), Some(2));

    let flat = put(&dir, "flat.csv", "date,A,B\n2020-01-06,100,5\n2020-01-13,101,5\n2020-01-20,99,5\n2020-01-27,102,5\n");
    let out = run(&["estimate", "--prices", s(&flat), "--out", s(&dir.path().join("p.json"))]);
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("positive definite"));

    assert_eq!(run(&["estimate"]).status.code(), Some(1));
}

#[test]
fn analytical_solve_reports_foc_residual() {
    let dir = TempDir::new().unwrap();
    let params = put(&dir, "p.json", SCALAR_PARAMS);
    let out = run(&["solve", "--params", s(&params), "--gamma", "10", "--method", "analytical"]);
    assert_eq!(out.status.code(), Some(0));
    let v = stdout_json(&out);
    assert!(v["foc_residual"].as_f64().unwrap().abs() < 1e-10);
    assert!((v["weights"][0].as_f64().unwrap() - 0.5887451).abs() < 1e-7);
    for key in ["c", "J", "D", "gamma", "mean_excess", "variance", "method"] {
        assert!(v.get(key).is_some(), "missing {key}");
    }
}

#[test]
fn solve_below_bound_exits_4_and_prints_bound() {
    let dir = TempDir::new().unwrap();
    let params = put(&dir, "p.json", STUDY_PARAMS);
    let out = run(&["solve", "--params", s(&params), "--gamma", "1.05"]);
    assert_eq!(out.status.code(), Some(4));
    assert!(String::from_utf8_lossy(&out.stderr).contains("1.0772"));
}

#[test]
fn stochastic_solves_need_a_seed() {
    let dir = TempDir::new().unwrap();
    let params = put(&dir, "p.json", STUDY_PARAMS);
    let out = run(&["solve", "--params", s(&params), "--gamma", "10", "--method", "gd", "--samples", "1000"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn solve_all_reports_three_methods_and_distances() {
    let dir = TempDir::new().unwrap();
    let params = put(&dir, "p.json", STUDY_PARAMS);
    let out = run(&[
        "solve", "--params", s(&params), "--gamma", "10", "--method", "all", "--samples", "20000", "--seed", "42",
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let v = stdout_json(&out);
    assert_eq!(v["gd"]["converged"], true);
    assert_eq!(v["taylor"]["converged"], true);
    for key in ["iterations", "grad_norm", "objective"] {
        assert!(v["gd"].get(key).is_some(), "missing {key}");
    }
    assert!(v["max_abs_weight_diff"]["taylor_gd"].as_f64().unwrap() < 0.05);
}

#[test]
fn gd_iteration_cap_exits_5() {
    let dir = TempDir::new().unwrap();
    let params = put(&dir, "p.json", STUDY_PARAMS);
    let out = run(&[
        "solve", "--params", s(&params), "--gamma", "10", "--method", "gd", "--samples", "5000", "--seed", "1",
        "--eta", "0.1", "--gd-max-iter", "10",
    ]);
    assert_eq!(out.status.code(), Some(5));
}

#[test]
fn compare_writes_tables() {
    let dir = TempDir::new().unwrap();
    let params = put(&dir, "p.json", STUDY_PARAMS);
    let out_dir = dir.path().join("out");
    let out = run(&[
        "compare", "--params", s(&params), "--gammas", "5", "--samples", "1000", "--seed", "3", "--out-dir", s(&out_dir),
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let csv = fs::read_to_string(out_dir.join("comparison.csv")).unwrap();
    assert!(csv.starts_with("gamma,method,stat,value\n"));
    assert!(csv.contains("5,gd,mean,"));
    let json: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(out_dir.join("comparison.json")).unwrap()).unwrap();
    assert!(json["results"]["5"]["taylor"]["stats"]["sd"].is_number());
    assert!(out_dir.join("ecdf_utility_gamma5_analytical.csv").exists());
    assert!(String::from_utf8_lossy(&out.stdout).contains("median"));
}

#[test]
fn compare_below_bound_exits_4() {
    let dir = TempDir::new().unwrap();
    let params = put(&dir, "p.json", STUDY_PARAMS);
    let out = run(&[
        "compare", "--params", s(&params), "--gammas", "1.05", "--samples", "100", "--seed", "3",
        "--out-dir", s(&dir.path().join("out")),
    ]);
    assert_eq!(out.status.code(), Some(4));
}

#[test]
fn frontier_rows_and_tangency() {
    let dir = TempDir::new().unwrap();
    let params = put(&dir, "p.json", SCALAR_PARAMS);
    let out = run(&["frontier", "--params", s(&params), "--gamma-min", "2", "--gamma-max", "20", "--steps", "19"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("gamma,mean_excess,variance,tangency"));
    let rows: Vec<Vec<&str>> = lines.map(|l| l.split(',').collect()).collect();
    assert_eq!(rows.len(), 20);
    let grid: Vec<(f64, f64)> = rows[..19]
        .iter()
        .map(|r| (r[1].parse().unwrap(), r[2].parse().unwrap()))
        .collect();
    for w in grid.windows(2) {
        assert!(w[1].0 < w[0].0 && w[1].1 < w[0].1);
    }
    for (m, v) in &grid {
        assert!((m * m - 0.25 * v).abs() <= 1e-10 * m * m);
    }
    let t = &rows[19];
    assert_eq!(t[3], "true");
    assert!((t[0].parse::<f64>().unwrap() - 6.5125).abs() < 1e-9);
    // A single asset's tangency portfolio is the asset itself.
    assert!((t[1].parse::<f64>().unwrap() - 0.05).abs() < 1e-9);

    let out = run(&["frontier", "--params", s(&params), "--gamma-min", "1.5", "--gamma-max", "20"]);
    assert_eq!(out.status.code(), Some(4));
}

#[test]
fn help_lists_defaults() {
    for cmd in ["estimate", "solve", "compare", "frontier"] {
        let out = run(&[cmd, "--help"]);
        assert_eq!(out.status.code(), Some(0));
        let text = String::from_utf8(out.stdout).unwrap();
        assert!(text.contains("--params") || text.contains("--prices"));
    }
    let text = String::from_utf8(run(&["compare", "--help"]).stdout).unwrap();
    assert!(text.contains("[default: 5,10,15,20]") && text.contains("[default: auto]"));
}

#[test]
fn shipped_params_file_matches_benchmark() {
    let path = concat!(env!("CARGO_MANIFEST_DIR"), "/data/benchmark-params.json");
    let shipped = crra_opt::io::read_params_json(path).unwrap();
    let p = crra_opt::benchmark::study_params();
    assert_eq!(shipped.mu(), p.mu());
    assert_eq!(shipped.sigma(), p.sigma());
    assert_eq!(shipped.r_f(), p.r_f());
}
