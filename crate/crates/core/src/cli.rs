//! The `crra-opt` command line.
//!
//! Exit codes: 0 success, 1 usage error, 2 I/O error, 3 invalid input,
//! 4 risk aversion below `1 + 4J`, 5 solver did not converge.
//!
//! `CRRA_OPT_THREADS` sets the worker-thread count. Results do not depend
//! on it.

use std::fmt::Write as _;
use std::fs;
use std::io::Write as _;
use std::path::PathBuf;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};
use nalgebra::DVector;
use serde_json::{json, Map, Value};

use crate::closed_form::{frontier_point, solve_analytical, tangency};
use crate::compare::{compare, render_table, sig6, write_outputs, CompareConfig};
use crate::error::Error;
use crate::gradient::{gd_solve, GdConfig, LearningRate};
use crate::io::{read_params_json, read_price_csv, write_params_json};
use crate::market::{estimate_params, gamma_lower_bound, MarketParams, RiskAversion};
use crate::simulation::{simulate, ScenarioSet};
use crate::taylor::{taylor_solve, TaylorConfig};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_IO: i32 = 2;
pub const EXIT_INVALID: i32 = 3;
pub const EXIT_BELOW_BOUND: i32 = 4;
pub const EXIT_NOT_CONVERGED: i32 = 5;

pub const THREADS_ENV: &str = "CRRA_OPT_THREADS";

#[derive(Debug, Parser)]
#[command(name = "crra-opt", version, about = "Optimal portfolio weights for power-utility investors")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Estimate mean excess returns and covariance from a price CSV.
    Estimate(EstimateArgs),
    /// Compute optimal weights for one risk aversion.
    Solve(SolveArgs),
    /// Run all methods on one simulated scenario set and tabulate utilities.
    Compare(CompareArgs),
    /// Mean-variance points of the closed-form portfolio over a gamma grid.
    Frontier(FrontierArgs),
}

#[derive(Debug, Args)]
pub struct EstimateArgs {
    /// Price CSV with header `date,<asset>,...`.
    #[arg(long)]
    pub prices: PathBuf,
    /// Per-period risk-free rate, subtracted from simple returns.
    #[arg(long, default_value_t = 0.0)]
    pub rf: f64,
    /// Output params JSON.
    #[arg(long, default_value = "params.json")]
    pub out: PathBuf,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum SolveMethod {
    Analytical,
    Gd,
    Taylor,
    All,
}

/// `auto` or a positive number.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Eta {
    Auto,
    Fixed(f64),
}

impl FromStr for Eta {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        if s.eq_ignore_ascii_case("auto") {
            return Ok(Eta::Auto);
        }
        match s.parse::<f64>() {
            Ok(v) if v > 0.0 && v.is_finite() => Ok(Eta::Fixed(v)),
            _ => Err(format!("expected `auto` or a positive number, got {s:?}")),
        }
    }
}

#[derive(Debug, Args)]
pub struct SolverArgs {
    /// Gradient-ascent step: a number, or `auto` for 1/L with L the largest
    /// curvature of V0 at the start.
    #[arg(long, default_value = "auto")]
    pub eta: Eta,
    /// Gradient-norm tolerance of gradient ascent.
    #[arg(long, default_value_t = 1e-8)]
    pub gd_tol: f64,
    /// Iteration cap of gradient ascent.
    #[arg(long, default_value_t = 100_000)]
    pub gd_max_iter: usize,
    /// Step-norm tolerance of the Taylor iteration.
    #[arg(long, default_value_t = 1e-10)]
    pub taylor_tol: f64,
    /// Iteration cap of the Taylor iteration.
    #[arg(long, default_value_t = 1000)]
    pub taylor_max_iter: usize,
}

impl SolverArgs {
    fn gd(&self) -> GdConfig {
        GdConfig {
            learning_rate: match self.eta {
                Eta::Auto => LearningRate::Curvature(1.0),
                Eta::Fixed(v) => LearningRate::Fixed(v),
            },
            tol: self.gd_tol,
            max_iter: self.gd_max_iter,
            ..GdConfig::default()
        }
    }

    fn taylor(&self) -> TaylorConfig {
        TaylorConfig {
            tol: self.taylor_tol,
            max_iter: self.taylor_max_iter,
            ..TaylorConfig::default()
        }
    }
}

#[derive(Debug, Args)]
pub struct SolveArgs {
    /// Params JSON.
    #[arg(long)]
    pub params: PathBuf,
    #[arg(long)]
    pub gamma: f64,
    #[arg(long, value_enum, default_value_t = SolveMethod::Analytical)]
    pub method: SolveMethod,
    /// Scenario count for gd and taylor.
    #[arg(long)]
    pub samples: Option<usize>,
    /// Scenario seed for gd and taylor.
    #[arg(long)]
    pub seed: Option<u64>,
    #[command(flatten)]
    pub solver: SolverArgs,
    /// Write the report here instead of standard output.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct CompareArgs {
    /// Params JSON.
    #[arg(long)]
    pub params: PathBuf,
    /// Comma-separated risk-aversion levels.
    #[arg(long, value_delimiter = ',', default_value = "5,10,15,20")]
    pub gammas: Vec<f64>,
    #[arg(long, default_value_t = 1_000_000)]
    pub samples: usize,
    /// Scenario seed (required).
    #[arg(long)]
    pub seed: u64,
    #[command(flatten)]
    pub solver: SolverArgs,
    /// Grid points per ECDF table.
    #[arg(long, default_value_t = 512)]
    pub ecdf_points: usize,
    /// Directory for comparison.csv, comparison.json and ECDF tables.
    #[arg(long, default_value = "compare-out")]
    pub out_dir: PathBuf,
}

#[derive(Debug, Args)]
pub struct FrontierArgs {
    /// Params JSON.
    #[arg(long)]
    pub params: PathBuf,
    #[arg(long)]
    pub gamma_min: f64,
    #[arg(long)]
    pub gamma_max: f64,
    /// Number of grid points, endpoints included.
    #[arg(long, default_value_t = 50)]
    pub steps: usize,
    /// Write the CSV here instead of standard output.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug)]
struct Failure {
    code: i32,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match &e {
            Error::Io(_) => EXIT_IO,
            Error::Csv(c) if matches!(c.kind(), csv::ErrorKind::Io(_)) => EXIT_IO,
            Error::GammaBelowBound { .. } => EXIT_BELOW_BOUND,
            Error::GdNotConverged(_) | Error::TaylorNotConverged(_) => EXIT_NOT_CONVERGED,
            _ => EXIT_INVALID,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

fn usage(message: impl Into<String>) -> Failure {
    Failure {
        code: EXIT_USAGE,
        message: message.into(),
    }
}

type CmdResult = Result<(), Failure>;

/// Parses `std::env::args` and runs the command. Returns the exit code.
pub fn run() -> i32 {
    run_from(std::env::args_os())
}

pub fn run_from<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    if let Err(f) = configure_threads() {
        eprintln!("error: {}", f.message);
        return f.code;
    }
    let result = match cli.command {
        Command::Estimate(a) => cmd_estimate(&a),
        Command::Solve(a) => cmd_solve(&a),
        Command::Compare(a) => cmd_compare(&a),
        Command::Frontier(a) => cmd_frontier(&a),
    };
    match result {
        Ok(()) => EXIT_OK,
        Err(f) => {
            eprintln!("error: {}", f.message);
            f.code
        }
    }
}

fn configure_threads() -> CmdResult {
    let Ok(raw) = std::env::var(THREADS_ENV) else {
        return Ok(());
    };
    let n: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| usage(format!("{THREADS_ENV} must be a positive integer, got {raw:?}")))?;
    // A pool may already exist when called more than once in one process.
    let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    Ok(())
}

fn join6(v: impl IntoIterator<Item = f64>) -> String {
    v.into_iter().map(sig6).collect::<Vec<_>>().join(", ")
}

fn emit(out: Option<&PathBuf>, body: &str) -> CmdResult {
    match out {
        Some(path) => fs::write(path, body).map_err(|e| Failure::from(Error::Io(e))),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(body.as_bytes())
                .map_err(|e| Failure::from(Error::Io(e)))
        }
    }
}

fn cmd_estimate(a: &EstimateArgs) -> CmdResult {
    let series = read_price_csv(&a.prices)?;
    let p = estimate_params(&series, a.rf)?;
    write_params_json(&p, &a.out)?;
    let mut s = String::new();
    let _ = writeln!(s, "k = {}", p.k());
    let _ = writeln!(s, "T = {}", series.len());
    let _ = writeln!(s, "mu = [{}]", join6(p.mu().iter().copied()));
    let _ = writeln!(s, "diag(Sigma) = [{}]", join6(p.sigma().diagonal().iter().copied()));
    let _ = writeln!(s, "1+4J = {}", sig6(gamma_lower_bound(&p)));
    let _ = writeln!(s, "wrote {}", a.out.display());
    emit(None, &s)
}

fn weights_value(w: &DVector<f64>) -> Value {
    Value::from(w.iter().copied().collect::<Vec<f64>>())
}

fn scenarios_for(p: &MarketParams, a: &SolveArgs) -> Result<ScenarioSet, Failure> {
    let n = a
        .samples
        .ok_or_else(|| usage("--samples is required for gd and taylor"))?;
    let seed = a
        .seed
        .ok_or_else(|| usage("--seed is required for gd and taylor"))?;
    if n == 0 {
        return Err(usage("--samples must be at least 1"));
    }
    Ok(simulate(p, n, seed)?)
}

fn analytical_report(p: &MarketParams, ra: RiskAversion) -> Result<(Value, DVector<f64>), Failure> {
    let s = solve_analytical(p, ra)?;
    let v = json!({
        "method": "analytical",
        "weights": weights_value(&s.weights),
        "c": s.c,
        "J": s.j,
        "D": s.d,
        "gamma": s.gamma,
        "mean_excess": s.expected_excess_return,
        "variance": s.variance,
        "foc_residual": s.foc_residual(),
    });
    Ok((v, s.weights))
}

fn gd_report(
    scenarios: &ScenarioSet,
    ra: RiskAversion,
    rf: f64,
    cfg: &GdConfig,
) -> Result<(Value, DVector<f64>), Failure> {
    let r = gd_solve(scenarios, ra, rf, cfg)?;
    let v = json!({
        "method": "gd",
        "weights": weights_value(&r.weights),
        "iterations": r.iterations,
        "grad_norm": r.final_gradient_norm,
        "objective": r.objective,
        "learning_rate": r.learning_rate,
        "converged": r.converged,
    });
    Ok((v, r.weights))
}

fn taylor_report(
    scenarios: &ScenarioSet,
    ra: RiskAversion,
    rf: f64,
    cfg: &TaylorConfig,
) -> Result<(Value, DVector<f64>), Failure> {
    let r = taylor_solve(scenarios, ra, rf, cfg)?;
    let v = json!({
        "method": "taylor",
        "weights": weights_value(&r.weights),
        "iterations": r.iterations,
        "converged": r.converged,
    });
    Ok((v, r.weights))
}

fn max_abs_diff(a: &DVector<f64>, b: &DVector<f64>) -> f64 {
    (a - b).amax()
}

fn cmd_solve(a: &SolveArgs) -> CmdResult {
    let p = read_params_json(&a.params)?;
    let ra = RiskAversion::new(a.gamma)?;
    let rf = p.gross_rf();
    let report = match a.method {
        SolveMethod::Analytical => analytical_report(&p, ra)?.0,
        SolveMethod::Gd => gd_report(&scenarios_for(&p, a)?, ra, rf, &a.solver.gd())?.0,
        SolveMethod::Taylor => taylor_report(&scenarios_for(&p, a)?, ra, rf, &a.solver.taylor())?.0,
        SolveMethod::All => {
            let (av, aw) = analytical_report(&p, ra)?;
            let scenarios = scenarios_for(&p, a)?;
            let (tv, tw) = taylor_report(&scenarios, ra, rf, &a.solver.taylor())?;
            let (gv, gw) = gd_report(&scenarios, ra, rf, &a.solver.gd())?;
            let mut distances = Map::new();
            distances.insert("analytical_taylor".into(), max_abs_diff(&aw, &tw).into());
            distances.insert("analytical_gd".into(), max_abs_diff(&aw, &gw).into());
            distances.insert("taylor_gd".into(), max_abs_diff(&tw, &gw).into());
            json!({
                "analytical": av,
                "taylor": tv,
                "gd": gv,
                "max_abs_weight_diff": distances,
            })
        }
    };
    let mut body = serde_json::to_string_pretty(&report).map_err(|e| Failure::from(Error::Json(e)))?;
    body.push('\n');
    emit(a.out.as_ref(), &body)
}

fn cmd_compare(a: &CompareArgs) -> CmdResult {
    if a.samples == 0 {
        return Err(usage("--samples must be at least 1"));
    }
    let p = read_params_json(&a.params)?;
    let cfg = CompareConfig {
        gd: a.solver.gd(),
        taylor: a.solver.taylor(),
        ecdf_points: a.ecdf_points,
    };
    let report = compare(&p, &a.gammas, a.samples, a.seed, &cfg)?;
    write_outputs(&report, &a.out_dir)?;
    let mut s = render_table(&report);
    for cell in &report.cells {
        if let Err(msg) = &cell.outcome {
            let _ = writeln!(s, "gamma {} {}: failed: {msg}", cell.gamma, cell.method);
        }
    }
    let _ = writeln!(s, "wrote {}", a.out_dir.display());
    emit(None, &s)?;
    if report.failed_cells() == report.cells.len() {
        return Err(Failure {
            code: EXIT_INVALID,
            message: "every cell failed".into(),
        });
    }
    Ok(())
}

fn cmd_frontier(a: &FrontierArgs) -> CmdResult {
    let p = read_params_json(&a.params)?;
    if a.steps < 2 {
        return Err(usage("--steps must be at least 2"));
    }
    if !(a.gamma_min < a.gamma_max) {
        return Err(usage("--gamma-min must be below --gamma-max"));
    }
    let bound = gamma_lower_bound(&p);
    if a.gamma_min < bound {
        return Err(Error::GammaBelowBound {
            gamma: a.gamma_min,
            bound,
        }
        .into());
    }
    let mut csv = String::from("gamma,mean_excess,variance,tangency\n");
    let h = (a.gamma_max - a.gamma_min) / (a.steps - 1) as f64;
    for i in 0..a.steps {
        let g = if i == a.steps - 1 {
            a.gamma_max
        } else {
            a.gamma_min + h * i as f64
        };
        let fp = frontier_point(&p, RiskAversion::new(g)?)?;
        let _ = writeln!(csv, "{},{},{},false", fp.gamma, fp.mean, fp.variance);
    }
    match tangency(&p) {
        Ok(t) => {
            let _ = writeln!(
                csv,
                "{},{},{},true",
                t.gamma_tgc, t.expected_excess_return, t.variance
            );
            eprintln!(
                "tangency: gamma = {}, weights = [{}]",
                sig6(t.gamma_tgc),
                join6(t.weights.iter().copied())
            );
            if !t.on_selected_root() {
                eprintln!("note: the closed form at this gamma selects a less leveraged portfolio");
            }
        }
        Err(e) => eprintln!("no tangency row: {e}"),
    }
    emit(a.out.as_ref(), &csv)
}
