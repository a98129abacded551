//! The Monte-Carlo comparison study: one shared scenario set, three
//! allocation methods per risk-aversion level, utility statistics and ECDF
//! tables per cell.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use nalgebra::DVector;
use serde::ser::{SerializeMap, Serializer};
use serde::Serialize;

use crate::closed_form::solve_analytical;
use crate::error::{Error, Result};
use crate::gradient::{gd_solve, GdConfig};
use crate::market::{gamma_lower_bound, MarketParams, RiskAversion};
use crate::simulation::{evaluate_strategy, simulate, Method, ScenarioSet};
use crate::stats::{ecdf, summarize, EcdfPoint, SummaryStats};
use crate::taylor::{taylor_solve, TaylorConfig};

#[derive(Clone, Debug)]
pub struct CompareConfig {
    pub gd: GdConfig,
    pub taylor: TaylorConfig,
    /// Grid size of each ECDF table.
    pub ecdf_points: usize,
}

impl Default for CompareConfig {
    fn default() -> Self {
        Self {
            gd: GdConfig::curvature_scaled(),
            taylor: TaylorConfig::default(),
            ecdf_points: 512,
        }
    }
}

/// Result of one `(gamma, method)` cell.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CellResult {
    #[serde(serialize_with = "crate::ser_dvec")]
    pub weights: DVector<f64>,
    pub stats: SummaryStats,
    pub infeasible_count: usize,
    /// Solver iterations (0 for the closed form).
    pub iterations: usize,
    #[serde(skip)]
    pub wealth_ecdf: Vec<EcdfPoint>,
    #[serde(skip)]
    pub utility_ecdf: Vec<EcdfPoint>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Cell {
    pub gamma: f64,
    pub method: Method,
    pub outcome: std::result::Result<CellResult, String>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ComparisonReport {
    pub n: usize,
    pub seed: u64,
    pub gamma_bound: f64,
    pub asset_names: Vec<String>,
    /// Ordered by gamma as given, then analytical, taylor, gd.
    pub cells: Vec<Cell>,
}

impl ComparisonReport {
    pub fn cell(&self, gamma: f64, method: Method) -> Option<&Cell> {
        self.cells
            .iter()
            .find(|c| c.gamma == gamma && c.method == method)
    }

    pub fn gammas(&self) -> Vec<f64> {
        let mut out: Vec<f64> = Vec::new();
        for c in &self.cells {
            if !out.contains(&c.gamma) {
                out.push(c.gamma);
            }
        }
        out
    }

    pub fn failed_cells(&self) -> usize {
        self.cells.iter().filter(|c| c.outcome.is_err()).count()
    }
}

/// Simulates `n` scenarios with `seed` and runs [`compare_on`] on them.
pub fn compare(
    p: &MarketParams,
    gammas: &[f64],
    n: usize,
    seed: u64,
    cfg: &CompareConfig,
) -> Result<ComparisonReport> {
    check_gammas(p, gammas)?;
    let scenarios = simulate(p, n, seed)?;
    compare_on(p, &scenarios, gammas, cfg)
}

fn check_gammas(p: &MarketParams, gammas: &[f64]) -> Result<Vec<RiskAversion>> {
    if gammas.is_empty() {
        return Err(Error::InvalidConfig("no risk-aversion levels given".into()));
    }
    let bound = gamma_lower_bound(p);
    gammas
        .iter()
        .map(|&g| {
            let ra = RiskAversion::new(g)?;
            if g < bound {
                return Err(Error::GammaBelowBound { gamma: g, bound });
            }
            Ok(ra)
        })
        .collect()
}

/// Runs every method at every `gamma` on one shared scenario set. Failures
/// of individual cells are recorded in the report without stopping the
/// others.
pub fn compare_on(
    p: &MarketParams,
    scenarios: &ScenarioSet,
    gammas: &[f64],
    cfg: &CompareConfig,
) -> Result<ComparisonReport> {
    let levels = check_gammas(p, gammas)?;
    if scenarios.k() != p.k() {
        return Err(Error::DimensionMismatch("scenario width differs from asset count".into()));
    }
    let rf = p.gross_rf();
    let mut cells = Vec::with_capacity(3 * levels.len());
    for ra in levels {
        for method in Method::ALL {
            let solved: Result<(DVector<f64>, usize)> = match method {
                Method::Analytical => solve_analytical(p, ra).map(|s| (s.weights, 0)),
                Method::Taylor => {
                    taylor_solve(scenarios, ra, rf, &cfg.taylor).map(|r| (r.weights, r.iterations))
                }
                Method::Gd => gd_solve(scenarios, ra, rf, &cfg.gd).map(|r| (r.weights, r.iterations)),
            };
            let outcome = solved
                .and_then(|(w, iterations)| evaluate_cell(scenarios, w, iterations, ra, rf, method, cfg))
                .map_err(|e| e.to_string());
            cells.push(Cell {
                gamma: ra.gamma(),
                method,
                outcome,
            });
        }
    }
    Ok(ComparisonReport {
        n: scenarios.n(),
        seed: scenarios.seed(),
        gamma_bound: gamma_lower_bound(p),
        asset_names: p
            .asset_names()
            .map(<[String]>::to_vec)
            .unwrap_or_else(|| (1..=p.k()).map(|i| format!("asset{i}")).collect()),
        cells,
    })
}

fn evaluate_cell(
    scenarios: &ScenarioSet,
    weights: DVector<f64>,
    iterations: usize,
    ra: RiskAversion,
    rf: f64,
    method: Method,
    cfg: &CompareConfig,
) -> Result<CellResult> {
    let outcome = evaluate_strategy(scenarios, &weights, ra, rf, method)?;
    let utilities = outcome.feasible_utilities();
    let stats = summarize(&utilities)
        .ok_or_else(|| Error::InvalidConfig("fewer than two feasible scenarios".into()))?;
    let wealths: Vec<f64> = outcome.wealths.iter().copied().filter(|w| *w > 0.0).collect();
    Ok(CellResult {
        weights,
        stats,
        infeasible_count: outcome.infeasible_count,
        iterations,
        wealth_ecdf: ecdf(&wealths, cfg.ecdf_points)?,
        utility_ecdf: ecdf(&utilities, cfg.ecdf_points)?,
    })
}

fn gamma_label(g: f64) -> String {
    format!("{g}")
}

/// Long-form `gamma,method,stat,value` table.
pub fn to_long_csv(report: &ComparisonReport) -> String {
    let mut out = String::from("gamma,method,stat,value\n");
    for cell in &report.cells {
        let g = gamma_label(cell.gamma);
        let m = cell.method;
        match &cell.outcome {
            Ok(r) => {
                let s = r.stats;
                for (name, v) in [("mean", s.mean), ("sd", s.sd), ("median", s.median), ("mad", s.mad)] {
                    let _ = writeln!(out, "{g},{m},{name},{v}");
                }
                let _ = writeln!(out, "{g},{m},infeasible_count,{}", r.infeasible_count);
                for (name, w) in report.asset_names.iter().zip(r.weights.iter()) {
                    let _ = writeln!(out, "{g},{m},weight_{name},{w}");
                }
            }
            Err(_) => {
                let _ = writeln!(out, "{g},{m},failed,1");
            }
        }
    }
    out
}

struct JsonReport<'a>(&'a ComparisonReport);
struct JsonGammas<'a>(&'a ComparisonReport);
struct JsonMethods<'a>(&'a ComparisonReport, f64);

#[derive(Serialize)]
struct JsonFailure<'a> {
    error: &'a str,
}

impl Serialize for JsonReport<'_> {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let r = self.0;
        let mut map = s.serialize_map(Some(5))?;
        map.serialize_entry("n", &r.n)?;
        map.serialize_entry("seed", &r.seed)?;
        map.serialize_entry("gamma_bound", &r.gamma_bound)?;
        map.serialize_entry("asset_names", &r.asset_names)?;
        map.serialize_entry("results", &JsonGammas(r))?;
        map.end()
    }
}

impl Serialize for JsonGammas<'_> {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let gammas = self.0.gammas();
        let mut map = s.serialize_map(Some(gammas.len()))?;
        for g in gammas {
            map.serialize_entry(&gamma_label(g), &JsonMethods(self.0, g))?;
        }
        map.end()
    }
}

impl Serialize for JsonMethods<'_> {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let cells: Vec<&Cell> = self.0.cells.iter().filter(|c| c.gamma == self.1).collect();
        let mut map = s.serialize_map(Some(cells.len()))?;
        for c in cells {
            match &c.outcome {
                Ok(r) => map.serialize_entry(c.method.as_str(), r)?,
                Err(e) => map.serialize_entry(c.method.as_str(), &JsonFailure { error: e })?,
            }
        }
        map.end()
    }
}

pub fn to_json(report: &ComparisonReport) -> Result<String> {
    let mut s = serde_json::to_string_pretty(&JsonReport(report))?;
    s.push('\n');
    Ok(s)
}

fn ecdf_csv(points: &[EcdfPoint]) -> String {
    let mut out = String::from("x,F\n");
    for p in points {
        let _ = writeln!(out, "{},{}", p.x, p.f);
    }
    out
}

/// Writes `comparison.csv`, `comparison.json` and one
/// `ecdf_<wealth|utility>_gamma<g>_<method>.csv` per successful cell into
/// `dir`, returning the paths written.
pub fn write_outputs(report: &ComparisonReport, dir: &Path) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(dir)?;
    let mut written = Vec::new();
    let mut put = |name: String, body: String| -> Result<()> {
        let path = dir.join(name);
        fs::write(&path, body)?;
        written.push(path);
        Ok(())
    };
    put("comparison.csv".into(), to_long_csv(report))?;
    put("comparison.json".into(), to_json(report)?)?;
    for cell in &report.cells {
        if let Ok(r) = &cell.outcome {
            let g = gamma_label(cell.gamma);
            put(format!("ecdf_wealth_gamma{g}_{}.csv", cell.method), ecdf_csv(&r.wealth_ecdf))?;
            put(format!("ecdf_utility_gamma{g}_{}.csv", cell.method), ecdf_csv(&r.utility_ecdf))?;
        }
    }
    Ok(written)
}

/// Formats `x` with six significant digits.
pub fn sig6(x: f64) -> String {
    if x == 0.0 || !x.is_finite() {
        return format!("{x}");
    }
    let digits = 5 - x.abs().log10().floor() as i32;
    if (0..=17).contains(&digits) {
        format!("{x:.*}", digits as usize)
    } else {
        format!("{x:.5e}")
    }
}

type StatFn = fn(&SummaryStats) -> f64;

/// Human-readable table: one block per gamma, rows mean/sd/median/mad,
/// one column per method.
pub fn render_table(report: &ComparisonReport) -> String {
    let mut out = String::new();
    let _ = writeln!(
        out,
        "{:>8}  {:<7} {:>14} {:>14} {:>14}",
        "gamma", "stat", "analytical", "taylor", "gd"
    );
    for g in report.gammas() {
        let rows: [(&str, StatFn); 4] = [
            ("mean", |s| s.mean),
            ("sd", |s| s.sd),
            ("median", |s| s.median),
            ("mad", |s| s.mad),
        ];
        for (i, (name, get)) in rows.iter().enumerate() {
            let label = if i == 0 { sig6(g) } else { String::new() };
            let _ = write!(out, "{label:>8}  {name:<7}");
            for m in Method::ALL {
                let v = match report.cell(g, m).map(|c| &c.outcome) {
                    Some(Ok(r)) => sig6(get(&r.stats)),
                    _ => "failed".into(),
                };
                let _ = write!(out, " {v:>14}");
            }
            out.push('\n');
        }
    }
    out
}
