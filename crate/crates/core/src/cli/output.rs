//! Profile tables and the JSON report.

use std::fmt::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::bvp::{Case, Profile};
use crate::error::{Error, Result};
use crate::model::{EvalPoint, Problem};
use crate::variational::{fd_slopes, EnergyReport};

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub lambda_star: Option<f64>,
    pub energy_total: f64,
    pub energy_term: f64,
    pub distortion_term: f64,
    pub el_residual: f64,
    pub case: Option<Case>,
    pub n: u32,
    pub r: f64,
    #[serde(rename = "R")]
    pub big_r: f64,
    pub r_star: f64,
    #[serde(rename = "R_star")]
    pub big_r_star: f64,
    pub alpha: f64,
}

impl Report {
    pub fn new(problem: &Problem, energy: &EnergyReport) -> Self {
        Self {
            lambda_star: energy.lambda_star,
            energy_total: energy.total,
            energy_term: energy.energy_term,
            distortion_term: energy.distortion_term,
            el_residual: energy.el_residual,
            case: energy.case.map(|c| c.case),
            n: problem.n(),
            r: problem.r(),
            big_r: problem.big_r(),
            r_star: problem.r_star(),
            big_r_star: problem.big_r_star(),
            alpha: problem.alpha(),
        }
    }

    pub fn to_json(&self) -> Result<String> {
        let numbers = [
            self.energy_total,
            self.energy_term,
            self.distortion_term,
            self.el_residual,
            self.r,
            self.big_r,
            self.r_star,
            self.big_r_star,
            self.alpha,
        ];
        if numbers.iter().chain(self.lambda_star.iter()).any(|x| !x.is_finite()) {
            return Err(Error::Evaluation("report contains a non-finite value".into()));
        }
        serde_json::to_string_pretty(self).map_err(|e| Error::Evaluation(e.to_string())).map(|s| s + "\n")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::InvalidArgument(format!("bad report: {e}")))
    }
}

pub const PROFILE_COLUMNS: [&str; 5] = ["s", "H", "Hdot", "H_minus_sHdot", "L"];

/// Rows `(s, H, H', H - sH', L)` of a profile.
pub fn profile_rows(profile: &Profile, problem: &Problem) -> Vec<[f64; 5]> {
    let f = problem.integrand();
    (0..profile.len())
        .map(|i| {
            let (s, h, k) = (profile.grid[i], profile.h[i], profile.k[i]);
            [s, h, k, h - s * k, f.lagrangian(&EvalPoint { s, h, k })]
        })
        .collect()
}

pub fn render_table(columns: &[&str], rows: &[Vec<f64>], format: Format) -> String {
    match format {
        Format::Csv => {
            let mut out = columns.join(",");
            out.push('\n');
            for row in rows {
                let cells: Vec<String> = row.iter().map(|x| x.to_string()).collect();
                out.push_str(&cells.join(","));
                out.push('\n');
            }
            out
        }
        Format::Json => {
            let records: Vec<serde_json::Map<String, serde_json::Value>> = rows
                .iter()
                .map(|row| columns.iter().zip(row).map(|(c, x)| (c.to_string(), serde_json::json!(x))).collect())
                .collect();
            let mut out = serde_json::to_string_pretty(&records).unwrap_or_default();
            out.push('\n');
            out
        }
    }
}

pub fn render_profile(profile: &Profile, problem: &Problem, format: Format) -> String {
    let rows: Vec<Vec<f64>> = profile_rows(profile, problem).iter().map(|r| r.to_vec()).collect();
    render_table(&PROFILE_COLUMNS, &rows, format)
}

/// Reads a CSV profile with columns `s`, `H` and optionally `Hdot`; missing
/// slopes are recovered by differences.
pub fn parse_profile_csv(text: &str) -> Result<Profile> {
    let mut lines = text.lines().filter(|l| !l.trim().is_empty());
    let header: Vec<&str> = lines.next().ok_or_else(|| bad("empty profile file"))?.split(',').map(str::trim).collect();
    let column = |name: &str| header.iter().position(|c| *c == name);
    let s_col = column("s").ok_or_else(|| bad("profile needs an `s` column"))?;
    let h_col = column("H").ok_or_else(|| bad("profile needs an `H` column"))?;
    let k_col = column("Hdot");
    let (mut grid, mut h, mut k) = (Vec::new(), Vec::new(), Vec::new());
    for (i, line) in lines.enumerate() {
        let cells: Vec<&str> = line.split(',').map(str::trim).collect();
        let cell = |j: usize| -> Result<f64> {
            let raw = cells.get(j).ok_or_else(|| bad(&format!("row {} is short", i + 1)))?;
            raw.parse().map_err(|_| bad(&format!("row {}: cannot parse {raw:?}", i + 1)))
        };
        grid.push(cell(s_col)?);
        h.push(cell(h_col)?);
        if let Some(j) = k_col {
            k.push(cell(j)?);
        }
    }
    if grid.len() < 2 {
        return Err(bad("profile needs at least two rows"));
    }
    if k_col.is_none() {
        k = fd_slopes(&grid, &h);
    }
    Ok(Profile { initial_slope: k[0], grid, h, k, lambda: None })
}

fn bad(msg: &str) -> Error {
    Error::InvalidArgument(msg.to_string())
}

pub fn write_file(dir: &Path, name: &str, contents: &str) -> Result<()> {
    std::fs::write(dir.join(name), contents).map_err(|e| Error::InvalidArgument(format!("cannot write {name}: {e}")))
}

/// Human-readable one-line-per-field summary.
pub fn summary(report: &Report, end_error: Option<f64>) -> String {
    let mut out = String::new();
    match report.lambda_star {
        Some(l) => writeln!(out, "lambda*      = {l}").ok(),
        None => writeln!(out, "lambda*      = -").ok(),
    };
    match report.case {
        Some(c) => writeln!(out, "case         = {c}").ok(),
        None => writeln!(out, "case         = -").ok(),
    };
    writeln!(out, "energy       = {}", report.energy_total).ok();
    writeln!(out, "  n-energy   = {}", report.energy_term).ok();
    writeln!(out, "  distortion = {}", report.distortion_term).ok();
    writeln!(out, "el_residual  = {:.3e}", report.el_residual).ok();
    if let Some(e) = end_error {
        writeln!(out, "|H(R) - R*|  = {e:.3e}").ok();
    }
    out
}
