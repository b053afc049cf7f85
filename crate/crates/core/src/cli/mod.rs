//! Command-line front end.
//!
//! `solve`, `verify`, `sweep` and `energy` share the problem flags
//! `--n --r --R --r-star --R-star --alpha`, which may also come from a
//! `key=value` file given by `--config` (flags win). Exit status is 0 on
//! success, 1 when a solve or check fails and 2 on usage errors.

pub mod checks;
pub mod crosscheck;
pub mod output;

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;

use crate::bvp::{shoot_with, solve_profile_with, uniform_grid, Profile, ShootingOptions, Solution, Solver};
use crate::error::Error;
use crate::model::Problem;
use crate::variational::{energy, total_energy};

use checks::CheckOutcome;
use output::{Format, Report};

pub const THREADS_ENV: &str = "ANNULUS_ENERGY_THREADS";

#[derive(Debug, Parser)]
#[command(name = "annulus-energy", version, about = "Minimal total-energy radial stretchings between annuli")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Solve for the minimizing profile and report its energy.
    Solve(SolveArgs),
    /// Solve, then run the invariant and minimality checks.
    Verify(VerifyArgs),
    /// Tabulate the shooting map over `λ` or the minimizer over `α`.
    Sweep(SweepArgs),
    /// Evaluate the energy of a given profile (the affine one by default).
    Energy(EnergyArgs),
}

#[derive(Debug, Clone, Args)]
struct CommonArgs {
    /// Dimension n >= 2.
    #[arg(long)]
    n: Option<u32>,
    /// Inner radius of the domain annulus.
    #[arg(long)]
    r: Option<f64>,
    /// Outer radius of the domain annulus.
    #[arg(long = "R")]
    big_r: Option<f64>,
    /// Inner radius of the target annulus.
    #[arg(long = "r-star")]
    r_star: Option<f64>,
    /// Outer radius of the target annulus.
    #[arg(long = "R-star")]
    big_r_star: Option<f64>,
    /// Weight of the n-energy, in (0, 1). Default 0.5.
    #[arg(long)]
    alpha: Option<f64>,
    /// key=value file with defaults for any flag.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Directory for output files.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Table format. Default csv.
    #[arg(long, value_enum)]
    format: Option<Format>,
    /// Relative tolerance on |H(R) - R*| / R*. Default 1e-9.
    #[arg(long)]
    tol: Option<f64>,
    /// Number of profile nodes. Default 512.
    #[arg(long)]
    grid: Option<usize>,
    /// Seed for random sampling. Default 1.
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Debug, Args)]
struct SolveArgs {
    #[command(flatten)]
    common: CommonArgs,
}

#[derive(Debug, Args)]
struct VerifyArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Random competitors for the dominance check; 0 skips it. Default 100.
    #[arg(long)]
    trials: Option<usize>,
    /// Cells of the discrete oracle; 0 skips it. Default 128.
    #[arg(long = "oracle-grid")]
    oracle_grid: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum SweepParam {
    Lambda,
    Alpha,
}

#[derive(Debug, Args)]
struct SweepArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Swept parameter.
    #[arg(long, value_enum)]
    param: Option<SweepParam>,
    /// First value.
    #[arg(long)]
    from: Option<f64>,
    /// Last value.
    #[arg(long)]
    to: Option<f64>,
    /// Number of values (>= 2). Default 9.
    #[arg(long)]
    points: Option<usize>,
    /// Largest allowed relative change of λ* between adjacent α. Default 0.25.
    #[arg(long = "max-jump")]
    max_jump: Option<f64>,
}

#[derive(Debug, Args)]
struct EnergyArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// CSV with columns s, H and optionally Hdot.
    #[arg(long)]
    profile: Option<PathBuf>,
}

#[derive(Debug)]
enum Failure {
    Usage(String),
    Run(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Run(e.to_string())
    }
}

fn usage(msg: impl Into<String>) -> Failure {
    Failure::Usage(msg.into())
}

/// Parsed `key=value` configuration file. Keys use `_` or `-` interchangeably.
#[derive(Debug, Default)]
struct Config {
    values: BTreeMap<String, String>,
}

const CONFIG_KEYS: [&str; 20] = [
    "n", "r", "R", "r_star", "R_star", "alpha", "out", "format", "tol", "grid", "seed", "trials", "oracle_grid",
    "param", "from", "to", "points", "max_jump", "profile", "config",
];

impl Config {
    fn load(path: Option<&Path>) -> Result<Self, Failure> {
        let Some(path) = path else { return Ok(Self::default()) };
        let text = std::fs::read_to_string(path).map_err(|e| usage(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    fn parse(text: &str) -> Result<Self, Failure> {
        let mut values = BTreeMap::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) =
                line.split_once('=').ok_or_else(|| usage(format!("config line {}: expected key=value", i + 1)))?;
            let key = key.trim().replace('-', "_");
            if !CONFIG_KEYS.contains(&key.as_str()) || key == "config" {
                return Err(usage(format!("config line {}: unknown key {key:?}", i + 1)));
            }
            values.insert(key, value.trim().to_string());
        }
        Ok(Self { values })
    }

    fn pick<T: FromStr>(&self, flag: Option<T>, key: &str) -> Result<Option<T>, Failure> {
        if flag.is_some() {
            return Ok(flag);
        }
        match self.values.get(key) {
            None => Ok(None),
            Some(raw) => raw.parse().map(Some).map_err(|_| usage(format!("config: invalid value {raw:?} for {key}"))),
        }
    }

    fn pick_enum<T: ValueEnum>(&self, flag: Option<T>, key: &str) -> Result<Option<T>, Failure> {
        if flag.is_some() {
            return Ok(flag);
        }
        match self.values.get(key) {
            None => Ok(None),
            Some(raw) => T::from_str(raw, true).map(Some).map_err(|_| usage(format!("config: invalid value {raw:?} for {key}"))),
        }
    }
}

#[derive(Debug)]
struct Settings {
    problem: Problem,
    out: Option<PathBuf>,
    format: Format,
    options: ShootingOptions,
    seed: u64,
}

fn resolve(common: &CommonArgs, cfg: &Config) -> Result<Settings, Failure> {
    let required = |v: Option<f64>, flag: &str| v.ok_or_else(|| usage(format!("missing required flag --{flag}")));
    let n = cfg.pick(common.n, "n")?.ok_or_else(|| usage("missing required flag --n"))?;
    let r = required(cfg.pick(common.r, "r")?, "r")?;
    let big_r = required(cfg.pick(common.big_r, "R")?, "R")?;
    let r_star = required(cfg.pick(common.r_star, "r_star")?, "r-star")?;
    let big_r_star = required(cfg.pick(common.big_r_star, "R_star")?, "R-star")?;
    let alpha = cfg.pick(common.alpha, "alpha")?.unwrap_or(0.5);
    let problem = Problem::new(n, r, big_r, r_star, big_r_star, alpha).map_err(|e| usage(e.to_string()))?;

    let tol = cfg.pick(common.tol, "tol")?.unwrap_or(1e-9);
    if !(tol > 0.0 && tol < 1.0) {
        return Err(usage(format!("--tol must lie in (0, 1), got {tol}")));
    }
    let grid = cfg.pick(common.grid, "grid")?.unwrap_or(512);
    if grid < 16 {
        return Err(usage(format!("--grid must be at least 16, got {grid}")));
    }
    let out = cfg.pick(common.out.clone(), "out")?;
    if let Some(dir) = &out {
        check_writable(dir)?;
    }
    Ok(Settings {
        problem,
        out,
        format: cfg.pick_enum(common.format, "format")?.unwrap_or(Format::Csv),
        options: ShootingOptions { tol, grid_size: grid, ..ShootingOptions::default() },
        seed: cfg.pick(common.seed, "seed")?.unwrap_or(1),
    })
}

fn check_writable(dir: &Path) -> Result<(), Failure> {
    std::fs::create_dir_all(dir).map_err(|e| usage(format!("cannot create {}: {e}", dir.display())))?;
    let probe = dir.join(".annulus-energy-write-test");
    std::fs::write(&probe, b"").map_err(|e| usage(format!("{} is not writable: {e}", dir.display())))?;
    std::fs::remove_file(&probe).ok();
    Ok(())
}

/// Runs the command line `args` (program name first), writing normal output
/// to `out` and diagnostics to `err`. Returns the process exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let sink: &mut dyn Write = if e.use_stderr() { err } else { out };
            write!(sink, "{}", e.render()).ok();
            return code;
        }
    };
    let result = match &cli.command {
        Command::Solve(a) => cmd_solve(a, out),
        Command::Verify(a) => cmd_verify(a, out, err),
        Command::Sweep(a) => cmd_sweep(a, out, err),
        Command::Energy(a) => cmd_energy(a, out),
    };
    match result {
        Ok(code) => code,
        Err(Failure::Usage(msg)) => {
            writeln!(err, "error: {msg}").ok();
            2
        }
        Err(Failure::Run(msg)) => {
            writeln!(err, "error: {msg}").ok();
            1
        }
    }
}

fn emit(out: &mut dyn Write, text: &str) -> Result<(), Failure> {
    out.write_all(text.as_bytes()).map_err(|e| Failure::Run(format!("write failed: {e}")))
}

fn solve(settings: &Settings) -> Result<Solution, Failure> {
    Ok(Solver::new(settings.options).solve(&settings.problem)?)
}

fn cmd_solve(args: &SolveArgs, out: &mut dyn Write) -> Result<i32, Failure> {
    let cfg = Config::load(args.common.config.as_deref())?;
    let settings = resolve(&args.common, &cfg)?;
    let problem = &settings.problem;
    let solution = solve(&settings)?;
    let report = Report::new(problem, &total_energy(&solution.profile, problem)?);
    let json = report.to_json()?;
    if let Some(dir) = &settings.out {
        let (name, table) = match settings.format {
            Format::Csv => ("profile.csv", output::render_profile(&solution.profile, problem, Format::Csv)),
            Format::Json => ("profile.json", output::render_profile(&solution.profile, problem, Format::Json)),
        };
        output::write_file(dir, name, &table)?;
        output::write_file(dir, "report.json", &json)?;
    }
    let end_error = (solution.profile.end_value() - problem.big_r_star()).abs();
    emit(out, &output::summary(&report, Some(end_error)))?;
    Ok(0)
}

fn cmd_verify(args: &VerifyArgs, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32, Failure> {
    let cfg = Config::load(args.common.config.as_deref())?;
    let settings = resolve(&args.common, &cfg)?;
    let trials = cfg.pick(args.trials, "trials")?.unwrap_or(100);
    let oracle_grid = cfg.pick(args.oracle_grid, "oracle_grid")?.unwrap_or(128);
    if oracle_grid != 0 && oracle_grid < 32 {
        return Err(usage(format!("--oracle-grid must be 0 or at least 32, got {oracle_grid}")));
    }
    let problem = &settings.problem;
    let solution = solve(&settings)?;
    let results = run_checks(problem, &solution, &settings, trials, oracle_grid);
    for c in &results {
        emit(out, &format!("{c}\n"))?;
    }

    if problem.n() == 2 {
        let report = crosscheck::planar_crosscheck(problem, 1000, settings.seed)?;
        match &settings.out {
            Some(dir) => {
                let json = serde_json::to_string_pretty(&report).map_err(|e| Failure::Run(e.to_string()))? + "\n";
                output::write_file(dir, "n2_crosscheck.json", &json)?;
                output::write_file(dir, "n2_crosscheck.txt", &report.to_text())?;
                emit(out, &format!("planar cross-check written to {}\n", dir.join("n2_crosscheck.json").display()))?;
            }
            None => emit(out, &report.to_text())?,
        }
    }

    let failed: Vec<&str> = results.iter().filter(|c| !c.passed()).map(|c| c.name).collect();
    if failed.is_empty() {
        emit(out, "all checks passed\n")?;
        Ok(0)
    } else {
        writeln!(err, "failed checks: {}", failed.join(", ")).ok();
        Ok(1)
    }
}

/// The full invariant suite on one solved instance.
fn run_checks(
    problem: &Problem,
    solution: &Solution,
    settings: &Settings,
    trials: usize,
    oracle_grid: usize,
) -> Vec<CheckOutcome> {
    let f = problem.integrand();
    let seed = settings.seed;
    let points = checks::random_points(problem, 10_000, seed);
    let anchors = [0.5, 1.0, 2.0];
    let lambda = solution.lambda_star;
    vec![
        checks::g_negative(&f, 10_000, seed),
        // Evaluation points pushed out by the weight ratio, which scales the leading correction.
        checks::small_t_limit(&f, &anchors, 1e-6 * (f.a / f.b).min(1.0)).1,
        checks::large_t_limit(&f, &anchors, 1e6 * (f.a / f.b).max(1.0)).1,
        checks::large_slope_limit(&f),
        checks::convexity(&f, &points),
        checks::derivatives(&f, &points[..1000]),
        checks::coercivity(problem),
        checks::duality(&f, &points[..1000]),
        checks::el_consistency(&f, &points[..1000]),
        checks::flux_monotone(problem, &[0.5, 1.0, 2.0]),
        checks::q_monotone(problem, &[0.5, 2.0], &checks::log_grid(0.25, 4.0, 20)),
        checks::shoot_monotone(problem, &checks::log_grid(lambda / 4.0, lambda * 4.0, 12)),
        checks::boundary(problem, solution, settings.options.tol),
        checks::stationarity(problem, solution),
        checks::defect_structure(problem, solution),
        checks::formulations_agree(problem, solution, &settings.options),
        checks::slope_representations(problem, solution),
        checks::dominance_check(problem, solution, trials, seed),
        checks::oracle_check(problem, solution, oracle_grid, 20_000),
        checks::alpha_response(problem, settings.options.tol),
    ]
}

fn thread_pool() -> Result<rayon::ThreadPool, Failure> {
    let threads = match std::env::var(THREADS_ENV) {
        Ok(raw) => raw
            .trim()
            .parse::<usize>()
            .ok()
            .filter(|&t| t > 0)
            .ok_or_else(|| usage(format!("{THREADS_ENV} must be a positive integer, got {raw:?}")))?,
        Err(_) => 0,
    };
    rayon::ThreadPoolBuilder::new().num_threads(threads).build().map_err(|e| Failure::Run(e.to_string()))
}

/// `points` equally spaced values over `[from, to]`.
fn linspace(from: f64, to: f64, points: usize) -> Vec<f64> {
    let mut v: Vec<f64> = (0..points).map(|i| from + (to - from) * i as f64 / (points - 1) as f64).collect();
    v[points - 1] = to;
    v
}

fn cmd_sweep(args: &SweepArgs, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32, Failure> {
    let cfg = Config::load(args.common.config.as_deref())?;
    let settings = resolve(&args.common, &cfg)?;
    let param = cfg.pick_enum(args.param, "param")?.ok_or_else(|| usage("missing required flag --param"))?;
    let from = cfg.pick(args.from, "from")?.ok_or_else(|| usage("missing required flag --from"))?;
    let to = cfg.pick(args.to, "to")?.ok_or_else(|| usage("missing required flag --to"))?;
    let points = cfg.pick(args.points, "points")?.unwrap_or(9);
    let max_jump = cfg.pick(args.max_jump, "max_jump")?.unwrap_or(0.25);
    if !(from < to) || points < 2 {
        return Err(usage(format!("empty sweep range: from={from}, to={to}, points={points}")));
    }
    let values = linspace(from, to, points);
    let problem = &settings.problem;
    let pool = thread_pool()?;

    let (columns, rows, status): (Vec<&str>, Vec<Vec<f64>>, Vec<(String, bool)>) = match param {
        SweepParam::Lambda => {
            if from <= 0.0 {
                return Err(usage("lambda values must be positive"));
            }
            let opts = settings.options;
            let rows: Result<Vec<Vec<f64>>, Error> = pool.install(|| {
                values
                    .par_iter()
                    .map(|&lambda| {
                        let end = shoot_with(lambda, problem, &opts)? + problem.big_r_star();
                        let e = energy(&solve_profile_with(lambda, problem, &opts)?, problem)?;
                        Ok(vec![lambda, end, end - problem.big_r_star(), e.total()])
                    })
                    .collect()
            });
            let rows = rows?;
            let monotone = rows.windows(2).all(|w| w[1][1] > w[0][1]);
            let brackets = rows[0][2] < 0.0 && rows[rows.len() - 1][2] > 0.0;
            let status = vec![
                (format!("H_lambda(R) strictly increasing: {monotone}"), monotone),
                (format!("range brackets lambda*: {brackets}"), true),
            ];
            (vec!["lambda", "H_R", "H_R_minus_R_star", "energy"], rows, status)
        }
        SweepParam::Alpha => {
            let problems: Vec<Problem> = values
                .iter()
                .map(|&a| problem.with_alpha(a).map_err(|e| usage(e.to_string())))
                .collect::<Result<_, _>>()?;
            let opts = settings.options;
            let rows: Result<Vec<Vec<f64>>, Error> = pool.install(|| {
                problems
                    .par_iter()
                    .map(|p| {
                        let s = Solver::new(opts).solve(p)?;
                        let e = energy(&s.profile, p)?;
                        Ok(vec![p.alpha(), s.lambda_star, e.total(), e.energy_term, e.distortion_term])
                    })
                    .collect()
            });
            let rows = rows?;
            let worst = rows.windows(2).map(|w| (w[1][1] - w[0][1]).abs() / w[0][1].abs()).fold(0.0, f64::max);
            let continuous = worst <= max_jump;
            let status = vec![(format!("largest relative lambda* jump {worst:.3e} (limit {max_jump}): {}", if continuous { "ok" } else { "exceeded" }), continuous)];
            (vec!["alpha", "lambda_star", "energy", "energy_term", "distortion_term"], rows, status)
        }
    };

    if rows.iter().flatten().any(|x| !x.is_finite()) {
        return Err(Failure::Run("sweep produced a non-finite value".into()));
    }
    let table = output::render_table(&columns, &rows, settings.format);
    let status_text: String = status.iter().map(|(line, _)| format!("{line}\n")).collect();
    match &settings.out {
        Some(dir) => {
            let name = match settings.format {
                Format::Csv => "sweep.csv",
                Format::Json => "sweep.json",
            };
            output::write_file(dir, name, &table)?;
            emit(out, &status_text)?;
        }
        None => {
            emit(out, &table)?;
            write!(err, "{status_text}").ok();
        }
    }
    Ok(if status.iter().all(|(_, ok)| *ok) { 0 } else { 1 })
}

fn cmd_energy(args: &EnergyArgs, out: &mut dyn Write) -> Result<i32, Failure> {
    let cfg = Config::load(args.common.config.as_deref())?;
    let settings = resolve(&args.common, &cfg)?;
    let problem = &settings.problem;
    let profile = match cfg.pick(args.profile.clone(), "profile")? {
        Some(path) => {
            let text =
                std::fs::read_to_string(&path).map_err(|e| usage(format!("cannot read {}: {e}", path.display())))?;
            output::parse_profile_csv(&text).map_err(|e| usage(e.to_string()))?
        }
        None => affine_profile(problem, settings.options.grid_size),
    };
    let report = Report::new(problem, &total_energy(&profile, problem)?);
    if let Some(dir) = &settings.out {
        output::write_file(dir, "report.json", &report.to_json()?)?;
    }
    emit(out, &output::summary(&report, None))?;
    Ok(0)
}

/// `H(s) = r* + (R* - r*)(s - r)/(R - r)`.
pub fn affine_profile(problem: &Problem, grid_size: usize) -> Profile {
    let grid = uniform_grid(problem.r(), problem.big_r(), grid_size);
    let slope = (problem.big_r_star() - problem.r_star()) / (problem.big_r() - problem.r());
    let mut h: Vec<f64> = grid.iter().map(|s| problem.r_star() + slope * (s - problem.r())).collect();
    let last = h.len() - 1;
    h[last] = problem.big_r_star();
    Profile { k: vec![slope; grid.len()], h, grid, lambda: None, initial_slope: slope }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn config_parsing() {
        let cfg = Config::parse("# comment\nn = 3\nr-star=2.5 # trailing\n\nR_star=4\n").unwrap();
        assert_eq!(cfg.pick::<u32>(None, "n").unwrap(), Some(3));
        assert_eq!(cfg.pick::<u32>(Some(4), "n").unwrap(), Some(4));
        assert_eq!(cfg.pick::<f64>(None, "r_star").unwrap(), Some(2.5));
        assert!(cfg.pick::<f64>(None, "alpha").unwrap().is_none());
        assert!(matches!(Config::parse("bogus=1"), Err(Failure::Usage(_))));
        assert!(matches!(Config::parse("n 3"), Err(Failure::Usage(_))));
    }

    #[test]
    fn linspace_endpoints() {
        let v = linspace(0.1, 0.9, 9);
        assert_eq!(v.len(), 9);
        assert_eq!(v[0], 0.1);
        assert_eq!(v[8], 0.9);
    }
}
