use annulus_energy::cli::output::{parse_profile_csv, Report};
use annulus_energy::cli::run;

fn call(args: &[&str]) -> (i32, String, String) {
    let mut all = vec!["annulus-energy"];
    all.extend_from_slice(args);
    let (mut out, mut err) = (Vec::new(), Vec::new());
    let code = run(all, &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

const GENERIC: [&str; 10] = ["--n", "2", "--r", "1", "--R", "2", "--r-star", "1", "--R-star", "3"];

fn with(base: &[&str], extra: &[&str]) -> Vec<String> {
    base.iter().chain(extra).map(|s| s.to_string()).collect()
}

fn call_owned(cmd: &str, args: &[String]) -> (i32, String, String) {
    let mut v: Vec<&str> = vec![cmd];
    v.extend(args.iter().map(String::as_str));
    call(&v)
}

#[test]
fn linear_instance_solves_exactly() {
    let (code, out, _) = call(&["solve", "--n", "3", "--r", "1", "--R", "2", "--r-star", "3", "--R-star", "6", "--alpha", "0.5"]);
    assert_eq!(code, 0);
    assert!(out.contains("lambda*      = 3\n"), "{out}");
    assert!(out.contains("case         = Linear"));
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(call(&["solve", "--n", "3", "--r", "1", "--R", "2", "--r-star", "3"]).0, 2);
    assert_eq!(call(&["solve", "--n", "2.5", "--r", "1", "--R", "2", "--r-star", "1", "--R-star", "3"]).0, 2);
    assert_eq!(call(&["verify", "--n", "2", "--r", "2", "--R", "1", "--r-star", "1", "--R-star", "3"]).0, 2);
    assert_eq!(call(&["frobnicate"]).0, 2);
    assert_eq!(call_owned("sweep", &with(&GENERIC, &["--param", "alpha", "--from", "0.5", "--to", "0.5"])).0, 2);
    assert_eq!(call_owned("solve", &with(&GENERIC, &["--tol", "0"])).0, 2);
    assert_eq!(call(&["--help"]).0, 0);
}

#[test]
fn outputs_are_deterministic_and_round_trip() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    for dir in [&a, &b] {
        let (code, _, err) = call_owned("solve", &with(&GENERIC, &["--seed", "4", "--out", dir.path().to_str().unwrap()]));
        assert_eq!(code, 0, "{err}");
    }
    for name in ["profile.csv", "report.json"] {
        let x = std::fs::read(a.path().join(name)).unwrap();
        assert_eq!(x, std::fs::read(b.path().join(name)).unwrap(), "{name}");
    }
    let text = std::fs::read_to_string(a.path().join("report.json")).unwrap();
    let report = Report::from_json(&text).unwrap();
    assert_eq!(report.to_json().unwrap(), text);
    let value: serde_json::Value = serde_json::from_str(&text).unwrap();
    for key in ["lambda_star", "energy_total", "energy_term", "distortion_term", "el_residual", "case", "n", "r", "R", "r_star", "R_star", "alpha"] {
        assert!(value.get(key).is_some(), "{key}");
    }
    assert_eq!(value["case"], "Expanding");

    let csv = std::fs::read_to_string(a.path().join("profile.csv")).unwrap();
    assert!(csv.starts_with("s,H,Hdot,H_minus_sHdot,L\n"));
    let profile = parse_profile_csv(&csv).unwrap();
    assert_eq!(profile.len(), 512);
    assert!(csv.lines().skip(1).flat_map(|l| l.split(',')).all(|c| c.parse::<f64>().unwrap().is_finite()));

    // The energy of the written profile reproduces the solve report.
    let (code, out, _) = call_owned("energy", &with(&GENERIC, &["--profile", a.path().join("profile.csv").to_str().unwrap()]));
    assert_eq!(code, 0);
    assert!(out.contains(&format!("energy       = {}", report.energy_total)), "{out}");
}

#[test]
fn config_file_is_overridden_by_flags() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    std::fs::write(&cfg, "n = 3\nr = 1\nR = 2\nr-star = 3\nR_star = 6\nalpha = 0.2\n").unwrap();
    let (code, out, _) = call(&["solve", "--config", cfg.to_str().unwrap()]);
    assert_eq!(code, 0);
    assert!(out.contains("lambda*      = 3\n"));
    let (code, out, _) = call(&["solve", "--config", cfg.to_str().unwrap(), "--R-star", "7"]);
    assert_eq!(code, 0);
    assert!(!out.contains("case         = Linear"), "{out}");
    std::fs::write(&cfg, "n = 3\nwidth = 2\n").unwrap();
    assert_eq!(call(&["solve", "--config", cfg.to_str().unwrap()]).0, 2);
}

#[test]
fn verify_passes_and_skips_dominance_on_request() {
    let dir = tempfile::tempdir().unwrap();
    let (code, out, err) = call_owned(
        "verify",
        &with(&GENERIC, &["--trials", "0", "--oracle-grid", "32", "--out", dir.path().to_str().unwrap()]),
    );
    assert_eq!(code, 0, "{out}{err}");
    assert!(out.contains("[SKIP] dominance"));
    assert!(!out.contains("[FAIL]"));
    let report: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("n2_crosscheck.json")).unwrap()).unwrap();
    assert_eq!(report["points"], 1000);
}

#[test]
fn lambda_sweep_brackets_root() {
    let (code, out, _) = call_owned("sweep", &with(&GENERIC, &["--param", "lambda", "--from", "0.5", "--to", "3", "--points", "6"]));
    assert_eq!(code, 0);
    let rows: Vec<Vec<f64>> =
        out.lines().skip(1).map(|l| l.split(',').map(|c| c.parse().unwrap()).collect()).collect();
    assert_eq!(rows.len(), 6);
    assert!(rows.windows(2).all(|w| w[1][1] > w[0][1]));
    assert!(rows[0][2] < 0.0 && rows[5][2] > 0.0);
}

#[test]
fn alpha_sweep_is_ordered_and_continuous() {
    std::env::set_var(annulus_energy::cli::THREADS_ENV, "2");
    let (code, out, err) = call_owned("sweep", &with(&GENERIC, &["--param", "alpha", "--from", "0.1", "--to", "0.9", "--format", "json"]));
    assert_eq!(code, 0, "{err}");
    let rows: Vec<serde_json::Value> = serde_json::from_str(&out).unwrap();
    let alphas: Vec<f64> = rows.iter().map(|r| r["alpha"].as_f64().unwrap()).collect();
    assert_eq!(alphas.len(), 9);
    assert!(alphas.windows(2).all(|w| w[1] > w[0]));
    assert!(err.contains("ok"));
}
