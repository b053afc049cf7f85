//! Driving the command-line front end in-process.

use annulus_energy::cli::run;

fn main() {
    let dir = std::env::temp_dir().join("annulus-energy-example");
    let dir = dir.to_string_lossy();
    let args = ["annulus-energy", "solve", "--n", "3", "--r", "1", "--R", "2", "--r-star", "1", "--R-star", "3", "--out", &dir];
    let code = run(args, &mut std::io::stdout(), &mut std::io::stderr());
    println!("exit {code}, files in {dir}");
    let report = std::fs::read_to_string(format!("{dir}/report.json")).unwrap_or_default();
    print!("{report}");
}
