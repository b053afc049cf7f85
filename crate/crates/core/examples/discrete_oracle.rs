//! Independent check: minimize the energy over piecewise-linear profiles by
//! coordinate descent and compare with the shooting solution.

use std::time::Instant;

use annulus_energy::bvp::find_lambda;
use annulus_energy::variational::{discrete_minimize, energy, profile_value};
use annulus_energy::Problem;

fn main() -> annulus_energy::Result<()> {
    let problem = Problem::new(2, 1.0, 2.0, 1.0, 3.0, 0.5)?;
    let solution = find_lambda(&problem, 1e-10)?;
    let exact = energy(&solution.profile, &problem)?.total();
    println!("shooting energy {exact:.10}");
    for cells in [32, 64, 128, 256] {
        let start = Instant::now();
        let res = discrete_minimize(&problem, cells, 20_000)?;
        let o = &res.trial.profile;
        let dev = o
            .grid
            .iter()
            .zip(&o.h)
            .map(|(s, h)| (profile_value(&solution.profile, *s).unwrap() - h).abs())
            .fold(0.0, f64::max);
        println!(
            "  {cells:>3} cells: E = {:.10} (+{:.2e} rel), sup |H - H_oracle| = {dev:.2e}, {:?}",
            res.energy,
            (res.energy - exact) / exact,
            start.elapsed()
        );
    }
    Ok(())
}
