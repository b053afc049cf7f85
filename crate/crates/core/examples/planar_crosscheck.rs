//! For `n = 2`, compare the equilibrium coefficient derived from the
//! Lagrangian with the closed planar forms under different weight readings.

use annulus_energy::cli::crosscheck::planar_crosscheck;
use annulus_energy::Problem;

fn main() -> annulus_energy::Result<()> {
    for (r_star, big_r_star) in [(1.0, 3.0), (2.0, 3.0)] {
        let problem = Problem::new(2, 1.0, 2.0, r_star, big_r_star, 0.5)?;
        print!("{}", planar_crosscheck(&problem, 1000, 3)?.to_text());
    }
    Ok(())
}
