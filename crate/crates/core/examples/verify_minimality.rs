//! Minimality evidence for a solved profile: it is stationary, a smooth bump
//! breaks stationarity, and seeded competitors all cost more.

use annulus_energy::bvp::find_lambda;
use annulus_energy::variational::{dominance, el_residual, perturb, random_trials, Provenance};
use annulus_energy::Problem;

fn main() -> annulus_energy::Result<()> {
    let problem = Problem::new(3, 1.0, 3.0, 2.0, 3.0, 0.3)?;
    let solution = find_lambda(&problem, 1e-9)?;
    let span = problem.big_r_star() - problem.r_star();

    let res = el_residual(&solution.profile, &problem)?;
    let bumped = el_residual(&perturb(&solution.profile, 0.01 * span, 1), &problem)?;
    println!("EL residual {res:.2e}, after a 1% bump {bumped:.2e}");

    let trials = random_trials(&problem, &solution.profile, 99, 7);
    let d = dominance(&problem, &solution.profile, &trials)?;
    println!("solution energy {:.10}", d.solution_energy);
    for kind in [Provenance::Random, Provenance::PowerLaw, Provenance::Perturbation] {
        let worst = trials
            .iter()
            .zip(&d.margins)
            .filter(|(t, _)| t.provenance == kind)
            .map(|(_, m)| *m)
            .fold(f64::INFINITY, f64::min);
        println!("  {kind:?}: smallest relative excess {worst:.2e}");
    }
    println!("all competitors cost more: {}", d.holds(0.0, 1e-6, 1e-3 * span));
    Ok(())
}
