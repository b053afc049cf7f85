//! Shooting on a generic instance: the end value `H_λ(R)` is increasing in
//! `λ`, and the solver lands on `H(R) = R*`.

use annulus_energy::bvp::{classify_case, shoot, Solver, ShootingOptions};
use annulus_energy::variational::total_energy;
use annulus_energy::Problem;

fn main() -> annulus_energy::Result<()> {
    let problem = Problem::new(2, 1.0, 2.0, 1.0, 3.0, 0.5)?;
    println!("H_λ(R) - R*:");
    for lambda in [0.5, 1.0, 1.5, 2.0, 3.0] {
        println!("  λ = {lambda:<3} {:+.6}", shoot(lambda, &problem)?);
    }

    let solver = Solver::new(ShootingOptions { tol: 1e-10, ..ShootingOptions::default() });
    let solution = solver.solve(&problem)?;
    let p = &solution.profile;
    println!("\nλ* = {:.12} after {} shots", solution.lambda_star, solution.shots);
    println!("H(r) = {}, H(R) = {:.12}", p.h[0], p.end_value());
    let tag = classify_case(p, &problem, 1e-9)?;
    println!("case {} with c = {:.6}", tag.case, tag.c);

    // A start far from λ* converges to the same root.
    let again = solver.starting_at(50.0).solve(&problem)?;
    println!("restart from 50: λ* = {:.12}", again.lambda_star);

    let report = total_energy(p, &problem)?;
    println!("E = {:.12} (n-energy {:.6}, distortion {:.6}), EL residual {:.2e}", report.total, report.energy_term, report.distortion_term, report.el_residual);
    Ok(())
}
