//! Proportional annuli: the minimizer is the linear map `H = c s` and its
//! energy has a closed form.

use annulus_energy::bvp::find_lambda;
use annulus_energy::model::sphere_measure;
use annulus_energy::variational::total_energy;
use annulus_energy::Problem;

fn main() -> annulus_energy::Result<()> {
    for n in 2..=5u32 {
        for c in [0.5, 1.0, 3.0] {
            let problem = Problem::new(n, 1.0, 2.0, c, 2.0 * c, 0.5)?;
            let solution = find_lambda(&problem, 1e-10)?;
            let report = total_energy(&solution.profile, &problem)?;
            let nf = n as f64;
            let closed = sphere_measure(n)? * nf.powf(nf / 2.0) * (problem.a() * c.powi(n as i32) + problem.b())
                * (2f64.powi(n as i32) - 1.0)
                / nf;
            println!(
                "n={n} c={c:<3} λ*={:<6} E={:.12} closed form {:.12} case {}",
                solution.lambda_star,
                report.total,
                closed,
                report.case.map(|t| t.case.to_string()).unwrap_or_default()
            );
        }
    }
    Ok(())
}
