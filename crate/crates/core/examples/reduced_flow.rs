//! The reduced flow `F' = G(t, F)`: a few solution curves, their monotone
//! ordering in the anchor `λ`, and the limits of `t G` at both ends.

use annulus_energy::bvp::{q_value, solve_reduced};
use annulus_energy::{Problem, ReducedPoint};

fn main() -> annulus_energy::Result<()> {
    let problem = Problem::new(3, 1.0, 2.0, 1.0, 3.0, 0.5)?;
    let f = problem.integrand();

    for lambda in [0.5, 1.0, 2.0] {
        let curve = solve_reduced(lambda, 0.1, 10.0, &problem)?;
        let row: Vec<String> =
            [0.1, 0.5, 1.0, 2.0, 10.0].iter().map(|&t| format!("{:9.5}", curve.value(t).unwrap())).collect();
        println!("F_{lambda:<3} at t = 0.1, 0.5, 1, 2, 10: {}", row.join(" "));
    }

    println!("\nQ(λ) = F_λ(1.5):");
    for lambda in [0.25, 0.5, 1.0, 2.0, 4.0] {
        println!("  λ = {lambda:<4} Q = {:.6}", q_value(lambda, 1.5, &problem)?);
    }

    let n = problem.n() as i32;
    let c = ((n - 1) as f64).powf((n - 2) as f64 / 2.0);
    println!("\nlimits (computed / predicted):");
    for y in [0.5, 1.0, 2.0] {
        let small = 1e-6 * f.g_rhs(&ReducedPoint { t: 1e-6, y });
        let large = 1e6 * f.g_rhs(&ReducedPoint { t: 1e6, y });
        let small_pred = -(f.b / f.a) * c * y.powi(1 - n);
        let large_pred = -(f.a / f.b) * c * y.powi(n + 1);
        println!("  y = {y}: t->0 {:.6}, t->inf {:.6}", small / small_pred, large / large_pred);
    }
    println!("  G(1, 1e8) = {:.8}", f.g_rhs(&ReducedPoint { t: 1.0, y: 1e8 }));
    Ok(())
}
