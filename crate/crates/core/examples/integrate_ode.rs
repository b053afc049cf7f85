//! The adaptive integrator on its own: a closed-form decay, a blow-up caught
//! by a domain guard, and dense sampling between steps.

use annulus_energy::integrate::{integrate, sample, FnSystem, Termination};

fn main() -> annulus_energy::Result<()> {
    let decay = FnSystem::new(1, |_x: f64, y: &[f64], dy: &mut [f64]| dy[0] = -y[0]);
    let traj = integrate(&decay, 0.0, &[1.0], 5.0, 1e-10, 1e-12)?;
    let end = traj.last_state()[0];
    println!("y' = -y: y(5) = {end:.15} (exact {:.15}), {} steps", (-5.0f64).exp(), traj.len() - 1);
    let mid = sample(&traj, 2.5)?[0];
    println!("  dense y(2.5) = {mid:.12}, error {:.1e}", (mid - (-2.5f64).exp()).abs());

    // y = 1/(1 - x) leaves y < 10 at x = 0.9.
    let blowup = FnSystem::with_guard(1, |_x: f64, y: &[f64], dy: &mut [f64]| dy[0] = y[0] * y[0], |_x: f64, y: &[f64]| y[0] < 10.0);
    let traj = integrate(&blowup, 0.0, &[1.0], 2.0, 1e-10, 1e-12)?;
    assert_eq!(traj.termination, Termination::GuardExit);
    println!("y' = y^2: guard exit at x = {:.10}", traj.last_x());
    Ok(())
}
