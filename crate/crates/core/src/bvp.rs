//! Shooting solver for the radial boundary value problem
//! `H'' = (H - sH') M(s)`, `H(r) = r*`, `H(R) = R*`.
//!
//! The one-parameter family of reduced solutions `F_λ` of `F' = G(t, F)`,
//! anchored on the diagonal by `F_λ(λ) = λ`, is increasing in `λ` at every
//! fixed `t`. Each shot takes the initial slope `H'(r) = F_λ(r*/r)` and
//! integrates the profile; `H_λ(R)` is then increasing in `λ` and the
//! parameter `λ*` with `H_λ*(R) = R*` is found by safeguarded bisection.

use crate::error::{Error, Result};
use crate::integrate::{integrate_through, sample, FnSystem, Options, Termination, Trajectory};
use crate::model::{EvalPoint, Integrand, Problem, ReducedPoint};

/// Tolerances and limits for the shooting solver.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ShootingOptions {
    /// Relative tolerance on `|H(R) - R*| / R*`.
    pub tol: f64,
    pub ode_rel_tol: f64,
    pub ode_abs_tol: f64,
    pub grid_size: usize,
    pub max_doublings: usize,
    pub max_iterations: usize,
}

impl Default for ShootingOptions {
    fn default() -> Self {
        Self { tol: 1e-9, ode_rel_tol: 1e-11, ode_abs_tol: 1e-13, grid_size: 512, max_doublings: 60, max_iterations: 200 }
    }
}

impl ShootingOptions {
    fn ode(&self) -> Options {
        Options::with_tolerances(self.ode_rel_tol, self.ode_abs_tol)
    }
}

fn reduced_system(f: Integrand) -> impl crate::integrate::OdeSystem {
    FnSystem::with_guard(
        1,
        move |t: f64, y: &[f64], dy: &mut [f64]| dy[0] = f.g_rhs(&ReducedPoint { t, y: y[0] }),
        |t: f64, y: &[f64]| t > 0.0 && y[0] > 0.0 && y[0].is_finite(),
    )
}

fn single_node(x: f64, y: f64, dy: f64) -> Trajectory {
    Trajectory {
        nodes: vec![x],
        states: vec![vec![y]],
        derivatives: vec![vec![dy]],
        termination: Termination::ReachedEnd,
        rejected_steps: 0,
    }
}

/// A sampled solution `F_λ` of the reduced flow on `[t_lo, t_hi]`.
#[derive(Debug, Clone)]
pub struct FluxCurve {
    pub lambda: f64,
    /// From `t = λ` down toward `t_lo`.
    pub lower: Trajectory,
    /// From `t = λ` up toward `t_hi`.
    pub upper: Trajectory,
}

impl FluxCurve {
    /// Smallest `t` actually reached.
    pub fn t_lo(&self) -> f64 {
        self.lower.last_x()
    }

    /// Largest `t` actually reached.
    pub fn t_hi(&self) -> f64 {
        self.upper.last_x()
    }

    pub fn truncated(&self) -> bool {
        !(self.lower.reached_end() && self.upper.reached_end())
    }

    /// `F_λ(t)` by dense sampling of the stored curve.
    pub fn value(&self, t: f64) -> Result<f64> {
        let piece = if t <= self.lambda { &self.lower } else { &self.upper };
        Ok(sample(piece, t)?[0])
    }

    /// All stored `(t, F)` pairs in increasing `t`.
    pub fn points(&self) -> Vec<(f64, f64)> {
        let mut out: Vec<(f64, f64)> =
            self.lower.nodes.iter().zip(&self.lower.states).rev().map(|(&t, y)| (t, y[0])).collect();
        out.extend(self.upper.nodes.iter().zip(&self.upper.states).skip(1).map(|(&t, y)| (t, y[0])));
        out
    }
}

/// Integrates `F' = G(t, F)` from `(λ, λ)` down to `t_lo` and up to `t_hi`.
/// A piece that leaves the domain early is kept, truncated, with its reason.
pub fn solve_reduced(lambda: f64, t_lo: f64, t_hi: f64, problem: &Problem) -> Result<FluxCurve> {
    solve_reduced_with(lambda, t_lo, t_hi, problem, &ShootingOptions::default())
}

pub fn solve_reduced_with(
    lambda: f64,
    t_lo: f64,
    t_hi: f64,
    problem: &Problem,
    opts: &ShootingOptions,
) -> Result<FluxCurve> {
    if !(t_lo > 0.0 && t_lo <= lambda && lambda <= t_hi && t_hi.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "need 0 < t_lo <= lambda <= t_hi, got {t_lo}, {lambda}, {t_hi}"
        )));
    }
    let f = problem.integrand();
    let system = reduced_system(f);
    let slope = f.g_rhs(&ReducedPoint { t: lambda, y: lambda });
    let piece = |end: f64| -> Result<Trajectory> {
        if end == lambda {
            Ok(single_node(lambda, lambda, slope))
        } else {
            integrate_through(&system, lambda, &[lambda], &[end], &opts.ode())
        }
    };
    Ok(FluxCurve { lambda, lower: piece(t_lo)?, upper: piece(t_hi)? })
}

/// `Q(λ) = F_λ(t)`.
pub fn q_value(lambda: f64, t: f64, problem: &Problem) -> Result<f64> {
    q_value_with(lambda, t, problem, &ShootingOptions::default())
}

pub fn q_value_with(lambda: f64, t: f64, problem: &Problem, opts: &ShootingOptions) -> Result<f64> {
    if !(lambda > 0.0 && t > 0.0 && lambda.is_finite() && t.is_finite()) {
        return Err(Error::InvalidArgument(format!("need lambda, t > 0, got {lambda}, {t}")));
    }
    if t == lambda {
        return Ok(lambda);
    }
    let traj = integrate_through(&reduced_system(problem.integrand()), lambda, &[lambda], &[t], &opts.ode())?;
    if !traj.reached_end() {
        return Err(Error::SolverFailure(format!(
            "reduced flow from lambda={lambda} stopped at t={} ({:?})",
            traj.last_x(),
            traj.termination
        )));
    }
    Ok(traj.last_state()[0])
}

/// Radial profile `H` with slopes `K = H'` on a grid over `[r, R]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Profile {
    pub grid: Vec<f64>,
    pub h: Vec<f64>,
    pub k: Vec<f64>,
    /// Shooting parameter that produced the profile, if any.
    pub lambda: Option<f64>,
    /// `K(r) = F_λ(r*/r)`.
    pub initial_slope: f64,
}

impl Profile {
    pub fn len(&self) -> usize {
        self.grid.len()
    }

    pub fn is_empty(&self) -> bool {
        self.grid.is_empty()
    }

    pub fn end_value(&self) -> f64 {
        *self.h.last().expect("non-empty profile")
    }

    /// `H - sK` at every node.
    pub fn defect(&self) -> Vec<f64> {
        self.grid.iter().zip(&self.h).zip(&self.k).map(|((s, h), k)| h - s * k).collect()
    }

    /// Exact linear profile `H = c s`.
    pub fn linear(problem: &Problem, grid_size: usize) -> Self {
        let c = problem.r_star() / problem.r();
        let grid = uniform_grid(problem.r(), problem.big_r(), grid_size);
        let mut h: Vec<f64> = grid.iter().map(|s| c * s).collect();
        h[0] = problem.r_star();
        let last = h.len() - 1;
        h[last] = problem.big_r_star();
        Self { k: vec![c; grid.len()], h, grid, lambda: Some(c), initial_slope: c }
    }
}

/// `n` equally spaced nodes with exact end points.
pub fn uniform_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    let n = n.max(2);
    let step = (hi - lo) / (n - 1) as f64;
    let mut grid: Vec<f64> = (0..n).map(|i| lo + i as f64 * step).collect();
    grid[n - 1] = hi;
    grid
}

/// Integrates `H' = F`, `F' = G(H/s, F)(sF - H)/s²` over `[r, R]` from
/// `H(r) = r*`, `F(r) = F_λ(r*/r)` and resamples onto `grid_size` nodes.
pub fn solve_profile(lambda: f64, problem: &Problem, grid_size: usize) -> Result<Profile> {
    solve_profile_with(lambda, problem, &ShootingOptions { grid_size, ..ShootingOptions::default() })
}

pub fn solve_profile_with(lambda: f64, problem: &Problem, opts: &ShootingOptions) -> Result<Profile> {
    if opts.grid_size < 2 {
        return Err(Error::InvalidArgument("grid needs at least 2 nodes".into()));
    }
    let t0 = problem.r_star() / problem.r();
    let k0 = q_value_with(lambda, t0, problem, opts)?;
    let f = problem.integrand();
    let system = FnSystem::with_guard(
        2,
        move |s: f64, y: &[f64], dy: &mut [f64]| {
            let (h, k) = (y[0], y[1]);
            dy[0] = k;
            dy[1] = f.g_rhs(&ReducedPoint { t: h / s, y: k }) * (s * k - h) / (s * s);
        },
        |_s: f64, y: &[f64]| y[0] > 0.0 && y[1] > 0.0 && y[0].is_finite() && y[1].is_finite(),
    );
    let grid = uniform_grid(problem.r(), problem.big_r(), opts.grid_size);
    profile_on_grid(&system, grid, problem.r_star(), k0, Some(lambda), opts)
}

fn profile_on_grid<S: crate::integrate::OdeSystem>(
    system: &S,
    grid: Vec<f64>,
    h0: f64,
    k0: f64,
    lambda: Option<f64>,
    opts: &ShootingOptions,
) -> Result<Profile> {
    let traj = integrate_through(system, grid[0], &[h0, k0], &grid[1..], &opts.ode())?;
    if !traj.reached_end() {
        return Err(Error::SolverFailure(format!(
            "profile integration for lambda={lambda:?} stopped at s={} ({:?})",
            traj.last_x(),
            traj.termination
        )));
    }
    let mut h = Vec::with_capacity(grid.len());
    let mut k = Vec::with_capacity(grid.len());
    for &s in &grid {
        let idx = traj.node_index(s).ok_or_else(|| Error::SolverFailure(format!("grid node {s} not hit")))?;
        h.push(traj.states[idx][0]);
        k.push(traj.states[idx][1]);
    }
    Ok(Profile { grid, h, k, lambda, initial_slope: k0 })
}

/// Integrates the second-order Euler–Lagrange equation directly, with `H''`
/// from the partial derivatives of the Lagrangian, from `H(r) = r*`, `H'(r) = k0`.
pub fn solve_el_direct(problem: &Problem, k0: f64, opts: &ShootingOptions) -> Result<Profile> {
    let f = problem.integrand();
    let system = FnSystem::with_guard(
        2,
        move |s: f64, y: &[f64], dy: &mut [f64]| {
            dy[0] = y[1];
            dy[1] = f.el_acceleration(&EvalPoint { s, h: y[0], k: y[1] });
        },
        |_s: f64, y: &[f64]| y[0] > 0.0 && y[1] > 0.0 && y[0].is_finite() && y[1].is_finite(),
    );
    let grid = uniform_grid(problem.r(), problem.big_r(), opts.grid_size);
    profile_on_grid(&system, grid, problem.r_star(), k0, None, opts)
}

/// `H_λ(R) - R*`.
pub fn shoot(lambda: f64, problem: &Problem) -> Result<f64> {
    shoot_with(lambda, problem, &ShootingOptions { grid_size: 2, ..ShootingOptions::default() })
}

pub fn shoot_with(lambda: f64, problem: &Problem, opts: &ShootingOptions) -> Result<f64> {
    let profile = solve_profile_with(lambda, problem, &ShootingOptions { grid_size: 2, ..*opts })?;
    Ok(profile.end_value() - problem.big_r_star())
}

/// Result of [`find_lambda`].
#[derive(Debug, Clone)]
pub struct Solution {
    pub lambda_star: f64,
    pub profile: Profile,
    /// Number of shots taken.
    pub shots: usize,
}

/// Finds the unique `λ*` with `H_λ*(R) = R*` to `|H(R) - R*| < tol·R*`.
pub fn find_lambda(problem: &Problem, tol: f64) -> Result<Solution> {
    Solver::new(ShootingOptions { tol, ..ShootingOptions::default() }).solve(problem)
}

/// Configurable shooting driver.
#[derive(Debug, Clone, Copy, Default)]
pub struct Solver {
    pub options: ShootingOptions,
    /// First trial parameter; `√((r*/r)(R*/R))` when `None`.
    pub start: Option<f64>,
}

impl Solver {
    pub fn new(options: ShootingOptions) -> Self {
        Self { options, start: None }
    }

    pub fn starting_at(mut self, lambda0: f64) -> Self {
        self.start = Some(lambda0);
        self
    }

    pub fn solve(&self, problem: &Problem) -> Result<Solution> {
        let opts = &self.options;
        if !(opts.tol > 0.0) {
            return Err(Error::InvalidArgument(format!("tolerance must be positive, got {}", opts.tol)));
        }
        if problem.is_proportional(1e-12) {
            let profile = Profile::linear(problem, opts.grid_size);
            return Ok(Solution { lambda_star: problem.r_star() / problem.r(), profile, shots: 0 });
        }
        let target = opts.tol * problem.big_r_star();
        let mut shots = 0;
        let mut eval = |lambda: f64| -> Result<f64> {
            shots += 1;
            shoot_with(lambda, problem, opts)
        };

        let lambda0 = self
            .start
            .unwrap_or_else(|| ((problem.r_star() / problem.r()) * (problem.big_r_star() / problem.big_r())).sqrt());
        let f0 = eval(lambda0)?;
        let (mut lo, mut f_lo, mut hi, mut f_hi);
        if f0.abs() < target {
            lo = lambda0;
            f_lo = f0;
            hi = lambda0;
            f_hi = f0;
        } else if f0 < 0.0 {
            (lo, f_lo) = (lambda0, f0);
            let mut x = lambda0;
            let mut doublings = 0;
            loop {
                x *= 2.0;
                doublings += 1;
                let fx = eval(x)?;
                if fx >= 0.0 {
                    (hi, f_hi) = (x, fx);
                    break;
                }
                (lo, f_lo) = (x, fx);
                if doublings >= opts.max_doublings {
                    return Err(Error::NoBracket(doublings));
                }
            }
        } else {
            (hi, f_hi) = (lambda0, f0);
            let mut x = lambda0;
            let mut doublings = 0;
            loop {
                x *= 0.5;
                doublings += 1;
                let fx = eval(x)?;
                if fx <= 0.0 {
                    (lo, f_lo) = (x, fx);
                    break;
                }
                (hi, f_hi) = (x, fx);
                if doublings >= opts.max_doublings {
                    return Err(Error::NoBracket(doublings));
                }
            }
        }

        // Illinois regula falsi, bisecting (geometrically on wide brackets)
        // whenever the bracket fails to halve.
        let mut side = 0i8;
        let mut best = if f_lo.abs() < f_hi.abs() { (lo, f_lo) } else { (hi, f_hi) };
        // Iterate past the tolerance by a couple of decades (when the bracket
        // allows) so restarts agree on λ* well below the residual tolerance.
        let polish = 1e-2 * target;
        let mut iterations = 0;
        let mut extra = 0;
        while best.1.abs() >= polish {
            iterations += 1;
            if best.1.abs() < target {
                extra += 1;
            }
            if iterations > opts.max_iterations || extra > 6 || hi - lo <= 4.0 * f64::EPSILON * hi {
                break;
            }
            let width = hi - lo;
            let mut x = if hi / lo > 4.0 {
                (lo * hi).sqrt()
            } else {
                let fl = if side == -1 { 0.5 * f_lo } else { f_lo };
                let fh = if side == 1 { 0.5 * f_hi } else { f_hi };
                lo - fl * (hi - lo) / (fh - fl)
            };
            if !(x > lo && x < hi) {
                x = 0.5 * (lo + hi);
            }
            let fx = eval(x)?;
            if fx.abs() < best.1.abs() {
                best = (x, fx);
            }
            if fx < 0.0 {
                lo = x;
                f_lo = fx;
                side = if side == 1 { 0 } else { 1 };
            } else {
                hi = x;
                f_hi = fx;
                side = if side == -1 { 0 } else { -1 };
            }
            if hi - lo > 0.5 * width && side == 0 {
                let mid = 0.5 * (lo + hi);
                let fm = eval(mid)?;
                if fm.abs() < best.1.abs() {
                    best = (mid, fm);
                }
                if fm < 0.0 {
                    (lo, f_lo) = (mid, fm);
                } else {
                    (hi, f_hi) = (mid, fm);
                }
            }
        }
        if best.1.abs() >= target {
            return Err(Error::SolverFailure(format!(
                "shooting stalled at lambda={} with |H(R) - R*| = {:e}",
                best.0,
                best.1.abs()
            )));
        }
        let profile = solve_profile_with(best.0, problem, opts)?;
        Ok(Solution { lambda_star: best.0, profile, shots })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub enum Case {
    /// `H - sH' ≡ 0`: linear map.
    Linear,
    /// `H/s` increasing, i.e. `H - sH' < 0`.
    Expanding,
    /// `H/s` decreasing, i.e. `H - sH' > 0`.
    Contracting,
}

impl std::fmt::Display for Case {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Case::Linear => "Linear",
            Case::Expanding => "Expanding",
            Case::Contracting => "Contracting",
        })
    }
}

impl std::str::FromStr for Case {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "Linear" => Ok(Case::Linear),
            "Expanding" => Ok(Case::Expanding),
            "Contracting" => Ok(Case::Contracting),
            other => Err(Error::InvalidArgument(format!("unknown case {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CaseTag {
    pub case: Case,
    /// Estimate of `c` in `H - sH' = c exp(-∫_r^s τ M(τ) dτ)`.
    pub c: f64,
}

/// Classifies a profile by the sign of `H - sH'` on its grid. Since
/// `(H/s)' = -(H - sH')/s²`, a negative defect means `H/s` increases.
pub fn classify_case(profile: &Profile, problem: &Problem, tol: f64) -> Result<CaseTag> {
    let defect = profile.defect();
    let scale = tol * profile.end_value().abs();
    if defect.iter().all(|d| d.abs() < scale) {
        return Ok(CaseTag { case: Case::Linear, c: 0.0 });
    }
    let positive = defect.iter().filter(|&&d| d > 0.0).count();
    let negative = defect.iter().filter(|&&d| d < 0.0).count();
    let case = match (positive, negative) {
        (_, 0) => Case::Contracting,
        (0, _) => Case::Expanding,
        _ => return Err(Error::MixedSign { positive, negative }),
    };
    // Undo the integrating factor with a trapezoidal rule and take the median.
    let f = problem.integrand();
    let weight: Vec<f64> = (0..profile.len())
        .map(|i| {
            let p = EvalPoint { s: profile.grid[i], h: profile.h[i], k: profile.k[i] };
            p.s * f.m_coeff(&p)
        })
        .collect();
    let mut integral = 0.0;
    let mut estimates = Vec::with_capacity(profile.len());
    for i in 0..profile.len() {
        if i > 0 {
            integral += 0.5 * (weight[i] + weight[i - 1]) * (profile.grid[i] - profile.grid[i - 1]);
        }
        estimates.push(defect[i] * integral.exp());
    }
    estimates.sort_by(|a, b| a.total_cmp(b));
    Ok(CaseTag { case, c: estimates[estimates.len() / 2] })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn generic() -> Problem {
        Problem::new(2, 1.0, 2.0, 1.0, 3.0, 0.5).unwrap()
    }

    #[test]
    fn flux_curve_passes_through_anchor() {
        let p = generic();
        let curve = solve_reduced(1.3, 0.5, 4.0, &p).unwrap();
        assert_eq!(curve.value(1.3).unwrap(), 1.3);
        assert!(!curve.truncated());
        assert!((curve.t_lo() - 0.5).abs() < 1e-15 && (curve.t_hi() - 4.0).abs() < 1e-15);
        assert_eq!(q_value(0.7, 0.7, &p).unwrap(), 0.7);
    }

    #[test]
    fn reduced_rejects_bad_range() {
        assert!(solve_reduced(1.0, 2.0, 3.0, &generic()).is_err());
        assert!(solve_reduced(1.0, 0.0, 3.0, &generic()).is_err());
        assert!(q_value(-1.0, 1.0, &generic()).is_err());
    }

    #[test]
    fn linear_geometry_short_circuits() {
        let p = Problem::new(3, 1.0, 2.0, 3.0, 6.0, 0.5).unwrap();
        let sol = find_lambda(&p, 1e-9).unwrap();
        assert_eq!(sol.lambda_star, 3.0);
        assert_eq!(sol.shots, 0);
        for (s, h) in sol.profile.grid.iter().zip(&sol.profile.h) {
            assert!((h - 3.0 * s).abs() < 1e-14);
        }
        let tag = classify_case(&sol.profile, &p, 1e-9).unwrap();
        assert_eq!(tag.case, Case::Linear);
    }

    #[test]
    fn linear_geometry_by_integration() {
        let p = Problem::new(4, 1.0, 2.5, 0.5, 1.25, 0.3).unwrap();
        let prof = solve_profile(0.5, &p, 64).unwrap();
        for ((s, h), k) in prof.grid.iter().zip(&prof.h).zip(&prof.k) {
            assert!((h - 0.5 * s).abs() < 1e-10);
            assert!((k - 0.5).abs() < 1e-10);
        }
    }

    #[test]
    fn generic_instance_solves() {
        let p = generic();
        let sol = find_lambda(&p, 1e-9).unwrap();
        assert_eq!(sol.profile.h[0], 1.0);
        assert!((sol.profile.end_value() - 3.0).abs() < 1e-8);
        let tag = classify_case(&sol.profile, &p, 1e-9).unwrap();
        // H/s goes from 1 to 1.5.
        assert_eq!(tag.case, Case::Expanding);
        assert!(tag.c < 0.0);
    }

    #[test]
    fn mixed_signs_are_rejected() {
        let p = generic();
        let grid = uniform_grid(1.0, 2.0, 5);
        let h = vec![1.0, 1.5, 2.0, 2.5, 3.0];
        let k = vec![0.5, 0.5, 3.0, 0.5, 0.5];
        let prof = Profile { grid, h, k, lambda: None, initial_slope: 0.5 };
        assert!(matches!(classify_case(&prof, &p, 1e-9), Err(Error::MixedSign { .. })));
    }
}
