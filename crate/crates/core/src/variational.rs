//! Energy evaluation and minimality checks.
//!
//! Profiles carry node values `H_i` and slopes `K_i`; inside a grid cell the
//! profile is the cubic Hermite interpolant of that data and the energy
//! `ω_{n-1} ∫ L(s, H, H') ds` is integrated with 5-point Gauss–Legendre per
//! cell. The discrete oracle minimizes over piecewise-linear profiles with
//! the same per-cell rule.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::bvp::{classify_case, uniform_grid, CaseTag, Profile};
use crate::error::{Error, Result};
use crate::model::{EvalPoint, Integrand, Problem};

/// Gauss–Legendre nodes and weights on `[-1, 1]`, 5 points.
pub const GAUSS5: [(f64, f64); 5] = [
    (-0.906_179_845_938_664, 0.236_926_885_056_189_1),
    (-0.538_469_310_105_683_1, 0.478_628_670_499_366_5),
    (0.0, 0.568_888_888_888_888_9),
    (0.538_469_310_105_683_1, 0.478_628_670_499_366_5),
    (0.906_179_845_938_664, 0.236_926_885_056_189_1),
];

/// The two weighted pieces of the total energy.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnergyParts {
    /// `ω ∫ a s^(n-1) ‖Dh‖^n ds`.
    pub energy_term: f64,
    /// `ω ∫ b ‖Dh⁻¹‖^n J_h s^(n-1) ds`.
    pub distortion_term: f64,
}

impl EnergyParts {
    pub fn total(&self) -> f64 {
        self.energy_term + self.distortion_term
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnergyReport {
    pub total: f64,
    pub energy_term: f64,
    pub distortion_term: f64,
    pub el_residual: f64,
    /// `None` when `H - sH'` changes sign (not a stationary profile).
    pub case: Option<CaseTag>,
    pub lambda_star: Option<f64>,
}

fn check_profile(grid: &[f64], h: &[f64], k: &[f64]) -> Result<()> {
    if grid.len() < 2 || h.len() != grid.len() || k.len() != grid.len() {
        return Err(Error::InvalidArgument(format!(
            "profile arrays disagree: grid={}, H={}, K={}",
            grid.len(),
            h.len(),
            k.len()
        )));
    }
    if grid.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::InvalidArgument("grid must be strictly increasing".into()));
    }
    Ok(())
}

/// Energy pieces of a profile by cubic Hermite interpolation and Gauss–Legendre per cell.
pub fn energy(profile: &Profile, problem: &Problem) -> Result<EnergyParts> {
    check_profile(&profile.grid, &profile.h, &profile.k)?;
    let f = problem.integrand();
    let (mut e_acc, mut d_acc) = (0.0, 0.0);
    for i in 0..profile.len() - 1 {
        let (s0, s1) = (profile.grid[i], profile.grid[i + 1]);
        let width = s1 - s0;
        let (h0, h1, k0, k1) = (profile.h[i], profile.h[i + 1], profile.k[i], profile.k[i + 1]);
        for &(x, w) in &GAUSS5 {
            let theta = 0.5 * (x + 1.0);
            let t2 = theta * theta;
            let t3 = t2 * theta;
            let h = (2.0 * t3 - 3.0 * t2 + 1.0) * h0
                + (t3 - 2.0 * t2 + theta) * width * k0
                + (-2.0 * t3 + 3.0 * t2) * h1
                + (t3 - t2) * width * k1;
            let k = (6.0 * t2 - 6.0 * theta) * (h0 - h1) / width
                + (3.0 * t2 - 4.0 * theta + 1.0) * k0
                + (3.0 * t2 - 2.0 * theta) * k1;
            let p = EvalPoint { s: s0 + theta * width, h, k };
            if !(h > 0.0 && k > 0.0) {
                return Err(Error::Evaluation(format!("profile not increasing near s={} (H={h}, K={k})", p.s)));
            }
            let (e, d) = (f.energy_term(&p), f.distortion_term(&p));
            if !(e.is_finite() && d.is_finite()) {
                return Err(Error::Evaluation(format!("non-finite integrand at s={}", p.s)));
            }
            e_acc += 0.5 * width * w * e;
            d_acc += 0.5 * width * w * d;
        }
    }
    Ok(EnergyParts { energy_term: problem.omega() * e_acc, distortion_term: problem.omega() * d_acc })
}

/// Full report: energy pieces, Euler–Lagrange residual and case tag.
pub fn total_energy(profile: &Profile, problem: &Problem) -> Result<EnergyReport> {
    let parts = energy(profile, problem)?;
    let el = el_residual(profile, problem)?;
    let lambda_star = profile.lambda;
    Ok(EnergyReport {
        total: parts.total(),
        energy_term: parts.energy_term,
        distortion_term: parts.distortion_term,
        el_residual: el,
        case: classify_case(profile, problem, 1e-9).ok(),
        lambda_star,
    })
}

/// Largest relative Euler–Lagrange defect `|L_H - (L_K)'| / (|L_H| + |(L_K)'| + ε)`
/// over interior nodes, with `(L_K)'` by fourth-order central differences.
/// Assumes a uniform grid of at least 16 nodes.
pub fn el_residual(profile: &Profile, problem: &Problem) -> Result<f64> {
    check_profile(&profile.grid, &profile.h, &profile.k)?;
    let n = profile.len();
    if n < 16 {
        return Err(Error::InvalidArgument(format!("residual needs at least 16 nodes, got {n}")));
    }
    let f = problem.integrand();
    let step = (profile.grid[n - 1] - profile.grid[0]) / (n - 1) as f64;
    let point = |i: usize| EvalPoint { s: profile.grid[i], h: profile.h[i], k: profile.k[i] };
    let l_k: Vec<f64> = (0..n).map(|i| f.lagrangian_dk(&point(i))).collect();
    let pairs: Vec<(f64, f64)> = (2..n - 2)
        .map(|i| {
            let d = (-l_k[i + 2] + 8.0 * l_k[i + 1] - 8.0 * l_k[i - 1] + l_k[i - 2]) / (12.0 * step);
            (f.lagrangian_dh(&point(i)), d)
        })
        .collect();
    let scale = pairs.iter().map(|(a, b)| a.abs() + b.abs()).fold(0.0, f64::max);
    let eps = 1e-12 * scale.max(f64::MIN_POSITIVE);
    Ok(pairs.iter().map(|(a, b)| (a - b).abs() / (a.abs() + b.abs() + eps)).fold(0.0, f64::max))
}

/// Node slopes from node values: central differences inside, one-sided at the ends.
pub fn fd_slopes(grid: &[f64], h: &[f64]) -> Vec<f64> {
    let n = grid.len();
    (0..n)
        .map(|i| {
            let (lo, hi) = match i {
                0 => (0, 1),
                _ if i == n - 1 => (n - 2, n - 1),
                _ => (i - 1, i + 1),
            };
            (h[hi] - h[lo]) / (grid[hi] - grid[lo])
        })
        .collect()
}

/// Profile value at `s` by cubic Hermite interpolation.
pub fn profile_value(profile: &Profile, s: f64) -> Result<f64> {
    let g = &profile.grid;
    if !(s >= g[0] && s <= g[g.len() - 1]) {
        return Err(Error::OutOfRange { x: s, lo: g[0], hi: g[g.len() - 1] });
    }
    let i = g.partition_point(|&v| v <= s).saturating_sub(1).min(g.len() - 2);
    let width = g[i + 1] - g[i];
    let theta = (s - g[i]) / width;
    let t2 = theta * theta;
    let t3 = t2 * theta;
    Ok((2.0 * t3 - 3.0 * t2 + 1.0) * profile.h[i]
        + (t3 - 2.0 * t2 + theta) * width * profile.k[i]
        + (-2.0 * t3 + 3.0 * t2) * profile.h[i + 1]
        + (t3 - t2) * width * profile.k[i + 1])
}

/// Adds `amplitude · sin(mode·π(s - r)/(R - r))` to `H` (and its derivative to `K`).
pub fn perturb(profile: &Profile, amplitude: f64, mode: u32) -> Profile {
    let (lo, hi) = (profile.grid[0], profile.grid[profile.len() - 1]);
    let freq = mode as f64 * std::f64::consts::PI / (hi - lo);
    let mut out = profile.clone();
    let last = out.len() - 1;
    for (i, &s) in profile.grid.iter().enumerate() {
        let phase = freq * (s - lo);
        if i != 0 && i != last {
            out.h[i] += amplitude * phase.sin();
        }
        out.k[i] += amplitude * freq * phase.cos();
    }
    out.lambda = None;
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Provenance {
    Random,
    PowerLaw,
    Perturbation,
    Oracle,
}

/// A competitor profile with exact end values.
#[derive(Debug, Clone, PartialEq)]
pub struct TrialProfile {
    pub profile: Profile,
    pub provenance: Provenance,
}

impl TrialProfile {
    /// Sup-norm distance of node values from another profile on the same grid.
    pub fn deviation(&self, other: &Profile) -> f64 {
        self.profile.h.iter().zip(&other.h).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max)
    }
}

fn trial(grid: Vec<f64>, h: Vec<f64>, k: Vec<f64>, provenance: Provenance) -> TrialProfile {
    let k0 = k[0];
    TrialProfile { profile: Profile { grid, h, k, lambda: None, initial_slope: k0 }, provenance }
}

/// Deterministic competitors on the grid of `solution`: normalized cumulative
/// sums of positive random increments, power laws `H = A s^p + B` with
/// `p ∈ [0.3, 3]`, and smooth perturbations of `solution` with sup-norm
/// amplitudes between `1e-4` and `3e-2` of `R* - r*`.
pub fn random_trials(problem: &Problem, solution: &Profile, count: usize, seed: u64) -> Vec<TrialProfile> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let grid = solution.grid.clone();
    let (r, big_r) = (problem.r(), problem.big_r());
    let (r_star, big_r_star) = (problem.r_star(), problem.big_r_star());
    let span = big_r_star - r_star;
    let n = grid.len();
    let min_k = solution.k.iter().cloned().fold(f64::INFINITY, f64::min);

    (0..count)
        .map(|i| match i % 3 {
            0 => {
                // Slowly modulated increments in [0.5, 1.5] keep central-difference
                // slopes within the monotone range of the Hermite interpolant.
                let phase: f64 = rng.gen_range(0.0..std::f64::consts::TAU);
                let depth: f64 = rng.gen_range(0.0..0.8);
                let incs: Vec<f64> = (0..n - 1)
                    .map(|j| {
                        let x = j as f64 / (n - 1) as f64;
                        rng.gen_range(0.5..1.5) * (depth * (std::f64::consts::TAU * x + phase).sin()).exp()
                    })
                    .collect();
                let total: f64 = incs.iter().sum();
                let mut h = Vec::with_capacity(n);
                let mut acc = r_star;
                h.push(acc);
                for inc in &incs[..n - 2] {
                    acc += span * inc / total;
                    h.push(acc);
                }
                h.push(big_r_star);
                let k = fd_slopes(&grid, &h);
                trial(grid.clone(), h, k, Provenance::Random)
            }
            1 => {
                let p: f64 = rng.gen_range(0.3..3.0);
                let a = span / (big_r.powf(p) - r.powf(p));
                let b = r_star - a * r.powf(p);
                let mut h: Vec<f64> = grid.iter().map(|s| a * s.powf(p) + b).collect();
                h[0] = r_star;
                h[n - 1] = big_r_star;
                let k = grid.iter().map(|s| a * p * s.powf(p - 1.0)).collect();
                trial(grid.clone(), h, k, Provenance::PowerLaw)
            }
            _ => {
                let mode: u32 = rng.gen_range(1..=4);
                let rel = 10f64.powf(rng.gen_range(-4.0..(3e-2f64).log10()));
                let freq = mode as f64 * std::f64::consts::PI / (big_r - r);
                let amplitude = (rel * span).min(0.5 * min_k / freq);
                let sign = if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
                let mut t = perturb(solution, sign * amplitude, mode);
                t.h[0] = r_star;
                t.h[n - 1] = big_r_star;
                t.initial_slope = t.k[0];
                TrialProfile { profile: t, provenance: Provenance::Perturbation }
            }
        })
        .collect()
}

/// Outcome of comparing a solution against competitors.
#[derive(Debug, Clone, PartialEq)]
pub struct Dominance {
    pub solution_energy: f64,
    /// `(E(trial) - E(solution)) / E(trial)` per trial.
    pub margins: Vec<f64>,
    pub deviations: Vec<f64>,
}

impl Dominance {
    /// Smallest relative margin over all trials.
    pub fn worst_margin(&self) -> f64 {
        self.margins.iter().cloned().fold(f64::INFINITY, f64::min)
    }

    /// True if every trial has energy at least the solution's up to `slack`,
    /// and at least `strict` more whenever it deviates by `min_deviation` or more.
    pub fn holds(&self, slack: f64, strict: f64, min_deviation: f64) -> bool {
        self.margins.iter().zip(&self.deviations).all(|(&m, &d)| m >= -slack && (d < min_deviation || m >= strict))
    }
}

pub fn dominance(problem: &Problem, solution: &Profile, trials: &[TrialProfile]) -> Result<Dominance> {
    let e_sol = energy(solution, problem)?.total();
    let mut margins = Vec::with_capacity(trials.len());
    let mut deviations = Vec::with_capacity(trials.len());
    for t in trials {
        let e = energy(&t.profile, problem)?.total();
        margins.push((e - e_sol) / e);
        deviations.push(t.deviation(solution));
    }
    Ok(Dominance { solution_energy: e_sol, margins, deviations })
}

/// Energy of one cell of a piecewise-linear profile, without the `ω` factor.
#[inline]
fn linear_cell(f: &Integrand, s0: f64, s1: f64, h0: f64, h1: f64) -> f64 {
    let width = s1 - s0;
    let k = (h1 - h0) / width;
    if !(k > 0.0) {
        return f64::INFINITY;
    }
    let mut acc = 0.0;
    for &(x, w) in &GAUSS5 {
        let theta = 0.5 * (x + 1.0);
        acc += w * f.lagrangian(&EvalPoint { s: s0 + theta * width, h: h0 + theta * (h1 - h0), k });
    }
    0.5 * width * acc
}

/// Energy of the piecewise-linear profile through `(grid_i, h_i)`.
pub fn discrete_energy(problem: &Problem, grid: &[f64], h: &[f64]) -> Result<f64> {
    if grid.len() != h.len() || grid.len() < 2 {
        return Err(Error::InvalidArgument("grid and values must match".into()));
    }
    let f = problem.integrand();
    let total: f64 = (0..grid.len() - 1).map(|i| linear_cell(&f, grid[i], grid[i + 1], h[i], h[i + 1])).sum();
    if !total.is_finite() {
        return Err(Error::Evaluation("piecewise-linear profile is not strictly increasing".into()));
    }
    Ok(problem.omega() * total)
}

#[derive(Debug, Clone)]
pub struct OracleResult {
    pub trial: TrialProfile,
    pub energy: f64,
    pub converged: bool,
    /// Total sweeps over all levels.
    pub sweeps: usize,
    /// Energy after every sweep, finest level last.
    pub history: Vec<f64>,
}

/// Brute-force minimizer of the piecewise-linear energy over `grid_size`
/// cells with fixed end values, by cyclic coordinate descent with
/// golden-section line searches. Each node stays at least
/// `1e-6 (R* - r*)/grid_size` above its left neighbour and below its right.
///
/// Coarse levels are solved first (from the linear profile on the coarsest
/// grid) and prolonged by midpoint insertion, which preserves the
/// piecewise-linear function and therefore its energy. Each level stops when
/// a sweep lowers the energy by less than `1e-12` relative or after
/// `max_iters` sweeps.
pub fn discrete_minimize(problem: &Problem, grid_size: usize, max_iters: usize) -> Result<OracleResult> {
    if grid_size < 32 {
        return Err(Error::InvalidArgument(format!("oracle grid needs at least 32 cells, got {grid_size}")));
    }
    let mut cells = grid_size;
    while cells % 2 == 0 && cells / 2 >= 16 {
        cells /= 2;
    }
    let (r_star, big_r_star) = (problem.r_star(), problem.big_r_star());
    let span = big_r_star - r_star;
    let f = problem.integrand();
    let omega = problem.omega();

    let mut grid = uniform_grid(problem.r(), problem.big_r(), cells + 1);
    let mut h: Vec<f64> = (0..=cells).map(|i| r_star + span * i as f64 / cells as f64).collect();
    let mut history = Vec::new();
    let mut sweeps = 0;
    let mut converged;

    loop {
        let gap = 1e-6 * span / grid_size as f64;
        let level_energy = |h: &[f64], grid: &[f64]| {
            omega * (0..cells).map(|i| linear_cell(&f, grid[i], grid[i + 1], h[i], h[i + 1])).sum::<f64>()
        };
        let mut previous = level_energy(&h, &grid);
        converged = false;
        for _ in 0..max_iters {
            for i in 1..cells {
                let local = |x: f64| {
                    linear_cell(&f, grid[i - 1], grid[i], h[i - 1], x) + linear_cell(&f, grid[i], grid[i + 1], x, h[i + 1])
                };
                let (lo, hi) = (h[i - 1] + gap, h[i + 1] - gap);
                if !(hi > lo) {
                    continue;
                }
                let old = local(h[i]);
                let (x, fx) = golden_section(&local, lo, hi, 1e-15 * big_r_star);
                if fx < old {
                    h[i] = x;
                }
            }
            sweeps += 1;
            let current = level_energy(&h, &grid);
            history.push(current);
            let decrease = previous - current;
            previous = current;
            if decrease < 1e-12 * current.abs() {
                converged = true;
                break;
            }
        }
        if cells == grid_size {
            break;
        }
        let fine_cells = cells * 2;
        let fine_grid = uniform_grid(problem.r(), problem.big_r(), fine_cells + 1);
        let mut fine_h = Vec::with_capacity(fine_cells + 1);
        for i in 0..cells {
            fine_h.push(h[i]);
            fine_h.push(0.5 * (h[i] + h[i + 1]));
        }
        fine_h.push(h[cells]);
        cells = fine_cells;
        grid = fine_grid;
        h = fine_h;
    }

    let energy = discrete_energy(problem, &grid, &h)?;
    let k = fd_slopes(&grid, &h);
    Ok(OracleResult {
        trial: trial(grid, h, k, Provenance::Oracle),
        energy,
        converged,
        sweeps,
        history,
    })
}

/// Minimizes `f` on `[lo, hi]` by golden-section search; returns the best point seen.
pub fn golden_section<F: Fn(f64) -> f64>(f: &F, mut lo: f64, mut hi: f64, tol: f64) -> (f64, f64) {
    const INV_PHI: f64 = 0.618_033_988_749_894_8;
    let mut x1 = hi - INV_PHI * (hi - lo);
    let mut x2 = lo + INV_PHI * (hi - lo);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    let mut iterations = 0;
    while hi - lo > tol && iterations < 200 {
        iterations += 1;
        if f1 <= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - INV_PHI * (hi - lo);
            f1 = f(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + INV_PHI * (hi - lo);
            f2 = f(x2);
        }
    }
    if f1 <= f2 {
        (x1, f1)
    } else {
        (x2, f2)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bvp::find_lambda;

    #[test]
    fn gauss_rule_integrates_degree_nine() {
        let integral: f64 = GAUSS5.iter().map(|(x, w)| w * x.powi(8)).sum();
        assert!((integral - 2.0 / 9.0).abs() < 1e-15);
        let weights: f64 = GAUSS5.iter().map(|(_, w)| w).sum();
        assert!((weights - 2.0).abs() < 1e-15);
    }

    #[test]
    fn identity_energy_golden() {
        // ω n^{n/2} (a + b)(R² - r²)/n = 2π · 2 · (1/(3π)) · 3/2 = 2.
        let p = Problem::new(2, 1.0, 2.0, 1.0, 2.0, 0.5).unwrap();
        let prof = Profile::linear(&p, 64);
        let e = energy(&prof, &p).unwrap();
        assert!((e.total() - 2.0).abs() < 1e-13, "{}", e.total());
        assert!((e.energy_term - e.distortion_term).abs() < 1e-13);
    }

    #[test]
    fn golden_section_finds_parabola_minimum() {
        let (x, fx) = golden_section(&|x: f64| (x - 0.3).powi(2) + 1.0, -2.0, 5.0, 1e-12);
        assert!((x - 0.3).abs() < 1e-6 && (fx - 1.0).abs() < 1e-12);
    }

    #[test]
    fn residual_requires_sixteen_nodes() {
        let p = Problem::new(2, 1.0, 2.0, 1.0, 2.0, 0.5).unwrap();
        assert!(el_residual(&Profile::linear(&p, 15), &p).is_err());
        assert!(el_residual(&Profile::linear(&p, 16), &p).unwrap() < 1e-12);
    }

    #[test]
    fn energy_rejects_decreasing_profile() {
        let p = Problem::new(2, 1.0, 2.0, 1.0, 2.0, 0.5).unwrap();
        let mut prof = Profile::linear(&p, 8);
        prof.k[3] = -5.0;
        assert!(matches!(energy(&prof, &p), Err(Error::Evaluation(_))));
        assert!(discrete_energy(&p, &[1.0, 1.5, 2.0], &[1.0, 0.9, 2.0]).is_err());
    }

    #[test]
    fn trials_are_admissible_and_seeded() {
        let p = Problem::new(3, 1.0, 2.0, 1.0, 4.0, 0.4).unwrap();
        let sol = find_lambda(&p, 1e-9).unwrap().profile;
        let a = random_trials(&p, &sol, 30, 11);
        let b = random_trials(&p, &sol, 30, 11);
        assert_eq!(a, b);
        assert_ne!(a, random_trials(&p, &sol, 30, 12));
        for t in &a {
            let pr = &t.profile;
            assert_eq!(pr.h[0], 1.0);
            assert_eq!(pr.end_value(), 4.0);
            assert!(pr.h.windows(2).all(|w| w[1] > w[0]));
            assert!(pr.k.iter().all(|&k| k > 0.0));
            assert!(energy(pr, &p).is_ok(), "{:?}", t.provenance);
        }
    }

    #[test]
    fn oracle_keeps_linear_minimizer() {
        let p = Problem::new(3, 1.0, 2.0, 0.5, 1.0, 0.5).unwrap();
        let res = discrete_minimize(&p, 32, 50).unwrap();
        let pr = &res.trial.profile;
        for (s, h) in pr.grid.iter().zip(&pr.h) {
            assert!((h - 0.5 * s).abs() < 1e-6);
        }
        assert!(res.history.windows(2).all(|w| w[1] <= w[0]));
    }
}
