//! Invariant checks run by `verify`, one function per property.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::bvp::{
    classify_case, q_value, shoot, solve_el_direct, solve_reduced, Case, ShootingOptions, Solution,
};
use crate::model::{half_pow, EvalPoint, Integrand, Problem, ReducedPoint};
use crate::variational::{
    discrete_minimize, dominance, el_residual, energy, fd_slopes, perturb, profile_value, random_trials,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Pass,
    Fail,
    Skip,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CheckOutcome {
    pub name: &'static str,
    pub status: Status,
    pub detail: String,
}

impl CheckOutcome {
    fn new(name: &'static str, passed: bool, detail: String) -> Self {
        Self { name, status: if passed { Status::Pass } else { Status::Fail }, detail }
    }

    fn skipped(name: &'static str, detail: &str) -> Self {
        Self { name, status: Status::Skip, detail: detail.to_string() }
    }

    fn failed(name: &'static str, err: impl std::fmt::Display) -> Self {
        Self { name, status: Status::Fail, detail: format!("error: {err}") }
    }

    pub fn passed(&self) -> bool {
        self.status != Status::Fail
    }
}

impl std::fmt::Display for CheckOutcome {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let tag = match self.status {
            Status::Pass => "PASS",
            Status::Fail => "FAIL",
            Status::Skip => "SKIP",
        };
        write!(f, "[{tag}] {:<22} {}", self.name, self.detail)
    }
}

/// Random admissible `(s, H, K)` around the problem's annuli, `K` log-uniform in `[1e-2, 1e2]`.
pub fn random_points(problem: &Problem, count: usize, seed: u64) -> Vec<EvalPoint> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| EvalPoint {
            s: rng.gen_range(problem.r()..=problem.big_r()),
            h: rng.gen_range(problem.r_star()..=problem.big_r_star()),
            k: 10f64.powf(rng.gen_range(-2.0..2.0)),
        })
        .collect()
}

pub fn g_negative(f: &Integrand, count: usize, seed: u64) -> CheckOutcome {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst = f64::NEG_INFINITY;
    for _ in 0..count {
        let t = 10f64.powf(rng.gen_range(-3.0..3.0));
        let y = 10f64.powf(rng.gen_range(-3.0..3.0));
        worst = worst.max(f.g_rhs(&ReducedPoint { t, y }));
    }
    CheckOutcome::new("g_negative", worst < 0.0, format!("max G over {count} points = {worst:.3e}"))
}

/// `|value/expected - 1|`, computed through logarithms; infinite on a sign mismatch.
fn log_ratio_deviation(value: f64, expected: f64) -> f64 {
    if value.signum() != expected.signum() || value == 0.0 {
        return f64::INFINITY;
    }
    (value.abs().ln() - expected.abs().ln()).exp_m1().abs()
}

/// `t G(t, A) → -(b/a)(n-1)^((n-2)/2) A^(1-n)` as `t → 0`, evaluated at `t`.
/// The relative correction is `O(t)` with a coefficient growing like `b/a`.
pub fn small_t_limit(f: &Integrand, anchors: &[f64], t: f64) -> (f64, CheckOutcome) {
    let n = f.n as i32;
    let worst = anchors
        .iter()
        .map(|&a_val| {
            let value = t * f.g_rhs(&ReducedPoint { t, y: a_val });
            let expected = -(f.b / f.a) * half_pow((n - 1) as f64, n - 2) * a_val.powi(1 - n);
            log_ratio_deviation(value, expected)
        })
        .fold(0.0, f64::max);
    (worst, CheckOutcome::new("small_t_limit", worst < 1e-3, format!("max rel deviation at t={t:.1e}: {worst:.3e}")))
}

/// `t G(t, B) → -(a/b)(n-1)^((n-2)/2) B^(n+1)` as `t → ∞`, evaluated at `t`.
pub fn large_t_limit(f: &Integrand, anchors: &[f64], t: f64) -> (f64, CheckOutcome) {
    let n = f.n as i32;
    let worst = anchors
        .iter()
        .map(|&b_val| {
            let value = t * f.g_rhs(&ReducedPoint { t, y: b_val });
            let expected = -(f.a / f.b) * half_pow((n - 1) as f64, n - 2) * b_val.powi(n + 1);
            log_ratio_deviation(value, expected)
        })
        .fold(0.0, f64::max);
    (worst, CheckOutcome::new("large_t_limit", worst < 1e-3, format!("max rel deviation at t={t:.1e}: {worst:.3e}")))
}

pub fn large_slope_limit(f: &Integrand) -> CheckOutcome {
    let worst = [1e-2, 0.5, 1.0, 2.0, 1e2]
        .iter()
        .map(|&t| (f.g_rhs(&ReducedPoint { t, y: 1e8 }) + 1.0).abs())
        .fold(0.0, f64::max);
    CheckOutcome::new("large_slope_limit", worst < 1e-4, format!("max |G(t, 1e8) + 1| = {worst:.3e}"))
}

pub fn convexity(f: &Integrand, points: &[EvalPoint]) -> CheckOutcome {
    let min = points.iter().map(|p| f.lagrangian_d2kk(p)).fold(f64::INFINITY, f64::min);
    CheckOutcome::new("convexity", min > 0.0, format!("min L_KK over {} points = {min:.3e}", points.len()))
}

/// Worst scaled deviation of `(L_K, L_H, L_KK)` from central differences of `L`.
pub fn derivative_errors(f: &Integrand, p: &EvalPoint) -> [f64; 3] {
    let l = f.lagrangian(p);
    let at = |s: f64, h: f64, k: f64| f.lagrangian(&EvalPoint { s, h, k });
    let dk = 1e-5 * p.k;
    let dh = 1e-5 * p.h;
    let fd_k = (at(p.s, p.h, p.k + dk) - at(p.s, p.h, p.k - dk)) / (2.0 * dk);
    let fd_h = (at(p.s, p.h + dh, p.k) - at(p.s, p.h - dh, p.k)) / (2.0 * dh);
    let second = |step: f64| (at(p.s, p.h, p.k + step) - 2.0 * l + at(p.s, p.h, p.k - step)) / (step * step);
    let step = 1e-3 * p.k;
    let fd_kk = (4.0 * second(0.5 * step) - second(step)) / 3.0;
    let scaled = |analytic: f64, fd: f64, natural: f64| (analytic - fd).abs() / analytic.abs().max(natural);
    [
        scaled(f.lagrangian_dk(p), fd_k, l / p.k),
        scaled(f.lagrangian_dh(p), fd_h, l / p.h),
        scaled(f.lagrangian_d2kk(p), fd_kk, l / (p.k * p.k)),
    ]
}

pub fn derivatives(f: &Integrand, points: &[EvalPoint]) -> CheckOutcome {
    let mut worst = [0.0f64; 3];
    for p in points {
        let e = derivative_errors(f, p);
        for j in 0..3 {
            worst[j] = worst[j].max(e[j]);
        }
    }
    let max = worst.iter().cloned().fold(0.0, f64::max);
    CheckOutcome::new(
        "derivatives_fd",
        max < 1e-6,
        format!("max rel error L_K {:.1e}, L_H {:.1e}, L_KK {:.1e}", worst[0], worst[1], worst[2]),
    )
}

/// `min L(s, H, K) / (K^n + K^(1-n))` over the annulus box and `K ∈ [1e-4, 1e4]`.
pub fn coercivity(problem: &Problem) -> CheckOutcome {
    let f = problem.integrand();
    let n = problem.n() as i32;
    let mut min = f64::INFINITY;
    for i in 0..=8 {
        let s = problem.r() + (problem.big_r() - problem.r()) * i as f64 / 8.0;
        for j in 0..=8 {
            let h = problem.r_star() + (problem.big_r_star() - problem.r_star()) * j as f64 / 8.0;
            for m in 0..=160 {
                let k = 10f64.powf(-4.0 + 8.0 * m as f64 / 160.0);
                let ratio = f.lagrangian(&EvalPoint { s, h, k }) / (k.powi(n) + k.powi(1 - n));
                min = min.min(ratio);
            }
        }
    }
    CheckOutcome::new("coercivity", min > 0.0 && min.is_finite(), format!("min L/(K^n + K^(1-n)) = {min:.3e}"))
}

/// Distortion term equals `K` times the energy term with `s ↔ H`, `K → 1/K`, `a → b`.
pub fn duality(f: &Integrand, points: &[EvalPoint]) -> CheckOutcome {
    let swapped = Integrand { n: f.n, a: f.b, b: f.a };
    let worst = points
        .iter()
        .map(|p| {
            let d = f.distortion_term(p);
            let e = p.k * swapped.energy_term(&EvalPoint { s: p.h, h: p.s, k: 1.0 / p.k });
            (d - e).abs() / d
        })
        .fold(0.0, f64::max);
    CheckOutcome::new("duality", worst < 1e-13, format!("max rel difference {worst:.1e}"))
}

/// `M = -G(H/s, K)/s²` and `H'' = (H - sK) M` from the directly differentiated equation.
pub fn el_consistency(f: &Integrand, points: &[EvalPoint]) -> CheckOutcome {
    let (mut worst_g, mut worst_acc) = (0.0f64, 0.0f64);
    for p in points {
        let m = f.m_coeff(p);
        let g = f.g_rhs(&ReducedPoint { t: p.h / p.s, y: p.k });
        worst_g = worst_g.max((m + g / (p.s * p.s)).abs() / m);
        let acc = f.el_acceleration(p);
        let reduced = (p.h - p.s * p.k) * m;
        let scale = acc.abs().max(reduced.abs()).max(1e-300);
        worst_acc = worst_acc.max((acc - reduced).abs() / scale);
    }
    let positive = points.iter().all(|p| f.m_coeff(p) > 0.0);
    CheckOutcome::new(
        "el_consistency",
        positive && worst_g < 1e-12 && worst_acc < 1e-8,
        format!("M>0: {positive}; |M + G/s²|/M <= {worst_g:.1e}; |H'' - (H-sK)M| rel <= {worst_acc:.1e}"),
    )
}

pub fn flux_monotone(problem: &Problem, lambdas: &[f64]) -> CheckOutcome {
    let mut detail = Vec::new();
    let mut ok = true;
    for &lambda in lambdas {
        match solve_reduced(lambda, lambda / 20.0, lambda * 20.0, problem) {
            Ok(curve) => {
                let pts = curve.points();
                let violations = pts.windows(2).filter(|w| !(w[1].1 < w[0].1)).count();
                let positive = pts.iter().all(|p| p.1 > 0.0);
                ok &= violations == 0 && positive && curve.value(lambda).ok() == Some(lambda);
                detail.push(format!("λ={lambda}: {} nodes, {violations} violations", pts.len()));
            }
            Err(e) => {
                ok = false;
                detail.push(format!("λ={lambda}: {e}"));
            }
        }
    }
    CheckOutcome::new("flux_monotone", ok, detail.join("; "))
}

/// `points` values geometrically spaced over `[lo, hi]`.
pub fn log_grid(lo: f64, hi: f64, points: usize) -> Vec<f64> {
    (0..points).map(|i| lo * (hi / lo).powf(i as f64 / (points - 1) as f64)).collect()
}

pub fn q_monotone(problem: &Problem, ts: &[f64], lambdas: &[f64]) -> CheckOutcome {
    let mut ok = true;
    let mut detail = Vec::new();
    for &t in ts {
        let values: Result<Vec<f64>, _> = lambdas.iter().map(|&l| q_value(l, t, problem)).collect();
        match values {
            Ok(v) => {
                let violations = v.windows(2).filter(|w| !(w[1] > w[0])).count();
                ok &= violations == 0;
                detail.push(format!("t={t}: Q from {:.3e} to {:.3e}, {violations} violations", v[0], v[v.len() - 1]));
            }
            Err(e) => {
                ok = false;
                detail.push(format!("t={t}: {e}"));
            }
        }
    }
    CheckOutcome::new("q_monotone", ok, detail.join("; "))
}

pub fn shoot_monotone(problem: &Problem, lambdas: &[f64]) -> CheckOutcome {
    let values: Result<Vec<f64>, _> = lambdas.iter().map(|&l| shoot(l, problem)).collect();
    match values {
        Ok(v) => {
            let violations = v.windows(2).filter(|w| !(w[1] > w[0])).count();
            let brackets = v[0] < 0.0 && v[v.len() - 1] > 0.0;
            CheckOutcome::new(
                "shoot_monotone",
                violations == 0 && brackets,
                format!("{} λ values, {violations} violations, sign change: {brackets}", v.len()),
            )
        }
        Err(e) => CheckOutcome::failed("shoot_monotone", e),
    }
}

pub fn boundary(problem: &Problem, solution: &Solution, tol: f64) -> CheckOutcome {
    let p = &solution.profile;
    let end = (p.end_value() - problem.big_r_star()).abs() / problem.big_r_star();
    let start_exact = p.h[0] == problem.r_star();
    CheckOutcome::new(
        "boundary_values",
        end < tol && start_exact,
        format!("H(r) exact: {start_exact}; |H(R) - R*|/R* = {end:.2e}"),
    )
}

pub fn stationarity(problem: &Problem, solution: &Solution) -> CheckOutcome {
    let span = problem.big_r_star() - problem.r_star();
    let res = el_residual(&solution.profile, problem);
    let bumped = el_residual(&perturb(&solution.profile, 0.01 * span, 1), problem);
    match (res, bumped) {
        (Ok(r), Ok(b)) => CheckOutcome::new(
            "el_residual",
            r < 1e-5 && b >= 10.0 * r,
            format!("solution {r:.2e}; 1% perturbation {b:.2e}"),
        ),
        (Err(e), _) | (_, Err(e)) => CheckOutcome::failed("el_residual", e),
    }
}

/// Sign structure of `H - sH'`: constant sign, matching tag, and
/// `(log|H - sH'|)' = -s M(s)` at interior nodes.
pub fn defect_structure(problem: &Problem, solution: &Solution) -> CheckOutcome {
    let p = &solution.profile;
    let tag = match classify_case(p, problem, 1e-9) {
        Ok(tag) => tag,
        Err(e) => return CheckOutcome::failed("defect_structure", e),
    };
    if tag.case == Case::Linear {
        return CheckOutcome::new("defect_structure", true, "linear profile, H - sH' ≡ 0".into());
    }
    let ratios: Vec<f64> = p.grid.iter().zip(&p.h).map(|(s, h)| h / s).collect();
    let increasing = ratios.windows(2).all(|w| w[1] > w[0]);
    let decreasing = ratios.windows(2).all(|w| w[1] < w[0]);
    let tag_ok = match tag.case {
        Case::Expanding => increasing,
        Case::Contracting => decreasing,
        Case::Linear => true,
    };
    let f = problem.integrand();
    let log_defect: Vec<f64> = p.defect().iter().map(|d| d.abs().ln()).collect();
    let n = p.len();
    let step = (p.grid[n - 1] - p.grid[0]) / (n - 1) as f64;
    let worst = (2..n - 2)
        .map(|i| {
            let d = (-log_defect[i + 2] + 8.0 * log_defect[i + 1] - 8.0 * log_defect[i - 1] + log_defect[i - 2]) / (12.0 * step);
            let expected = -p.grid[i] * f.m_coeff(&EvalPoint { s: p.grid[i], h: p.h[i], k: p.k[i] });
            (d - expected).abs() / expected.abs()
        })
        .fold(0.0, f64::max);
    CheckOutcome::new(
        "defect_structure",
        tag_ok && worst < 1e-4,
        format!("case {} (c={:.3e}), H/s monotone as tagged: {tag_ok}; log-derivative rel error {worst:.1e}", tag.case, tag.c),
    )
}

/// Second-order equation integrated directly vs. the reduced shooting profile.
pub fn formulations_agree(problem: &Problem, solution: &Solution, opts: &ShootingOptions) -> CheckOutcome {
    let p = &solution.profile;
    match solve_el_direct(problem, p.initial_slope, &ShootingOptions { grid_size: p.len(), ..*opts }) {
        Ok(direct) => {
            let worst = direct.h.iter().zip(&p.h).map(|(a, b)| (a - b).abs() / b).fold(0.0, f64::max);
            CheckOutcome::new("formulations_agree", worst < 1e-7, format!("max rel |H_direct - H_reduced| = {worst:.1e}"))
        }
        Err(e) => CheckOutcome::failed("formulations_agree", e),
    }
}

/// Energy with `K` from the flow vs. with `K` from differences of `H`.
pub fn slope_representations(problem: &Problem, solution: &Solution) -> CheckOutcome {
    let p = &solution.profile;
    let mut fd = p.clone();
    fd.k = fd_slopes(&p.grid, &p.h);
    match (energy(p, problem), energy(&fd, problem)) {
        (Ok(a), Ok(b)) => {
            let rel = (a.total() - b.total()).abs() / a.total();
            CheckOutcome::new("slope_representations", rel < 1e-6, format!("rel energy difference {rel:.1e}"))
        }
        (Err(e), _) | (_, Err(e)) => CheckOutcome::failed("slope_representations", e),
    }
}

pub fn dominance_check(problem: &Problem, solution: &Solution, trials: usize, seed: u64) -> CheckOutcome {
    if trials == 0 {
        return CheckOutcome::skipped("dominance", "no trials requested");
    }
    let set = random_trials(problem, &solution.profile, trials, seed);
    match dominance(problem, &solution.profile, &set) {
        Ok(d) => {
            let threshold = 1e-3 * (problem.big_r_star() - problem.r_star());
            CheckOutcome::new(
                "dominance",
                d.holds(1e-9, 1e-6, threshold),
                format!("{trials} trials, worst relative margin {:.2e}", d.worst_margin()),
            )
        }
        Err(e) => CheckOutcome::failed("dominance", e),
    }
}

pub fn oracle_check(problem: &Problem, solution: &Solution, grid: usize, max_iters: usize) -> CheckOutcome {
    if grid == 0 {
        return CheckOutcome::skipped("oracle", "no oracle grid requested");
    }
    let res = match discrete_minimize(problem, grid, max_iters) {
        Ok(r) => r,
        Err(e) => return CheckOutcome::failed("oracle", e),
    };
    let e_sol = match energy(&solution.profile, problem) {
        Ok(e) => e.total(),
        Err(e) => return CheckOutcome::failed("oracle", e),
    };
    let span = problem.big_r_star() - problem.r_star();
    let o = &res.trial.profile;
    let dev = o
        .grid
        .iter()
        .zip(&o.h)
        .map(|(s, h)| profile_value(&solution.profile, *s).map(|v| (v - h).abs()).unwrap_or(f64::INFINITY))
        .fold(0.0, f64::max);
    let rel = (res.energy - e_sol) / e_sol;
    let monotone = res.history.windows(2).all(|w| w[1] <= w[0] * (1.0 + 1e-12));
    CheckOutcome::new(
        "oracle",
        rel.abs() < 5e-3 && rel > -1e-9 && dev < 1e-2 * span && monotone,
        format!(
            "grid {grid}: (E_oracle - E_solver)/E_solver = {rel:.2e}, profile sup-distance {:.2e}·(R*-r*), {} sweeps",
            dev / span,
            res.sweeps
        ),
    )
}

/// Unweighted energy pieces of the minimizer respond monotonically to `α`:
/// the `n`-energy does not increase and the distortion does not decrease.
pub fn alpha_response(problem: &Problem, tol: f64) -> CheckOutcome {
    let mut rows = Vec::new();
    for i in 1..=9 {
        let alpha = i as f64 / 10.0;
        let p = match problem.with_alpha(alpha) {
            Ok(p) => p,
            Err(e) => return CheckOutcome::failed("alpha_response", e),
        };
        match crate::bvp::find_lambda(&p, tol).and_then(|s| energy(&s.profile, &p)) {
            Ok(e) => rows.push((e.energy_term / p.a(), e.distortion_term / p.b())),
            Err(e) => return CheckOutcome::failed("alpha_response", e),
        }
    }
    let slack = 1e-9;
    let energy_ok = rows.windows(2).all(|w| w[1].0 <= w[0].0 * (1.0 + slack));
    let distortion_ok = rows.windows(2).all(|w| w[1].1 >= w[0].1 * (1.0 - slack));
    CheckOutcome::new(
        "alpha_response",
        energy_ok && distortion_ok,
        format!("n-energy non-increasing: {energy_ok}; distortion non-decreasing: {distortion_ok}"),
    )
}
