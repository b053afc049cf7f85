//! Adaptive explicit Runge–Kutta integration (Dormand–Prince 5(4)).
//!
//! Steps are controlled with the embedded 4th-order error estimate and a PI
//! step-size controller. After each accepted step the system's domain guard
//! is checked; if it fails, the last step is bisected until the exit point
//! is localized to within `abs_tol`, and the trajectory ends at the last
//! admissible point. Integration may run in either direction.

use crate::error::{Error, Result};

/// A first-order system `y' = f(x, y)` with an admissible open region.
pub trait OdeSystem {
    fn dim(&self) -> usize;

    /// Writes `f(x, y)` into `dy`.
    fn rhs(&self, x: f64, y: &[f64], dy: &mut [f64]);

    /// True while `(x, y)` is inside the admissible region.
    fn in_domain(&self, _x: f64, _y: &[f64]) -> bool {
        true
    }
}

/// Wraps a closure as an [`OdeSystem`] with an optional guard.
pub struct FnSystem<F, G> {
    dim: usize,
    rhs: F,
    guard: G,
}

impl<F> FnSystem<F, fn(f64, &[f64]) -> bool>
where
    F: Fn(f64, &[f64], &mut [f64]),
{
    pub fn new(dim: usize, rhs: F) -> Self {
        fn always(_: f64, _: &[f64]) -> bool {
            true
        }
        Self { dim, rhs, guard: always }
    }
}

impl<F, G> FnSystem<F, G>
where
    F: Fn(f64, &[f64], &mut [f64]),
    G: Fn(f64, &[f64]) -> bool,
{
    pub fn with_guard(dim: usize, rhs: F, guard: G) -> Self {
        Self { dim, rhs, guard }
    }
}

impl<F, G> OdeSystem for FnSystem<F, G>
where
    F: Fn(f64, &[f64], &mut [f64]),
    G: Fn(f64, &[f64]) -> bool,
{
    fn dim(&self) -> usize {
        self.dim
    }
    fn rhs(&self, x: f64, y: &[f64], dy: &mut [f64]) {
        (self.rhs)(x, y, dy)
    }
    fn in_domain(&self, x: f64, y: &[f64]) -> bool {
        (self.guard)(x, y)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Termination {
    ReachedEnd,
    GuardExit,
    StepUnderflow,
    StepLimit,
}

/// Accepted integration nodes with states and derivatives.
#[derive(Debug, Clone)]
pub struct Trajectory {
    pub nodes: Vec<f64>,
    pub states: Vec<Vec<f64>>,
    pub derivatives: Vec<Vec<f64>>,
    pub termination: Termination,
    pub rejected_steps: usize,
}

impl Trajectory {
    pub fn first_x(&self) -> f64 {
        self.nodes[0]
    }

    pub fn last_x(&self) -> f64 {
        *self.nodes.last().expect("trajectory has at least one node")
    }

    pub fn last_state(&self) -> &[f64] {
        self.states.last().expect("trajectory has at least one node")
    }

    pub fn reached_end(&self) -> bool {
        self.termination == Termination::ReachedEnd
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Index of the stored node equal to `x`, if any.
    pub fn node_index(&self, x: f64) -> Option<usize> {
        let i = self.segment(x)?;
        if self.nodes[i] == x {
            Some(i)
        } else if self.nodes.get(i + 1) == Some(&x) {
            Some(i + 1)
        } else {
            None
        }
    }

    /// Index `i` with `x` between `nodes[i]` and `nodes[i+1]`.
    fn segment(&self, x: f64) -> Option<usize> {
        let (lo, hi) = (self.first_x().min(self.last_x()), self.first_x().max(self.last_x()));
        if !(x >= lo && x <= hi) {
            return None;
        }
        if self.nodes.len() == 1 {
            return Some(0);
        }
        let increasing = self.last_x() > self.first_x();
        let pos = if increasing {
            self.nodes.partition_point(|&v| v <= x)
        } else {
            self.nodes.partition_point(|&v| v >= x)
        };
        Some(pos.saturating_sub(1).min(self.nodes.len() - 2))
    }
}

/// State at `x` by piecewise-cubic Hermite interpolation through the stored
/// nodes and derivatives. Derivatives are limited where a component is
/// monotone on a segment so that the interpolant stays monotone there.
pub fn sample(trajectory: &Trajectory, x: f64) -> Result<Vec<f64>> {
    let out_of_range = || Error::OutOfRange {
        x,
        lo: trajectory.first_x().min(trajectory.last_x()),
        hi: trajectory.first_x().max(trajectory.last_x()),
    };
    let i = trajectory.segment(x).ok_or_else(out_of_range)?;
    if trajectory.nodes[i] == x || trajectory.nodes.len() == 1 {
        return Ok(trajectory.states[i].clone());
    }
    let (x0, x1) = (trajectory.nodes[i], trajectory.nodes[i + 1]);
    if x == x1 {
        return Ok(trajectory.states[i + 1].clone());
    }
    let h = x1 - x0;
    let theta = (x - x0) / h;
    let (h00, h10, h01, h11) = hermite_basis(theta);
    let (y0, y1) = (&trajectory.states[i], &trajectory.states[i + 1]);
    let (f0, f1) = (&trajectory.derivatives[i], &trajectory.derivatives[i + 1]);
    Ok((0..y0.len())
        .map(|j| {
            let delta = (y1[j] - y0[j]) / h;
            let (m0, m1) = limit_slopes(delta, f0[j], f1[j]);
            h00 * y0[j] + h10 * h * m0 + h01 * y1[j] + h11 * h * m1
        })
        .collect())
}

#[inline]
fn hermite_basis(t: f64) -> (f64, f64, f64, f64) {
    let t2 = t * t;
    let t3 = t2 * t;
    (2.0 * t3 - 3.0 * t2 + 1.0, t3 - 2.0 * t2 + t, -2.0 * t3 + 3.0 * t2, t3 - t2)
}

/// Fritsch–Carlson limiter: only active when both end slopes agree in sign with the secant.
fn limit_slopes(delta: f64, m0: f64, m1: f64) -> (f64, f64) {
    if delta == 0.0 || m0 * delta < 0.0 || m1 * delta < 0.0 {
        return (m0, m1);
    }
    let a = m0 / delta;
    let b = m1 / delta;
    let r2 = a * a + b * b;
    if r2 > 9.0 {
        let tau = 3.0 / r2.sqrt();
        (tau * m0, tau * m1)
    } else {
        (m0, m1)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Options {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_steps: usize,
    /// Minimum step as a fraction of the total span.
    pub min_step_factor: f64,
    /// Initial step; chosen automatically when `None`.
    pub initial_step: Option<f64>,
}

impl Default for Options {
    fn default() -> Self {
        Self { rel_tol: 1e-10, abs_tol: 1e-12, max_steps: 1_000_000, min_step_factor: 1e-14, initial_step: None }
    }
}

impl Options {
    pub fn with_tolerances(rel_tol: f64, abs_tol: f64) -> Self {
        Self { rel_tol, abs_tol, ..Self::default() }
    }
}

/// Integrates from `(x0, state0)` to `x1` with default step limits.
pub fn integrate<S: OdeSystem + ?Sized>(
    system: &S,
    x0: f64,
    state0: &[f64],
    x1: f64,
    rel_tol: f64,
    abs_tol: f64,
) -> Result<Trajectory> {
    integrate_through(system, x0, state0, &[x1], &Options::with_tolerances(rel_tol, abs_tol))
}

// Dormand–Prince 5(4) tableau.
const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;
const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const A71: f64 = 35.0 / 384.0;
const A73: f64 = 500.0 / 1113.0;
const A74: f64 = 125.0 / 192.0;
const A75: f64 = -2187.0 / 6784.0;
const A76: f64 = 11.0 / 84.0;
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

struct Stepper<'a, S: OdeSystem + ?Sized> {
    system: &'a S,
    k: [Vec<f64>; 7],
    tmp: Vec<f64>,
    y_new: Vec<f64>,
    err: Vec<f64>,
}

impl<'a, S: OdeSystem + ?Sized> Stepper<'a, S> {
    fn new(system: &'a S) -> Self {
        let d = system.dim();
        Self {
            system,
            k: std::array::from_fn(|_| vec![0.0; d]),
            tmp: vec![0.0; d],
            y_new: vec![0.0; d],
            err: vec![0.0; d],
        }
    }

    fn stage(&mut self, x: f64, y: &[f64], h: f64, coeffs: &[(usize, f64)], out: usize) -> bool {
        for j in 0..y.len() {
            let mut acc = 0.0;
            for &(idx, c) in coeffs {
                acc += c * self.k[idx][j];
            }
            self.tmp[j] = y[j] + h * acc;
        }
        let mut dy = std::mem::take(&mut self.k[out]);
        self.system.rhs(x, &self.tmp, &mut dy);
        let finite = dy.iter().all(|v| v.is_finite());
        self.k[out] = dy;
        finite
    }

    /// One trial step from `(x, y)` with `k[0] = f(x, y)`; fills `y_new`,
    /// `k[6] = f(x+h, y_new)` and `err`. Returns false on non-finite stages.
    fn step(&mut self, x: f64, y: &[f64], h: f64) -> bool {
        let ok = self.stage(x + C2 * h, y, h, &[(0, A21)], 1)
            && self.stage(x + C3 * h, y, h, &[(0, A31), (1, A32)], 2)
            && self.stage(x + C4 * h, y, h, &[(0, A41), (1, A42), (2, A43)], 3)
            && self.stage(x + C5 * h, y, h, &[(0, A51), (1, A52), (2, A53), (3, A54)], 4)
            && self.stage(x + h, y, h, &[(0, A61), (1, A62), (2, A63), (3, A64), (4, A65)], 5);
        if !ok {
            return false;
        }
        for j in 0..y.len() {
            self.y_new[j] = y[j]
                + h * (A71 * self.k[0][j]
                    + A73 * self.k[2][j]
                    + A74 * self.k[3][j]
                    + A75 * self.k[4][j]
                    + A76 * self.k[5][j]);
        }
        if !self.y_new.iter().all(|v| v.is_finite()) {
            return false;
        }
        let mut k7 = std::mem::take(&mut self.k[6]);
        self.system.rhs(x + h, &self.y_new, &mut k7);
        let finite = k7.iter().all(|v| v.is_finite());
        self.k[6] = k7;
        if !finite {
            return false;
        }
        for j in 0..y.len() {
            self.err[j] = h
                * (E1 * self.k[0][j]
                    + E3 * self.k[2][j]
                    + E4 * self.k[3][j]
                    + E5 * self.k[4][j]
                    + E6 * self.k[5][j]
                    + E7 * self.k[6][j]);
        }
        true
    }

    fn error_norm(&self, y: &[f64], opts: &Options) -> f64 {
        let mut acc: f64 = 0.0;
        for j in 0..y.len() {
            let scale = opts.abs_tol + opts.rel_tol * y[j].abs().max(self.y_new[j].abs());
            acc = acc.max((self.err[j] / scale).abs());
        }
        acc
    }
}

fn weighted_norm(v: &[f64], y: &[f64], opts: &Options) -> f64 {
    v.iter()
        .zip(y)
        .map(|(vi, yi)| (vi / (opts.abs_tol + opts.rel_tol * yi.abs())).abs())
        .fold(0.0, f64::max)
}

/// Hairer–Wanner starting step heuristic.
fn initial_step<S: OdeSystem + ?Sized>(system: &S, x: f64, y: &[f64], f0: &[f64], dir: f64, span: f64, opts: &Options) -> f64 {
    let d0 = weighted_norm(y, y, opts);
    let d1 = weighted_norm(f0, y, opts);
    let mut h0 = if d0 < 1e-5 || d1 < 1e-5 { 1e-6 } else { 0.01 * d0 / d1 };
    h0 = h0.min(span);
    let y1: Vec<f64> = y.iter().zip(f0).map(|(yi, fi)| yi + dir * h0 * fi).collect();
    let mut f1 = vec![0.0; y.len()];
    system.rhs(x + dir * h0, &y1, &mut f1);
    let diff: Vec<f64> = f1.iter().zip(f0).map(|(a, b)| a - b).collect();
    let d2 = weighted_norm(&diff, y, opts) / h0;
    let h1 = if !d2.is_finite() {
        h0 * 1e-3
    } else if d1.max(d2) <= 1e-15 {
        (h0 * 1e-3).max(1e-6)
    } else {
        (0.01 / d1.max(d2)).powf(0.2)
    };
    (100.0 * h0).min(h1).min(span).max(span * 1e-12)
}

/// Integrates from `(x0, state0)` through the strictly monotone sequence of
/// `stops`, landing exactly on every stop. The last stop is the end point.
pub fn integrate_through<S: OdeSystem + ?Sized>(
    system: &S,
    x0: f64,
    state0: &[f64],
    stops: &[f64],
    opts: &Options,
) -> Result<Trajectory> {
    let dim = system.dim();
    if state0.len() != dim {
        return Err(Error::InvalidArgument(format!("state has {} components, system has {dim}", state0.len())));
    }
    if !(opts.rel_tol > 0.0 && opts.abs_tol > 0.0) {
        return Err(Error::InvalidArgument("tolerances must be positive".into()));
    }
    let x1 = *stops.last().ok_or_else(|| Error::InvalidArgument("no end point".into()))?;
    if x1 == x0 || !x1.is_finite() || !x0.is_finite() {
        return Err(Error::InvalidArgument(format!("need finite x1 != x0, got x0={x0}, x1={x1}")));
    }
    let dir = (x1 - x0).signum();
    let mut prev = x0;
    for &s in stops {
        if (s - prev) * dir <= 0.0 {
            return Err(Error::InvalidArgument("stops must be strictly monotone away from x0".into()));
        }
        prev = s;
    }
    if !system.in_domain(x0, state0) || !state0.iter().all(|v| v.is_finite()) {
        return Err(Error::InvalidStart(x0));
    }

    let span = (x1 - x0).abs();
    let min_step = opts.min_step_factor * span;
    let mut stepper = Stepper::new(system);
    system.rhs(x0, state0, &mut stepper.k[0]);
    if !stepper.k[0].iter().all(|v| v.is_finite()) {
        return Err(Error::InvalidStart(x0));
    }

    let mut traj = Trajectory {
        nodes: vec![x0],
        states: vec![state0.to_vec()],
        derivatives: vec![stepper.k[0].clone()],
        termination: Termination::StepLimit,
        rejected_steps: 0,
    };

    let mut x = x0;
    let mut y = state0.to_vec();
    let mut h = opts
        .initial_step
        .map(f64::abs)
        .unwrap_or_else(|| initial_step(system, x0, state0, &stepper.k[0], dir, span, opts));
    let mut fac_old: f64 = 1e-4;
    let mut stop_idx = 0;
    let mut steps = 0;
    const BETA: f64 = 0.04;
    const EXPO1: f64 = 0.2 - BETA * 0.75;
    const SAFE: f64 = 0.9;

    loop {
        if steps >= opts.max_steps {
            traj.termination = Termination::StepLimit;
            return Ok(traj);
        }
        if h < min_step {
            traj.termination = Termination::StepUnderflow;
            return Ok(traj);
        }
        let target = stops[stop_idx];
        let remaining = (target - x).abs();
        let landing = 1.01 * h >= remaining;
        let h_try = if landing { remaining } else { h };
        steps += 1;

        let ok = stepper.step(x, &y, dir * h_try);
        let err = if ok { stepper.error_norm(&y, opts) } else { f64::INFINITY };
        if !err.is_finite() || err > 1.0 {
            traj.rejected_steps += 1;
            h = if err.is_finite() {
                h_try / (err.powf(EXPO1) / SAFE).min(5.0)
            } else {
                h_try * 0.25
            };
            continue;
        }

        let x_new = if landing { target } else { x + dir * h_try };
        if !system.in_domain(x_new, &stepper.y_new) {
            localize_exit(&mut stepper, &mut traj, x, &y, dir * h_try, opts.abs_tol.max(min_step));
            traj.termination = Termination::GuardExit;
            return Ok(traj);
        }

        // PI step-size update.
        let fac11 = err.powf(EXPO1);
        let fac = (fac11 / fac_old.powf(BETA) / SAFE).clamp(0.1, 5.0);
        fac_old = err.max(1e-4);
        let h_next = h_try / fac;

        x = x_new;
        y.copy_from_slice(&stepper.y_new);
        stepper.k.swap(0, 6);
        traj.nodes.push(x);
        traj.states.push(y.clone());
        traj.derivatives.push(stepper.k[0].clone());

        if landing {
            stop_idx += 1;
            if stop_idx == stops.len() {
                traj.termination = Termination::ReachedEnd;
                return Ok(traj);
            }
            h = h_next.max(h);
        } else {
            h = h_next;
        }
    }
}

/// Bisects the step `(x, y) -> x + h` for the largest admissible fraction and
/// appends that point to the trajectory.
fn localize_exit<S: OdeSystem + ?Sized>(
    stepper: &mut Stepper<'_, S>,
    traj: &mut Trajectory,
    x: f64,
    y: &[f64],
    h: f64,
    resolution: f64,
) {
    let system = stepper.system;
    let k0 = stepper.k[0].clone();
    let (mut lo, mut hi) = (0.0_f64, 1.0_f64);
    let mut best: Option<(Vec<f64>, Vec<f64>)> = None;
    while (hi - lo) * h.abs() > resolution {
        let mid = 0.5 * (lo + hi);
        stepper.k[0].copy_from_slice(&k0);
        let inside = stepper.step(x, y, mid * h) && system.in_domain(x + mid * h, &stepper.y_new);
        if inside {
            lo = mid;
            best = Some((stepper.y_new.clone(), stepper.k[6].clone()));
        } else {
            hi = mid;
        }
    }
    stepper.k[0].copy_from_slice(&k0);
    if let Some((state, deriv)) = best {
        traj.nodes.push(x + lo * h);
        traj.states.push(state);
        traj.derivatives.push(deriv);
    }
}
