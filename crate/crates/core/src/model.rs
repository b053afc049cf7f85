//! Closed-form quantities for radial stretchings `h(x) = H(|x|) x/|x|`.
//!
//! Everything here is a pure function of its arguments. The radial
//! Lagrangian
//!
//! ```text
//! L(s, H, K) = a s^(n-1) [(n-1)H²/s² + K²]^(n/2) + b H^(n-1) [(n-1)s²/H² + 1/K²]^(n/2) K
//! ```
//!
//! is the single source of truth; its partial derivatives are obtained by
//! direct differentiation and the Euler–Lagrange equation is written as
//! `H'' = (H - sK) M(s)` with `M > 0`. The reduced right-hand side
//! `G(t, y) = -(U + V)/W` satisfies `G(H/s, K) = -s² M`.
//!
//! `scripts/derive_el.py` re-derives these identities symbolically.

use std::f64::consts::PI;

use crate::error::{Error, Result};

/// `x^(k/2)` for `x > 0`, exact for integer and half-integer exponents.
#[inline]
pub(crate) fn half_pow(x: f64, k: i32) -> f64 {
    if k % 2 == 0 {
        x.powi(k / 2)
    } else {
        x.powi((k - 1).div_euclid(2)) * x.sqrt()
    }
}

/// Surface measure `ω_{n-1} = 2 π^{n/2} / Γ(n/2)` of the unit sphere in `R^n`.
pub fn sphere_measure(n: u32) -> Result<f64> {
    if n < 2 {
        return Err(Error::InvalidDimension(n as i64));
    }
    // Γ(n/2) by the recursion Γ(x+1) = xΓ(x) from Γ(1) = 1 or Γ(1/2) = √π.
    let (mut gamma, mut x) = if n % 2 == 0 { (1.0, 1.0) } else { (PI.sqrt(), 0.5) };
    let target = n as f64 / 2.0;
    while x < target {
        gamma *= x;
        x += 1.0;
    }
    Ok(2.0 * half_pow(PI, n as i32) / gamma)
}

/// Lebesgue volume of the spherical shell `r_in < |x| < r_out` in `R^n`.
pub fn annulus_volume(n: u32, r_in: f64, r_out: f64) -> Result<f64> {
    if !(r_in > 0.0 && r_out > r_in && r_out.is_finite()) {
        return Err(Error::InvalidGeometry(format!(
            "need 0 < r_in < r_out, got r_in={r_in}, r_out={r_out}"
        )));
    }
    let omega = sphere_measure(n)?;
    Ok(omega * (r_out.powi(n as i32) - r_in.powi(n as i32)) / n as f64)
}

/// Normalized weights `a = α/|A*|` and `b = (1-α)/|A|`.
pub fn weights(alpha: f64, n: u32, r: f64, big_r: f64, r_star: f64, big_r_star: f64) -> Result<(f64, f64)> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::InvalidWeight(alpha));
    }
    let target = annulus_volume(n, r_star, big_r_star)?;
    let domain = annulus_volume(n, r, big_r)?;
    Ok((alpha / target, (1.0 - alpha) / domain))
}

/// A full problem instance: dimension, both annuli and the energy weight.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Problem {
    n: u32,
    r: f64,
    big_r: f64,
    r_star: f64,
    big_r_star: f64,
    alpha: f64,
    a: f64,
    b: f64,
    omega: f64,
}

impl Problem {
    pub fn new(n: u32, r: f64, big_r: f64, r_star: f64, big_r_star: f64, alpha: f64) -> Result<Self> {
        let omega = sphere_measure(n)?;
        if !(r > 0.0 && big_r > r && big_r.is_finite()) {
            return Err(Error::InvalidGeometry(format!("need 0 < r < R, got r={r}, R={big_r}")));
        }
        if !(r_star > 0.0 && big_r_star > r_star && big_r_star.is_finite()) {
            return Err(Error::InvalidGeometry(format!(
                "need 0 < r* < R*, got r*={r_star}, R*={big_r_star}"
            )));
        }
        let (a, b) = weights(alpha, n, r, big_r, r_star, big_r_star)?;
        Ok(Self { n, r, big_r, r_star, big_r_star, alpha, a, b, omega })
    }

    pub fn n(&self) -> u32 {
        self.n
    }
    pub fn r(&self) -> f64 {
        self.r
    }
    pub fn big_r(&self) -> f64 {
        self.big_r
    }
    pub fn r_star(&self) -> f64 {
        self.r_star
    }
    pub fn big_r_star(&self) -> f64 {
        self.big_r_star
    }
    pub fn alpha(&self) -> f64 {
        self.alpha
    }
    pub fn beta(&self) -> f64 {
        1.0 - self.alpha
    }
    pub fn a(&self) -> f64 {
        self.a
    }
    pub fn b(&self) -> f64 {
        self.b
    }
    /// `ω_{n-1}`.
    pub fn omega(&self) -> f64 {
        self.omega
    }

    /// Energy integrand carrying this problem's `n`, `a`, `b`.
    pub fn integrand(&self) -> Integrand {
        Integrand { n: self.n, a: self.a, b: self.b }
    }

    /// True when `R/r = R*/r*` to relative precision `rel`, i.e. the minimizer is linear.
    pub fn is_proportional(&self, rel: f64) -> bool {
        let lhs = self.big_r / self.r;
        let rhs = self.big_r_star / self.r_star;
        (lhs - rhs).abs() <= rel * rhs
    }

    /// The same geometry with a different weight.
    pub fn with_alpha(&self, alpha: f64) -> Result<Self> {
        Self::new(self.n, self.r, self.big_r, self.r_star, self.big_r_star, alpha)
    }
}

/// `(s, H, K = H')` at one radius.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EvalPoint {
    pub s: f64,
    pub h: f64,
    pub k: f64,
}

impl EvalPoint {
    pub fn new(s: f64, h: f64, k: f64) -> Result<Self> {
        let ok = |v: f64| v > 0.0 && v.is_finite();
        if ok(s) && ok(h) && ok(k) {
            Ok(Self { s, h, k })
        } else {
            Err(Error::Domain(format!("need s, H, K > 0, got s={s}, H={h}, K={k}")))
        }
    }
}

/// `(t, y)` in the reduced phase plane, `t = H/s`, `y = F(t)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReducedPoint {
    pub t: f64,
    pub y: f64,
}

impl ReducedPoint {
    pub fn new(t: f64, y: f64) -> Result<Self> {
        if t > 0.0 && y > 0.0 && t.is_finite() && y.is_finite() {
            Ok(Self { t, y })
        } else {
            Err(Error::Domain(format!("need t, y > 0, got t={t}, y={y}")))
        }
    }
}

/// `‖Dh‖² = (n-1)H²/s² + K²`.
pub fn grad_norm_sq(p: &EvalPoint, n: u32) -> f64 {
    let ratio = p.h / p.s;
    (n - 1) as f64 * ratio * ratio + p.k * p.k
}

/// `J_h = K (H/s)^(n-1)`.
pub fn jacobian(p: &EvalPoint, n: u32) -> f64 {
    p.k * (p.h / p.s).powi(n as i32 - 1)
}

/// `‖Dh⁻¹(h(x))‖² = 1/K² + (n-1)s²/H²`.
pub fn inv_norm_sq(p: &EvalPoint, n: u32) -> f64 {
    let ratio = p.s / p.h;
    1.0 / (p.k * p.k) + (n - 1) as f64 * ratio * ratio
}

/// The Euler–Lagrange coefficients `U, V, W` of the reduced flow.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Uvw {
    pub u: f64,
    pub v: f64,
    pub w: f64,
}

/// Radial energy density `L(s, H, K)` with fixed `n, a, b`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Integrand {
    pub n: u32,
    pub a: f64,
    pub b: f64,
}

impl Integrand {
    pub fn new(n: u32, a: f64, b: f64) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidDimension(n as i64));
        }
        if !(a > 0.0 && b > 0.0) {
            return Err(Error::InvalidArgument(format!("need a, b > 0, got a={a}, b={b}")));
        }
        Ok(Self { n, a, b })
    }

    #[inline]
    fn nf(&self) -> f64 {
        self.n as f64
    }

    /// `[(n-1)H²/s² + K²]` and `[(n-1)s²/H² + 1/K²]`.
    #[inline]
    fn brackets(&self, p: &EvalPoint) -> (f64, f64) {
        let m = self.nf() - 1.0;
        let hs = p.h / p.s;
        let sh = p.s / p.h;
        (m * hs * hs + p.k * p.k, m * sh * sh + 1.0 / (p.k * p.k))
    }

    /// Energy part `a s^(n-1) ‖Dh‖^n`.
    pub fn energy_term(&self, p: &EvalPoint) -> f64 {
        let (pb, _) = self.brackets(p);
        self.a * p.s.powi(self.n as i32 - 1) * half_pow(pb, self.n as i32)
    }

    /// Distortion part `b ‖Dh⁻¹‖^n J_h s^(n-1) = b H^(n-1) [..]^(n/2) K`.
    pub fn distortion_term(&self, p: &EvalPoint) -> f64 {
        let (_, qb) = self.brackets(p);
        self.b * p.h.powi(self.n as i32 - 1) * half_pow(qb, self.n as i32) * p.k
    }

    pub fn lagrangian(&self, p: &EvalPoint) -> f64 {
        self.energy_term(p) + self.distortion_term(p)
    }

    /// `∂L/∂K`.
    pub fn lagrangian_dk(&self, p: &EvalPoint) -> f64 {
        let n = self.n as i32;
        let nf = self.nf();
        let (pb, qb) = self.brackets(p);
        let k2 = p.k * p.k;
        self.a * nf * p.s.powi(n - 1) * p.k * half_pow(pb, n - 2)
            + self.b * p.h.powi(n - 1) * (half_pow(qb, n) - nf * half_pow(qb, n - 2) / k2)
    }

    /// `∂L/∂H`.
    pub fn lagrangian_dh(&self, p: &EvalPoint) -> f64 {
        let n = self.n as i32;
        let nf = self.nf();
        let (pb, qb) = self.brackets(p);
        let sh = p.s / p.h;
        self.a * nf * (nf - 1.0) * p.s.powi(n - 3) * p.h * half_pow(pb, n - 2)
            + self.b * (nf - 1.0) * p.k * p.h.powi(n - 2) * half_pow(qb, n - 2) * (qb - nf * sh * sh)
    }

    /// `∂²L/∂K²`, positive for all admissible points.
    pub fn lagrangian_d2kk(&self, p: &EvalPoint) -> f64 {
        let n = self.n as i32;
        let nf = self.nf();
        let (pb, qb) = self.brackets(p);
        let k2 = p.k * p.k;
        self.a * nf * p.s.powi(n - 1) * half_pow(pb, n - 4) * (pb + (nf - 2.0) * k2)
            + self.b * nf * p.h.powi(n - 1) * half_pow(qb, n - 4) / (k2 * p.k) * (qb + (nf - 2.0) / k2)
    }

    /// Mixed partials `(∂²L/∂K∂s, ∂²L/∂K∂H)`.
    pub fn lagrangian_dk_mixed(&self, p: &EvalPoint) -> (f64, f64) {
        let n = self.n as i32;
        let nf = self.nf();
        let m = (nf - 2.0) / 2.0;
        let (pb, qb) = self.brackets(p);
        let (s, h, k) = (p.s, p.h, p.k);
        let k2 = k * k;

        let dp_ds = -2.0 * (nf - 1.0) * h * h / (s * s * s);
        let dp_dh = 2.0 * (nf - 1.0) * h / (s * s);
        let dq_ds = 2.0 * (nf - 1.0) * s / (h * h);
        let dq_dh = -2.0 * (nf - 1.0) * s * s / (h * h * h);

        let p_m = half_pow(pb, n - 2);
        let p_m1 = half_pow(pb, n - 4);
        let q_m = half_pow(qb, n - 2);
        let q_m1 = half_pow(qb, n - 4);
        let q_half_n = half_pow(qb, n);

        let energy_s = self.a * nf * k * ((nf - 1.0) * s.powi(n - 2) * p_m + s.powi(n - 1) * m * p_m1 * dp_ds);
        let energy_h = self.a * nf * k * s.powi(n - 1) * m * p_m1 * dp_dh;

        let inner = nf / 2.0 * q_m - nf * m * q_m1 / k2;
        let distortion_s = self.b * h.powi(n - 1) * inner * dq_ds;
        let distortion_h = self.b * (nf - 1.0) * h.powi(n - 2) * (q_half_n - nf * q_m / k2)
            + self.b * h.powi(n - 1) * inner * dq_dh;

        (energy_s + distortion_s, energy_h + distortion_h)
    }

    /// `H''` from the Euler–Lagrange equation `L_H = d/ds L_K` expanded by the chain rule.
    pub fn el_acceleration(&self, p: &EvalPoint) -> f64 {
        let (l_ks, l_kh) = self.lagrangian_dk_mixed(p);
        (self.lagrangian_dh(p) - l_ks - l_kh * p.k) / self.lagrangian_d2kk(p)
    }

    /// `U, V, W` of the reduced flow, evaluated term by term.
    pub fn uvw(&self, q: &ReducedPoint) -> Uvw {
        let n = self.n as i32;
        let nf = self.nf();
        let (t, y) = (q.t, q.y);
        let p1 = (nf - 1.0) * t * t + y * y;
        let p2 = (nf - 1.0) * y * y + t * t;
        let e1 = half_pow(p1, n - 4);
        let e2 = half_pow(p2, n - 4);
        let u = self.a * e1 * ((nf - 1.0) * t * t + (nf - 2.0) * t * y + y * y);
        let v = self.b * e2 * (t * t + (nf - 2.0) * t * y + (nf - 1.0) * y * y) / (t * y.powi(n - 1));
        let w = (t * t + y * y) * (self.a * e1 + self.b * t * e2 / y.powi(n + 1));
        Uvw { u, v, w }
    }

    /// `G(t, y) = -(U + V)/W < 0`.
    ///
    /// Evaluated with numerator and denominator divided by `a [(n-1)t² + y²]^((n-4)/2)`
    /// so that extreme `t` or `y` do not overflow the intermediate powers.
    pub fn g_rhs(&self, q: &ReducedPoint) -> f64 {
        let n = self.n as i32;
        let nf = self.nf();
        let (t, y) = (q.t, q.y);
        let p1 = (nf - 1.0) * t * t + y * y;
        let p2 = (nf - 1.0) * y * y + t * t;
        let ratio = (self.b / self.a) * half_pow(p2 / p1, n - 4);
        let yn1 = y.powi(n - 1);
        let u = (nf - 1.0) * t * t + (nf - 2.0) * t * y + y * y;
        let v = ratio * (t * t + (nf - 2.0) * t * y + (nf - 1.0) * y * y) / (t * yn1);
        let w = (t * t + y * y) * (1.0 + ratio * t / (yn1 * y * y));
        -(u + v) / w
    }

    /// Checked variant of [`Integrand::g_rhs`].
    pub fn g_rhs_at(&self, t: f64, y: f64) -> Result<f64> {
        Ok(self.g_rhs(&ReducedPoint::new(t, y)?))
    }

    /// `M(s) > 0` in `H'' = (H - sK) M(s)`, in the factored `(I + II)/III` form.
    pub fn m_coeff(&self, p: &EvalPoint) -> f64 {
        let (i, ii, iii) = self.m_terms(p, -1);
        (i + ii) / iii
    }

    /// The `(I + II)/III` form with the `H^(n-1)` factor in `II` as it is often
    /// printed. It disagrees with [`Integrand::m_coeff`] except on special
    /// points; kept only for cross-check reports.
    pub fn m_coeff_as_printed(&self, p: &EvalPoint) -> f64 {
        let (i, ii, iii) = self.m_terms(p, self.n as i32 - 1);
        (i + ii) / iii
    }

    fn m_terms(&self, p: &EvalPoint, h_power: i32) -> (f64, f64, f64) {
        let n = self.n as i32;
        let nf = self.nf();
        let (s, h, k) = (p.s, p.h, p.k);
        let e1 = half_pow((nf - 1.0) * h * h + s * s * k * k, n - 4);
        let e2 = half_pow((nf - 1.0) * k * k * s * s + h * h, n - 4);
        let i = self.a / s * e1 * ((nf - 1.0) * h * h + (nf - 2.0) * s * h * k + s * s * k * k);
        let ii = self.b
            * h.powi(h_power)
            * e2
            * k.powi(1 - n)
            * (h * h + (nf - 2.0) * s * h * k + (nf - 1.0) * s * s * k * k);
        let iii = (h * h + s * s * k * k) * (self.a * s * e1 + self.b * h * e2 / k.powi(n + 1));
        (i, ii, iii)
    }
}

/// Coefficient of the planar equilibrium equation written as
/// `H'' = (H - sK) K² (αHK + βs) / ((αsK³ + β·den) s H)`, where `den` is
/// either `s` (the commonly printed form) or `H` (the form consistent with
/// the Lagrangian). Used only by the `n = 2` cross-check.
pub fn planar_coefficient(alpha: f64, beta: f64, p: &EvalPoint, den_uses_h: bool) -> f64 {
    let (s, h, k) = (p.s, p.h, p.k);
    let den = if den_uses_h { h } else { s };
    k * k * (alpha * h * k + beta * s) / ((alpha * s * k * k * k + beta * den) * s * h)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64, rel: f64) -> bool {
        (a - b).abs() <= rel * b.abs().max(1e-300)
    }

    #[test]
    fn sphere_measure_values() {
        assert!(close(sphere_measure(2).unwrap(), 2.0 * PI, 1e-15));
        assert!(close(sphere_measure(3).unwrap(), 4.0 * PI, 1e-15));
        assert!(close(sphere_measure(4).unwrap(), 2.0 * PI * PI, 1e-15));
        assert!(close(sphere_measure(5).unwrap(), 8.0 * PI * PI / 3.0, 1e-15));
        assert_eq!(sphere_measure(1), Err(Error::InvalidDimension(1)));
    }

    #[test]
    fn annulus_volume_values() {
        let eps = 1e-6;
        assert!(close(annulus_volume(2, eps, 1.0).unwrap(), PI * (1.0 - eps * eps), 1e-15));
        assert!(close(annulus_volume(3, 1.0, 2.0).unwrap(), 4.0 * PI / 3.0 * 7.0, 1e-15));
        assert!(close(annulus_volume(4, 1.0, 3.0).unwrap(), PI * PI / 2.0 * 80.0, 1e-15));
        assert!(matches!(annulus_volume(3, 2.0, 1.0), Err(Error::InvalidGeometry(_))));
        assert!(matches!(annulus_volume(3, 0.0, 1.0), Err(Error::InvalidGeometry(_))));
    }

    #[test]
    fn weights_values() {
        let (a, b) = weights(0.5, 2, 1.0, 2.0, 1.0, 2.0).unwrap();
        assert!(close(a, 1.0 / (6.0 * PI), 1e-15));
        assert!(close(b, 1.0 / (6.0 * PI), 1e-15));
        let (a, b) = weights(0.5, 3, 1.0, 2.0, 1.0, 2.0).unwrap();
        let expected = 0.5 / (4.0 * PI / 3.0 * 7.0);
        assert!(close(a, expected, 1e-15) && close(b, expected, 1e-15));
        assert_eq!(weights(0.0, 2, 1.0, 2.0, 1.0, 2.0), Err(Error::InvalidWeight(0.0)));
        assert_eq!(weights(1.0, 2, 1.0, 2.0, 1.0, 2.0), Err(Error::InvalidWeight(1.0)));
    }

    #[test]
    fn problem_rejects_bad_input() {
        assert!(matches!(Problem::new(1, 1.0, 2.0, 1.0, 2.0, 0.5), Err(Error::InvalidDimension(1))));
        assert!(matches!(Problem::new(3, 2.0, 1.0, 1.0, 2.0, 0.5), Err(Error::InvalidGeometry(_))));
        assert!(matches!(Problem::new(3, 1.0, 2.0, 3.0, 2.0, 0.5), Err(Error::InvalidGeometry(_))));
        assert!(matches!(Problem::new(3, 1.0, 2.0, 1.0, 2.0, 1.5), Err(Error::InvalidWeight(_))));
        let p = Problem::new(3, 1.0, 2.0, 1.0, 3.0, 0.3).unwrap();
        assert!(close(p.alpha() + p.beta(), 1.0, 1e-15));
        assert!(p.a() > 0.0 && p.b() > 0.0 && p.omega() > 0.0);
    }

    #[test]
    fn norms_and_jacobian() {
        let pt = |s, h, k| EvalPoint::new(s, h, k).unwrap();
        assert_eq!(grad_norm_sq(&pt(1.0, 1.0, 1.0), 2), 2.0);
        assert_eq!(grad_norm_sq(&pt(2.0, 2.0, 1.0), 3), 3.0);
        assert_eq!(grad_norm_sq(&pt(1.0, 2.0, 3.0), 4), 21.0);
        assert_eq!(jacobian(&pt(1.7, 1.7, 1.0), 4), 1.0);
        assert_eq!(jacobian(&pt(1.0, 2.0, 1.0), 3), 4.0);
        assert_eq!(jacobian(&pt(2.0, 1.0, 3.0), 2), 1.5);
        assert_eq!(inv_norm_sq(&pt(0.8, 0.8, 1.0), 5), 5.0);
        assert_eq!(inv_norm_sq(&pt(1.0, 2.0, 2.0), 3), 0.75);
        assert_eq!(inv_norm_sq(&pt(1.0, 1.0, 2.0), 2), 1.25);
        assert!(EvalPoint::new(0.0, 1.0, 1.0).is_err());
        assert!(EvalPoint::new(1.0, 1.0, -1.0).is_err());
    }

    #[test]
    fn lagrangian_values() {
        let unit = Integrand::new(2, 1.0, 1.0).unwrap();
        assert!(close(unit.lagrangian(&EvalPoint::new(1.0, 1.0, 1.0).unwrap()), 4.0, 1e-15));
        let three = Integrand::new(3, 1.0, 1.0).unwrap();
        for s in [0.5, 1.0, 2.5] {
            let expected = 2.0 * s * s * 3f64.powf(1.5);
            assert!(close(three.lagrangian(&EvalPoint::new(s, s, 1.0).unwrap()), expected, 1e-14));
        }
    }

    #[test]
    fn second_derivative_golden() {
        // Hand differentiation: L = aH²/s + asK² + bs²K/H + bH/K, so L_KK = 2as + 2bH/K³.
        let unit = Integrand::new(2, 1.0, 1.0).unwrap();
        let p = EvalPoint::new(1.0, 1.0, 1.0).unwrap();
        assert!(close(unit.lagrangian_d2kk(&p), 4.0, 1e-15));
        assert!(close(unit.lagrangian_dk(&p), 2.0, 1e-15));
        assert!(close(unit.lagrangian_dh(&p), 2.0, 1e-15));
    }

    #[test]
    fn uvw_golden() {
        let unit = Integrand::new(2, 1.0, 1.0).unwrap();
        let q = ReducedPoint::new(1.0, 1.0).unwrap();
        let Uvw { u, v, w } = unit.uvw(&q);
        assert!(close(u, 1.0, 1e-15) && close(v, 1.0, 1e-15) && close(w, 2.0, 1e-15));
        assert!(close(unit.g_rhs(&q), -1.0, 1e-15));
        for n in 2..=7 {
            let f = Integrand::new(n, 0.7, 0.7).unwrap();
            let nf = n as f64;
            let scale = nf.powf((nf - 4.0) / 2.0);
            let Uvw { u, v, w } = f.uvw(&q);
            assert!(close(u, 0.7 * (2.0 * nf - 2.0) * scale, 1e-14));
            assert!(close(v, 0.7 * (2.0 * nf - 2.0) * scale, 1e-14));
            assert!(close(w, 0.7 * 4.0 * scale, 1e-14));
            assert!(close(f.g_rhs(&q), -(nf - 1.0), 1e-14));
        }
    }

    #[test]
    fn g_rhs_domain_errors() {
        let f = Integrand::new(3, 1.0, 1.0).unwrap();
        assert!(f.g_rhs_at(0.0, 1.0).is_err());
        assert!(f.g_rhs_at(1.0, -2.0).is_err());
        assert!(f.g_rhs_at(1.0, 2.0).unwrap() < 0.0);
    }

    #[test]
    fn large_slope_limit() {
        for n in [2, 3, 5] {
            let f = Integrand::new(n, 0.3, 1.9).unwrap();
            for t in [0.1, 1.0, 10.0] {
                let g = f.g_rhs_at(t, 1e8).unwrap();
                assert!((g + 1.0).abs() < 1e-4, "n={n} t={t} g={g}");
            }
        }
    }

    #[test]
    fn linear_profile_is_stationary() {
        for n in 2..=6 {
            let f = Integrand::new(n, 0.4, 1.3).unwrap();
            for (s, c) in [(1.0, 0.5), (1.7, 3.0)] {
                let acc = f.el_acceleration(&EvalPoint::new(s, c * s, c).unwrap());
                assert!(acc.abs() < 1e-12, "n={n} acc={acc}");
            }
        }
    }

    #[test]
    fn planar_variant_matches_with_normalized_weights() {
        let f = Integrand::new(2, 0.37, 1.21).unwrap();
        let p = EvalPoint::new(1.3, 2.1, 0.7).unwrap();
        let m = f.m_coeff(&p);
        assert!(close(planar_coefficient(f.a, f.b, &p, true), m, 1e-14));
        assert!(!close(planar_coefficient(f.a, f.b, &p, false), m, 1e-3));
    }
}
