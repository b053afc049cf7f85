use annulus_energy::cli::checks::derivative_errors;
use annulus_energy::model::{annulus_volume, sphere_measure, weights};
use annulus_energy::{EvalPoint, Integrand, Problem, ReducedPoint};
use proptest::prelude::*;

fn integrand() -> impl Strategy<Value = Integrand> {
    (2u32..=6, 0.05f64..0.95).prop_map(|(n, alpha)| Problem::new(n, 1.0, 2.0, 1.0, 3.0, alpha).unwrap().integrand())
}

fn point() -> impl Strategy<Value = EvalPoint> {
    (0.2f64..5.0, 0.2f64..5.0, -2.0f64..2.0).prop_map(|(s, h, lk)| EvalPoint { s, h, k: 10f64.powf(lk) })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(512))]

    #[test]
    fn g_is_negative(f in integrand(), lt in -3.0f64..3.0, ly in -3.0f64..3.0) {
        let g = f.g_rhs(&ReducedPoint { t: 10f64.powf(lt), y: 10f64.powf(ly) });
        prop_assert!(g < 0.0 && g.is_finite());
    }

    #[test]
    fn g_matches_literal_form(f in integrand(), lt in -1.5f64..1.5, ly in -1.5f64..1.5) {
        let q = ReducedPoint { t: 10f64.powf(lt), y: 10f64.powf(ly) };
        let w = f.uvw(&q);
        let literal = -(w.u + w.v) / w.w;
        prop_assert!((f.g_rhs(&q) - literal).abs() <= 1e-12 * literal.abs());
    }

    #[test]
    fn lagrangian_is_convex_in_slope(f in integrand(), p in point()) {
        prop_assert!(f.lagrangian_d2kk(&p) > 0.0);
    }

    #[test]
    fn partials_match_differences(f in integrand(), p in point()) {
        let e = derivative_errors(&f, &p);
        prop_assert!(e.iter().all(|&x| x < 1e-6), "{e:?}");
    }

    #[test]
    fn m_is_minus_g_over_s_squared(f in integrand(), p in point()) {
        let m = f.m_coeff(&p);
        let g = f.g_rhs(&ReducedPoint { t: p.h / p.s, y: p.k });
        prop_assert!(m > 0.0);
        prop_assert!((m + g / (p.s * p.s)).abs() <= 1e-12 * m);
    }

    #[test]
    fn acceleration_factors_through_defect(f in integrand(), p in point()) {
        let acc = f.el_acceleration(&p);
        let reduced = (p.h - p.s * p.k) * f.m_coeff(&p);
        prop_assert!((acc - reduced).abs() <= 1e-8 * acc.abs().max(reduced.abs()).max(1e-12 * p.k / p.s));
    }

    #[test]
    fn distortion_is_dual_energy(f in integrand(), p in point()) {
        let swapped = Integrand { n: f.n, a: f.b, b: f.a };
        let d = f.distortion_term(&p);
        let e = p.k * swapped.energy_term(&EvalPoint { s: p.h, h: p.s, k: 1.0 / p.k });
        prop_assert!((d - e).abs() <= 1e-13 * d);
    }

    #[test]
    fn linear_maps_are_stationary(f in integrand(), c in 0.1f64..10.0, s in 0.5f64..4.0) {
        let acc = f.el_acceleration(&EvalPoint { s, h: c * s, k: c });
        prop_assert!(acc.abs() < 1e-9 * c / s, "{}", acc);
    }

    #[test]
    fn weights_normalize_by_volume(n in 2u32..=6, alpha in 0.0f64..=1.0, r in 0.1f64..2.0, w in 0.1f64..3.0) {
        let (a, b) = weights(alpha, n, r, r + w, 2.0 * r, 2.0 * r + 3.0 * w).unwrap();
        let dom = annulus_volume(n, r, r + w).unwrap();
        let tgt = annulus_volume(n, 2.0 * r, 2.0 * r + 3.0 * w).unwrap();
        prop_assert!((a * tgt - alpha).abs() < 1e-12 && (b * dom - (1.0 - alpha)).abs() < 1e-12);
    }
}

#[test]
fn sphere_measure_recursion() {
    for n in 2..=10u32 {
        let ratio = sphere_measure(n + 2).unwrap() / sphere_measure(n).unwrap();
        assert!((ratio - 2.0 * std::f64::consts::PI / n as f64).abs() < 1e-13);
    }
}

#[test]
fn invalid_inputs_are_rejected() {
    assert!(Problem::new(1, 1.0, 2.0, 1.0, 2.0, 0.5).is_err());
    assert!(Problem::new(2, 2.0, 1.0, 1.0, 2.0, 0.5).is_err());
    assert!(Problem::new(2, 1.0, 2.0, 3.0, 2.0, 0.5).is_err());
    assert!(Problem::new(2, 1.0, 2.0, 1.0, 2.0, 1.5).is_err());
    assert!(EvalPoint::new(1.0, 1.0, 0.0).is_err());
    assert!(ReducedPoint::new(-1.0, 1.0).is_err());
}
