use annulus_energy::bvp::{
    classify_case, find_lambda, q_value, shoot, solve_reduced, Case, ShootingOptions, Solver,
};
use annulus_energy::variational::el_residual;
use annulus_energy::Problem;
use proptest::prelude::*;

fn generic() -> impl Strategy<Value = Problem> {
    (2u32..=4, 0.5f64..1.5, 0.3f64..1.5, 0.5f64..2.0, 0.3f64..2.0, 0.2f64..0.8).prop_map(|(n, r, w, rs, ws, alpha)| {
        Problem::new(n, r, r + w, rs, rs + ws, alpha).unwrap()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn solver_hits_both_ends(p in generic()) {
        let s = find_lambda(&p, 1e-9).unwrap();
        prop_assert_eq!(s.profile.h[0], p.r_star());
        prop_assert!((s.profile.end_value() - p.big_r_star()).abs() < 1e-9 * p.big_r_star());
        prop_assert!(s.profile.h.windows(2).all(|w| w[1] > w[0]));
        prop_assert!(el_residual(&s.profile, &p).unwrap() < 1e-5);
    }

    #[test]
    fn case_tag_matches_ratio_trend(p in generic()) {
        let s = find_lambda(&p, 1e-9).unwrap();
        let tag = classify_case(&s.profile, &p, 1e-9).unwrap();
        let first = s.profile.h[0] / s.profile.grid[0];
        let last = s.profile.end_value() / p.big_r();
        match tag.case {
            Case::Expanding => prop_assert!(last > first && tag.c < 0.0),
            Case::Contracting => prop_assert!(last < first && tag.c > 0.0),
            Case::Linear => prop_assert!((last - first).abs() < 1e-6 * first),
        }
    }

    #[test]
    fn shooting_map_is_increasing(p in generic(), l in 0.2f64..3.0) {
        prop_assert!(shoot(l * 1.1, &p).unwrap() > shoot(l, &p).unwrap());
    }

    #[test]
    fn flux_is_increasing_in_anchor(p in generic(), l in 0.2f64..3.0, t in 0.2f64..5.0) {
        prop_assert!(q_value(l * 1.05, t, &p).unwrap() > q_value(l, t, &p).unwrap());
    }
}

#[test]
fn flux_curves_decrease_and_pass_through_anchor() {
    let p = Problem::new(3, 1.0, 2.0, 1.0, 3.0, 0.5).unwrap();
    for lambda in [0.5, 1.0, 2.0] {
        let c = solve_reduced(lambda, 0.05, 20.0, &p).unwrap();
        assert_eq!(c.value(lambda).unwrap(), lambda);
        let pts = c.points();
        assert!(pts.windows(2).all(|w| w[1].0 > w[0].0 && w[1].1 < w[0].1));
    }
}

#[test]
fn proportional_annuli_give_linear_map() {
    let p = Problem::new(4, 1.0, 2.0, 3.0, 6.0, 0.3).unwrap();
    let s = find_lambda(&p, 1e-10).unwrap();
    assert_eq!(s.lambda_star, 3.0);
    assert!(s.profile.grid.iter().zip(&s.profile.h).all(|(x, h)| (h - 3.0 * x).abs() < 1e-12));
    assert_eq!(classify_case(&s.profile, &p, 1e-9).unwrap().case, Case::Linear);
}

#[test]
fn restarts_agree() {
    let p = Problem::new(2, 0.5, 2.0, 1.0, 1.5, 0.7).unwrap();
    let opts = ShootingOptions { tol: 1e-9, ..ShootingOptions::default() };
    let base = Solver::new(opts).solve(&p).unwrap().lambda_star;
    for start in [1e-3, 0.1, 10.0, 1e3] {
        let again = Solver::new(opts).starting_at(start).solve(&p).unwrap().lambda_star;
        assert!((again - base).abs() < 1e-8 * base, "{start}: {again} vs {base}");
    }
}

#[test]
fn nonpositive_tolerance_is_rejected() {
    let p = Problem::new(2, 1.0, 2.0, 1.0, 3.0, 0.5).unwrap();
    assert!(Solver::new(ShootingOptions { tol: 0.0, ..ShootingOptions::default() }).solve(&p).is_err());
}
