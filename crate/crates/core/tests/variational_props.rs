use annulus_energy::bvp::{find_lambda, Profile};
use annulus_energy::variational::{
    discrete_energy, discrete_minimize, dominance, energy, perturb, random_trials, total_energy, Provenance,
};
use annulus_energy::Problem;
use proptest::prelude::*;

fn instance() -> Problem {
    Problem::new(3, 1.0, 2.0, 1.5, 2.5, 0.4).unwrap()
}

#[test]
fn trials_are_seeded_and_admissible() {
    let p = instance();
    let s = find_lambda(&p, 1e-9).unwrap();
    let a = random_trials(&p, &s.profile, 30, 5);
    assert_eq!(a, random_trials(&p, &s.profile, 30, 5));
    assert_ne!(a, random_trials(&p, &s.profile, 30, 6));
    for kind in [Provenance::Random, Provenance::PowerLaw, Provenance::Perturbation] {
        assert!(a.iter().any(|t| t.provenance == kind));
    }
    for t in &a {
        assert_eq!(t.profile.h[0], p.r_star());
        assert_eq!(t.profile.end_value(), p.big_r_star());
        assert!(t.profile.h.windows(2).all(|w| w[1] > w[0]));
        assert!(t.profile.k.iter().all(|&k| k > 0.0));
    }
}

#[test]
fn solution_beats_competitors() {
    let p = instance();
    let s = find_lambda(&p, 1e-9).unwrap();
    let d = dominance(&p, &s.profile, &random_trials(&p, &s.profile, 60, 9)).unwrap();
    assert!(d.holds(0.0, 1e-6, 1e-3 * (p.big_r_star() - p.r_star())), "{}", d.worst_margin());
}

#[test]
fn oracle_refines_monotonically() {
    let p = Problem::new(2, 1.0, 2.0, 1.0, 3.0, 0.6).unwrap();
    let e_sol = energy(&find_lambda(&p, 1e-9).unwrap().profile, &p).unwrap().total();
    let e: Vec<f64> = [32, 64, 128].iter().map(|&n| discrete_minimize(&p, n, 20_000).unwrap().energy).collect();
    assert!(e.windows(2).all(|w| w[1] <= w[0]), "{e:?}");
    assert!(e.iter().all(|&x| x >= e_sol * (1.0 - 1e-9)));
    assert!((e[2] - e_sol) / e_sol < 1e-5);
}

#[test]
fn discrete_energy_of_linear_profile_is_exact() {
    let p = Problem::new(2, 1.0, 2.0, 2.0, 4.0, 0.5).unwrap();
    let lin = Profile::linear(&p, 33);
    let e = discrete_energy(&p, &lin.grid, &lin.h).unwrap();
    assert!((e - energy(&lin, &p).unwrap().total()).abs() < 1e-13 * e);
    assert!(total_energy(&lin, &p).unwrap().el_residual < 1e-9);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn perturbations_cost_energy(mode in 1u32..5, amp in 1e-3f64..3e-2) {
        let p = instance();
        let s = find_lambda(&p, 1e-10).unwrap();
        let span = p.big_r_star() - p.r_star();
        let e0 = energy(&s.profile, &p).unwrap().total();
        let e1 = energy(&perturb(&s.profile, amp * span / mode as f64, mode), &p).unwrap().total();
        prop_assert!(e1 > e0);
    }

    #[test]
    fn energy_scales_with_weights(alpha in 0.05f64..0.95) {
        let p = Problem::new(2, 1.0, 2.0, 1.0, 3.0, alpha).unwrap();
        let lin = Profile::linear(&Problem::new(2, 1.0, 2.0, 1.0, 2.0, alpha).unwrap(), 64);
        let mut prof = lin.clone();
        prof.h = lin.grid.iter().map(|s| 2.0 * s - 1.0).collect();
        prof.k = vec![2.0; lin.len()];
        let parts = energy(&prof, &p).unwrap();
        let unit = energy(&prof, &p.with_alpha(0.5).unwrap()).unwrap();
        prop_assert!((parts.energy_term / unit.energy_term - 2.0 * alpha).abs() < 1e-12);
        prop_assert!((parts.distortion_term / unit.distortion_term - 2.0 * (1.0 - alpha)).abs() < 1e-12);
    }
}
