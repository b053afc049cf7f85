use annulus_energy::integrate::{integrate, integrate_through, sample, FnSystem, Options, Termination};
use proptest::prelude::*;

fn oscillator() -> FnSystem<impl Fn(f64, &[f64], &mut [f64]), fn(f64, &[f64]) -> bool> {
    FnSystem::new(2, |_x: f64, y: &[f64], dy: &mut [f64]| {
        dy[0] = y[1];
        dy[1] = -y[0];
    })
}

#[test]
fn error_shrinks_with_tolerance() {
    let sys = oscillator();
    let err = |tol: f64| {
        let t = integrate(&sys, 0.0, &[0.0, 1.0], 10.0, tol, tol * 1e-2).unwrap();
        (t.last_state()[0] - 10f64.sin()).abs()
    };
    let errs: Vec<f64> = [1e-4, 1e-6, 1e-8, 1e-10].iter().map(|&t| err(t)).collect();
    assert!(errs.windows(2).all(|w| w[1] < w[0]), "{errs:?}");
    assert!(errs[3] < 1e-8);
}

#[test]
fn stops_are_hit_exactly_and_in_order() {
    let sys = oscillator();
    let stops = [0.3, 1.7, 2.0, 5.5];
    let t = integrate_through(&sys, 0.0, &[0.0, 1.0], &stops, &Options::default()).unwrap();
    assert!(t.reached_end());
    for s in stops {
        let i = t.node_index(s).expect("stop present");
        assert!((t.states[i][0] - s.sin()).abs() < 1e-9);
    }
    assert!(t.nodes.windows(2).all(|w| w[1] > w[0]));
}

#[test]
fn guard_exit_is_localized() {
    let sys = FnSystem::with_guard(1, |_x: f64, y: &[f64], dy: &mut [f64]| dy[0] = y[0] * y[0], |_x: f64, y: &[f64]| y[0] < 10.0);
    let t = integrate(&sys, 0.0, &[1.0], 2.0, 1e-10, 1e-12).unwrap();
    assert_eq!(t.termination, Termination::GuardExit);
    assert!((t.last_x() - 0.9).abs() < 1e-8);
    assert!(t.states.iter().all(|s| s[0] < 10.0));
}

#[test]
fn step_limit_is_reported() {
    let sys = oscillator();
    let opts = Options { max_steps: 5, ..Options::default() };
    let t = integrate_through(&sys, 0.0, &[0.0, 1.0], &[100.0], &opts).unwrap();
    assert_eq!(t.termination, Termination::StepLimit);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn forward_then_back_returns(k in 0.1f64..3.0, y0 in 0.1f64..5.0, x1 in 0.5f64..4.0) {
        let sys = FnSystem::new(1, move |x: f64, y: &[f64], dy: &mut [f64]| dy[0] = -k * y[0] + x.sin());
        let fwd = integrate(&sys, 0.0, &[y0], x1, 1e-11, 1e-13).unwrap();
        let back = integrate(&sys, x1, fwd.last_state(), 0.0, 1e-11, 1e-13).unwrap();
        prop_assert!(back.nodes.windows(2).all(|w| w[1] < w[0]));
        prop_assert!((back.last_state()[0] - y0).abs() < 1e-8 * y0.max(1.0));
    }

    #[test]
    fn dense_output_is_accurate(k in 0.1f64..2.0, x in 0.01f64..3.0) {
        let sys = FnSystem::new(1, move |_x: f64, y: &[f64], dy: &mut [f64]| dy[0] = -k * y[0]);
        let t = integrate(&sys, 0.0, &[1.0], 3.0, 1e-10, 1e-12).unwrap();
        let v = sample(&t, x).unwrap()[0];
        prop_assert!((v - (-k * x).exp()).abs() < 1e-7);
    }
}
