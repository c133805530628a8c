use inexact_gd_core::problems::{QuadraticDiag, Rosenbrock, Simple3D};
use inexact_gd_core::{
    run_adaptive_gd, run_const_step_gd, AdaptiveConfig, ConstStepConfig, InexactOracle,
    NoiseModel, Objective, RngStream, StopReason, StopRule,
};
use proptest::prelude::*;

fn noise_strategy() -> impl Strategy<Value = NoiseModel> {
    prop_oneof![
        Just(NoiseModel::None),
        Just(NoiseModel::RandomSphere),
        Just(NoiseModel::Antigradient),
        Just(NoiseModel::FirstComponentBias),
    ]
}

#[test]
fn biased_first_component_settles_at_floor() {
    let (mu, l, delta) = (0.1, 1.0, 0.01);
    let q = QuadraticDiag::new(vec![mu, l]).unwrap();
    let mut o =
        InexactOracle::new(q, delta, 0.0, NoiseModel::FirstComponentBias, RngStream::new(1, 0))
            .unwrap();
    let cfg = ConstStepConfig::new(l, vec![0.0, 1.0]).with_stop(StopRule::none(10_000));
    let run = run_const_step_gd(&mut o, &cfg).unwrap();
    let target = delta / mu;
    assert!((run.x_hat[0] - target).abs() <= 0.01 * target);
    assert!(run.last().f_gap >= 0.99 * delta * delta / (2.0 * mu));
}

#[test]
fn simple3d_drifts_without_rule_and_stops_with_it() {
    let s = Simple3D::new(1.0, 0.1).unwrap();
    let noise = NoiseModel::constant_last_axis(3).unwrap();
    let delta = 0.01;
    let mut o = InexactOracle::new(s, delta, 0.0, noise.clone(), RngStream::new(0, 0)).unwrap();
    let cfg = ConstStepConfig::new(2.0, vec![0.0; 3]).with_stop(StopRule::none(300));
    let run = run_const_step_gd(&mut o, &cfg).unwrap();
    // Each step moves the null coordinate by Δ/L.
    assert!((run.x_hat[2] + 300.0 * delta / 2.0).abs() < 1e-12);

    let mut o = InexactOracle::new(s, delta, 0.0, noise, RngStream::new(0, 0)).unwrap();
    let run = run_const_step_gd(&mut o, &ConstStepConfig::new(2.0, vec![0.0; 3])).unwrap();
    assert_eq!(run.iterations(), 0);
}

#[test]
fn adaptive_exact_rosenbrock_constants_bounded() {
    let mut o = InexactOracle::exact(Rosenbrock);
    let cfg = AdaptiveConfig::new(1.0, 1e-3, Rosenbrock::START.to_vec())
        .with_stop(StopRule::none(2000));
    let run = run_adaptive_gd(&mut o, &cfg).unwrap();
    // Along this trajectory the Hessian norm stays below 1100.
    assert!(run.max_accepted_l().unwrap() <= 2.0 * 1100.0);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn rule_stop_respects_threshold(seed in 0u64..1000, noise in noise_strategy(), delta in 1e-4f64..0.1) {
        let mut rng = RngStream::new(seed, 9);
        let q = QuadraticDiag::random(12, 2, 0.2, 1.0, &mut rng).unwrap();
        let x0: Vec<f64> = (0..12).map(|_| rng.uniform(-5.0, 5.0)).collect();
        let mut o = InexactOracle::new(q.clone(), delta, 0.0, noise.clone(), RngStream::new(seed, 0)).unwrap();
        let run = run_const_step_gd(&mut o, &ConstStepConfig::new(1.0, x0.clone())).unwrap();
        prop_assert_eq!(run.stop_reason, StopReason::RuleTriggered);
        prop_assert!(run.last().tilde_grad_norm <= 6.0f64.sqrt() * delta);
        prop_assert_eq!(run.records.len(), run.iterations() + 1);
        prop_assert_eq!(run.records[0].dist_from_x0, 0.0);
        // Reported N is the first index meeting the rule.
        prop_assert!(run.records[..run.records.len() - 1]
            .iter()
            .all(|r| r.tilde_grad_norm > 6.0f64.sqrt() * delta));

        let mut o = InexactOracle::new(q, delta, delta * delta / 16.0, noise, RngStream::new(seed, 0)).unwrap();
        let run = run_adaptive_gd(&mut o, &AdaptiveConfig::new(1.0, 0.05, x0)).unwrap();
        prop_assert_eq!(run.stop_reason, StopReason::RuleTriggered);
        prop_assert!(run.last().tilde_grad_norm <= 2.0 * delta);
    }

    #[test]
    fn adaptive_step_constants_follow_doubling(seed in 0u64..1000, l0 in 0.01f64..4.0, floor in 0.0f64..1.0) {
        let l_min = floor * l0;
        let mut rng = RngStream::new(seed, 5);
        let q = QuadraticDiag::random(10, 1, 0.1, 1.0, &mut rng).unwrap();
        let x0: Vec<f64> = (0..10).map(|_| rng.uniform(-3.0, 3.0)).collect();
        let mut o = InexactOracle::new(q, 1e-3, 1e-7, NoiseModel::RandomSphere, RngStream::new(seed, 1)).unwrap();
        let cfg = AdaptiveConfig::new(l0, l_min, x0).with_stop(StopRule::none(300));
        let run = run_adaptive_gd(&mut o, &cfg).unwrap();
        let mut start = l0;
        let mut trials = 0;
        for r in run.records.iter().filter(|r| r.l_k.is_some()) {
            let l = r.l_k.unwrap();
            let t = r.inner_evals.unwrap();
            prop_assert!(l >= l_min);
            prop_assert_eq!(l, start * 2f64.powi(t as i32 - 1));
            prop_assert!(l <= (2.0 * 1.0f64).max(l0));
            start = (l / 2.0).max(l_min);
            trials += t;
        }
        prop_assert_eq!(trials, run.candidate_trials());
        prop_assert_eq!(run.total_value_queries, run.iterations() + trials);
        prop_assert_eq!(run.total_grad_queries, run.records.len());
    }

    #[test]
    fn runs_are_deterministic(seed in 0u64..1000, noise in noise_strategy()) {
        let q = QuadraticDiag::new(vec![0.0, 0.3, 1.0]).unwrap();
        let cfg = AdaptiveConfig::new(0.5, 0.1, vec![2.0, -1.0, 3.0]);
        let mk = || InexactOracle::new(q.clone(), 0.01, 1e-5, noise.clone(), RngStream::new(seed, 2)).unwrap();
        prop_assert_eq!(run_adaptive_gd(&mut mk(), &cfg).unwrap(), run_adaptive_gd(&mut mk(), &cfg).unwrap());
        let cfg = ConstStepConfig::new(1.0, vec![2.0, -1.0, 3.0]);
        prop_assert_eq!(run_const_step_gd(&mut mk(), &cfg).unwrap(), run_const_step_gd(&mut mk(), &cfg).unwrap());
    }

    #[test]
    fn exact_quadratic_never_accepts_above_twice_l(seed in 0u64..1000, l0 in 0.001f64..2.0) {
        let mut rng = RngStream::new(seed, 6);
        let q = QuadraticDiag::random(8, 0, 0.05, 1.0, &mut rng).unwrap();
        let l = q.lipschitz().unwrap();
        let x0: Vec<f64> = (0..8).map(|_| rng.uniform(-10.0, 10.0)).collect();
        let mut o = InexactOracle::exact(q);
        let cfg = AdaptiveConfig::new(l0, 0.0, x0).with_stop(StopRule::none(200));
        let run = run_adaptive_gd(&mut o, &cfg).unwrap();
        prop_assert!(run.max_accepted_l().unwrap() <= 2.0 * l);
    }
}
