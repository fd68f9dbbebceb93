//! Randomized property tests over chains, policies, and the engine.

use bandit_lab::arm_models::{ArmModel, ArmState, GapConvention, TransitionMatrix};
use bandit_lab::policies::Exp3;
use bandit_lab::sim_engine::{monte_carlo, run_episode, scenario_s1, PolicySpec};
use proptest::prelude::*;

/// Strategy for a strictly positive row-stochastic matrix (2-5 states), which
/// is always irreducible and aperiodic.
fn positive_chain() -> impl Strategy<Value = TransitionMatrix> {
    (2usize..=5)
        .prop_flat_map(|n| {
            prop::collection::vec(prop::collection::vec(0.02f64..1.0, n), n)
        })
        .prop_map(|rows| {
            let rows = rows
                .into_iter()
                .map(|row| {
                    let s: f64 = row.iter().sum();
                    row.into_iter().map(|v| v / s).collect::<Vec<_>>()
                })
                .collect();
            TransitionMatrix::new(rows).expect("positive rows are valid")
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn stationary_distribution_is_invariant(p in positive_chain()) {
        let n = p.dimension();
        let arm = ArmModel::new(p.clone(), vec![1.0; n]).unwrap();
        let pi = arm.stationary();
        let total: f64 = pi.iter().sum();
        prop_assert!((total - 1.0).abs() < 1e-12);
        for y in 0..n {
            let flow: f64 = (0..n).map(|x| pi[x] * p.entry(x, y)).sum();
            prop_assert!((flow - pi[y]).abs() < 1e-10, "pi P != pi at {y}");
        }
        prop_assert!(pi.iter().all(|&v| v > 0.0));
    }

    #[test]
    fn symmetrized_gap_lies_in_unit_interval(p in positive_chain()) {
        let n = p.dimension();
        let arm = ArmModel::new(p, vec![1.0; n]).unwrap();
        let gap = arm.eigenvalue_gap(GapConvention::Symmetrized).unwrap();
        prop_assert!(gap > 0.0 && gap <= 1.0, "gap {gap} out of range");
    }

    #[test]
    fn two_state_symmetrization_is_p_squared(p01 in 0.01f64..0.99, p10 in 0.01f64..0.99) {
        // Two-state chains are reversible, so P'P = P^2.
        let arm = ArmModel::gilbert_elliot(p01, p10, 0.1, 1.0).unwrap();
        let p = arm.transition();
        for x in 0..2 {
            for y in 0..2 {
                let sq: f64 = (0..2).map(|z| p.entry(x, z) * p.entry(z, y)).sum();
                prop_assert!((arm.symmetrization()[(x, y)] - sq).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn hitting_times_satisfy_first_step_equations(p in positive_chain()) {
        let n = p.dimension();
        let arm = ArmModel::new(p.clone(), vec![1.0; n]).unwrap();
        let m = arm.hitting_times();
        for x in 0..n {
            for y in 0..n {
                if x == y {
                    prop_assert!(m[(x, y)].abs() < 1e-12);
                    continue;
                }
                let rhs: f64 = 1.0
                    + (0..n)
                        .filter(|&z| z != y)
                        .map(|z| p.entry(x, z) * m[(z, y)])
                        .sum::<f64>();
                prop_assert!((m[(x, y)] - rhs).abs() < 1e-8 * m[(x, y)].max(1.0));
            }
        }
    }

    #[test]
    fn step_is_deterministic_in_the_seed(p in positive_chain(), seed in any::<u64>()) {
        use rand::SeedableRng;
        let n = p.dimension();
        let arm = ArmModel::new(p, vec![1.0; n]).unwrap();
        let walk = |seed: u64| {
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let mut s = ArmState(0);
            (0..200).map(|_| { s = arm.step(s, &mut rng); s.0 }).collect::<Vec<_>>()
        };
        prop_assert_eq!(walk(seed), walk(seed));
    }

    #[test]
    fn exp3_probabilities_form_a_mixture(
        weights in prop::collection::vec(1e-6f64..1e6, 2..=8),
        gain in 0.01f64..1.0,
    ) {
        let k = weights.len();
        let mut exp3 = Exp3::new(k, gain, 1.0);
        exp3.set_weights(weights);
        let probs = exp3.probabilities();
        let total: f64 = probs.iter().sum();
        prop_assert!((total - 1.0).abs() < 1e-12);
        let floor = gain / k as f64;
        prop_assert!(probs.iter().all(|&p| p >= floor - 1e-15));
    }

    #[test]
    fn exp3_rescaling_weights_preserves_probabilities(
        weights in prop::collection::vec(1e-3f64..1e3, 2..=6),
        scale in 1e-8f64..1e8,
        gain in 0.01f64..1.0,
    ) {
        let k = weights.len();
        let mut a = Exp3::new(k, gain, 1.0);
        let mut b = Exp3::new(k, gain, 1.0);
        a.set_weights(weights.clone());
        b.set_weights(weights.iter().map(|w| w * scale).collect());
        for (pa, pb) in a.probabilities().iter().zip(b.probabilities()) {
            prop_assert!((pa - pb).abs() < 1e-12);
        }
    }
}

#[test]
fn episode_is_reproducible() {
    let scenario = scenario_s1();
    let run = || {
        let mut policy = PolicySpec::Ucb1 { exploration: 2.0 }
            .build(&scenario, 2000)
            .unwrap();
        run_episode(&scenario, policy.as_mut(), 2000, 42, 50)
    };
    let a = run();
    let b = run();
    assert_eq!(a.plays, b.plays);
    assert_eq!(a.trace.checkpoints, b.trace.checkpoints);
}

#[test]
fn monte_carlo_is_thread_count_independent() {
    // Same aggregation from 1- and 4-thread pools, bit for bit.
    let scenario = scenario_s1();
    let spec = PolicySpec::Rca { exploration: 10.0 };
    let run = |threads: usize| {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .unwrap();
        pool.install(|| monte_carlo(&scenario, &spec, 5000, 16, 9, 1000).unwrap())
    };
    let a = run(1);
    let b = run(4);
    assert_eq!(a.mean_regret, b.mean_regret);
    assert_eq!(a.sd_regret, b.sd_regret);
    assert_eq!(a.mean_plays, b.mean_plays);
}
