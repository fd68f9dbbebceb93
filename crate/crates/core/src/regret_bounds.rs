//! Finite-time regret-bound constants and the resulting upper bounds.
//!
//! Everything here is a pure function of a scenario's precomputed arm
//! analytics. The eigenvalue-gap convention is selectable: the bound
//! statement uses the gap of the multiplicative symmetrization, while the raw
//! convention (gap of P itself, defined for reversible chains) reproduces the
//! printed L-thresholds for the built-in two-state scenarios.

use crate::arm_models::{ArmError, GapConvention};
use crate::sim_engine::Scenario;
use thiserror::Error;

/// beta = sum_{t >= 1} t^-2 = pi^2 / 6.
pub const BETA: f64 = std::f64::consts::PI * std::f64::consts::PI / 6.0;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum BoundError {
    #[error("arm {arm}: {source}")]
    Arm { arm: usize, source: ArmError },
}

/// Per-arm constants entering the Theorem 1/2 expressions.
#[derive(Debug, Clone)]
pub struct ArmConstants {
    pub mean_reward: f64,
    pub min_stationary: f64,
    pub max_hitting_time: f64,
    pub eigenvalue_gap: f64,
    /// C_i = 1 + (|S^i| + |S*|) beta / pi_min.
    pub c: f64,
    /// D_i = 1 / pi^i_min + M^i_max + 1.
    pub d: f64,
    /// E_i = mu^i (1 + M^i_max) + mu* M*_max.
    pub e: f64,
}

/// All scenario-level and per-arm bound constants, plus bound evaluators.
#[derive(Debug, Clone)]
pub struct BoundReport {
    pub convention: GapConvention,
    pub best_mean: f64,
    pub optimal_arm: usize,
    pub min_stationary: f64,
    pub max_reward: f64,
    pub max_states: usize,
    pub max_pi_hat: f64,
    pub min_eigenvalue_gap: f64,
    pub beta: f64,
    /// F = mu* (1 / pi_min + max_i M^i_max + 1).
    pub f: f64,
    pub l_threshold: f64,
    pub arms: Vec<ArmConstants>,
}

impl BoundReport {
    pub fn new(scenario: &Scenario, convention: GapConvention) -> Result<Self, BoundError> {
        let best_mean = scenario.best_mean();
        let optimal_arm = scenario.optimal_arm();
        let opt_states = scenario.arms()[optimal_arm].num_states();
        let opt_max_hitting = scenario.arms()[optimal_arm].max_hitting_time();

        let min_stationary = scenario
            .arms()
            .iter()
            .map(|a| a.min_stationary())
            .fold(f64::INFINITY, f64::min);
        let max_reward = scenario.max_reward();
        let max_states = scenario.arms().iter().map(|a| a.num_states()).max().unwrap();
        let max_pi_hat = scenario
            .arms()
            .iter()
            .map(|a| a.max_pi_hat())
            .fold(0.0, f64::max);

        let mut arms = Vec::with_capacity(scenario.num_arms());
        for (i, arm) in scenario.arms().iter().enumerate() {
            let gap = arm
                .eigenvalue_gap(convention)
                .map_err(|source| BoundError::Arm { arm: i, source })?;
            let c = 1.0 + (arm.num_states() + opt_states) as f64 * BETA / min_stationary;
            let d = 1.0 / arm.min_stationary() + arm.max_hitting_time() + 1.0;
            let e = arm.mean_reward() * (1.0 + arm.max_hitting_time()) + best_mean * opt_max_hitting;
            arms.push(ArmConstants {
                mean_reward: arm.mean_reward(),
                min_stationary: arm.min_stationary(),
                max_hitting_time: arm.max_hitting_time(),
                eigenvalue_gap: gap,
                c,
                d,
                e,
            });
        }
        let min_eigenvalue_gap = arms
            .iter()
            .map(|a| a.eigenvalue_gap)
            .fold(f64::INFINITY, f64::min);
        let max_hitting = arms
            .iter()
            .map(|a| a.max_hitting_time)
            .fold(0.0, f64::max);
        let f = best_mean * (1.0 / min_stationary + max_hitting + 1.0);
        let l_threshold = 112.0
            * (max_states as f64).powi(2)
            * max_reward.powi(2)
            * max_pi_hat.powi(2)
            / min_eigenvalue_gap;
        Ok(Self {
            convention,
            best_mean,
            optimal_arm,
            min_stationary,
            max_reward,
            max_states,
            max_pi_hat,
            min_eigenvalue_gap,
            beta: BETA,
            f,
            l_threshold,
            arms,
        })
    }

    fn suboptimal(&self) -> impl Iterator<Item = &ArmConstants> {
        let best = self.best_mean;
        self.arms.iter().filter(move |a| a.mean_reward < best)
    }

    /// Whether the given exploration constant satisfies the threshold.
    pub fn meets_threshold(&self, exploration: f64) -> bool {
        exploration >= self.l_threshold
    }

    /// Upper bound on the gap-weighted expected plays of suboptimal arms:
    /// sum_i [4 L D_i ln n / gap_i + gap_i D_i C_i].
    pub fn theorem1_bound(&self, exploration: f64, horizon: u64) -> f64 {
        let ln_n = (horizon as f64).ln();
        self.suboptimal()
            .map(|a| {
                let gap = self.best_mean - a.mean_reward;
                4.0 * exploration * a.d * ln_n / gap + gap * a.d * a.c
            })
            .sum()
    }

    /// Per-arm expected-plays bound (Theorem 1's expression divided by the
    /// reward gap): 4 L D_i ln n / gap^2 + D_i C_i.
    pub fn expected_plays_bound(&self, arm: usize, exploration: f64, horizon: u64) -> f64 {
        let a = &self.arms[arm];
        let gap = self.best_mean - a.mean_reward;
        assert!(gap > 0.0, "expected-plays bound only applies to suboptimal arms");
        let ln_n = (horizon as f64).ln();
        4.0 * exploration * a.d * ln_n / (gap * gap) + a.d * a.c
    }

    /// Uniform-in-time regret upper bound.
    pub fn theorem2_bound(&self, exploration: f64, horizon: u64) -> f64 {
        let ln_n = (horizon as f64).ln();
        let log_sum: f64 = self
            .suboptimal()
            .map(|a| {
                let gap = self.best_mean - a.mean_reward;
                (a.d + a.e / gap) / gap
            })
            .sum();
        let const_sum: f64 = self
            .suboptimal()
            .map(|a| {
                let gap = self.best_mean - a.mean_reward;
                a.c * (gap * a.d + a.e)
            })
            .sum();
        4.0 * exploration * ln_n * log_sum + const_sum + self.f
    }
}

/// L-threshold 112 S_max^2 r_max^2 pi_hat_max^2 / eps_min.
pub fn l_threshold(scenario: &Scenario, convention: GapConvention) -> Result<f64, BoundError> {
    Ok(BoundReport::new(scenario, convention)?.l_threshold)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arm_models::{ArmModel, TransitionMatrix};
    use crate::sim_engine::{scenario_s1, scenario_s2};
    use approx::{assert_abs_diff_eq, assert_relative_eq};

    #[test]
    fn beta_is_pi_squared_over_six() {
        assert_abs_diff_eq!(BETA, 1.6449340668482264, epsilon = 1e-12);
    }

    #[test]
    fn l_threshold_raw_matches_printed_values() {
        let s1 = l_threshold(&scenario_s1(), GapConvention::Raw).unwrap();
        assert_relative_eq!(s1, 9557.33, max_relative = 1e-3);
        let s2 = l_threshold(&scenario_s2(), GapConvention::Raw).unwrap();
        assert_relative_eq!(s2, 1037.04, max_relative = 1e-3);
    }

    #[test]
    fn l_threshold_symmetrized_s1() {
        // eps_min = 1 - 0.97^2 via the two-state closed form for P_hat.
        let got = l_threshold(&scenario_s1(), GapConvention::Symmetrized).unwrap();
        let eps = 1.0 - 0.97f64.powi(2);
        assert_relative_eq!(got, 112.0 * 4.0 * 0.8f64.powi(2) / eps, max_relative = 1e-10);
        assert_relative_eq!(got, 4851.4, max_relative = 1e-3);
    }

    #[test]
    fn single_arm_bounds_collapse() {
        let arm = ArmModel::gilbert_elliot(0.2, 0.3, 0.1, 1.0).unwrap();
        let scenario = Scenario::new("one", vec![arm]).unwrap();
        let report = BoundReport::new(&scenario, GapConvention::Symmetrized).unwrap();
        assert_eq!(report.theorem1_bound(100.0, 100_000), 0.0);
        assert_abs_diff_eq!(report.theorem2_bound(100.0, 100_000), report.f, epsilon = 1e-12);
    }

    #[test]
    fn s2_f_constant() {
        let report = BoundReport::new(&scenario_s2(), GapConvention::Raw).unwrap();
        // pi_min = 1/6, max hitting time = 1 / 0.1 = 10.
        assert_abs_diff_eq!(report.f, 0.85 * (6.0 + 10.0 + 1.0), epsilon = 1e-9);
    }

    #[test]
    fn reduced_s1_theorem1_terms() {
        // Arms ch.1 and ch.2 of S1 only.
        let arms = vec![
            ArmModel::gilbert_elliot(0.01, 0.03, 0.1, 1.0).unwrap(),
            ArmModel::gilbert_elliot(0.04, 0.01, 0.1, 1.0).unwrap(),
        ];
        let scenario = Scenario::new("S1a", arms).unwrap();
        let report = BoundReport::new(&scenario, GapConvention::Raw).unwrap();
        let a = &report.arms[0];
        assert_abs_diff_eq!(a.d, 105.0, epsilon = 1e-9);
        assert_abs_diff_eq!(a.c, 1.0 + 4.0 * BETA / 0.2, epsilon = 1e-9);
        assert_abs_diff_eq!(a.c, 33.899, epsilon = 1e-3);
        let bound = report.theorem1_bound(9557.3, 100_000);
        let gap = 0.495;
        let expected = 4.0 * 9557.3 * 105.0 * (100_000f64).ln() / gap + gap * 105.0 * a.c;
        assert_abs_diff_eq!(bound, expected, epsilon = 1e-6);
        assert_relative_eq!(expected, 9.3361e7 + 1762.0, max_relative = 1e-4);
        assert_abs_diff_eq!(gap * 105.0 * a.c, 1762.0, epsilon = 0.5);
    }

    #[test]
    fn doubling_l_doubles_log_term_only() {
        let report = BoundReport::new(&scenario_s1(), GapConvention::Raw).unwrap();
        let n = 50_000;
        let b1 = report.theorem1_bound(1000.0, n);
        let b2 = report.theorem1_bound(2000.0, n);
        let constant: f64 = report
            .suboptimal()
            .map(|a| (report.best_mean - a.mean_reward) * a.d * a.c)
            .sum();
        assert_relative_eq!(b2 - constant, 2.0 * (b1 - constant), max_relative = 1e-12);
    }

    #[test]
    fn theorem2_log_increment() {
        let report = BoundReport::new(&scenario_s2(), GapConvention::Raw).unwrap();
        let l = 1037.2;
        let diff = report.theorem2_bound(l, 100_000) - report.theorem2_bound(l, 10_000);
        let log_sum: f64 = report
            .suboptimal()
            .map(|a| {
                let gap = report.best_mean - a.mean_reward;
                (a.d + a.e / gap) / gap
            })
            .sum();
        let expected = 4.0 * l * ((100_000f64).ln() - (10_000f64).ln()) * log_sum;
        assert_relative_eq!(diff, expected, max_relative = 1e-10);
    }

    #[test]
    fn monotone_in_horizon_and_l() {
        let report = BoundReport::new(&scenario_s1(), GapConvention::Symmetrized).unwrap();
        let mut prev = 0.0;
        for n in [10u64, 100, 1000, 10_000, 100_000] {
            let b = report.theorem2_bound(500.0, n);
            assert!(b > prev);
            prev = b;
        }
        assert!(report.theorem2_bound(600.0, 1000) > report.theorem2_bound(500.0, 1000));
    }

    #[test]
    fn theorem2_dominates_theorem1() {
        for convention in [GapConvention::Raw, GapConvention::Symmetrized] {
            for scenario in [scenario_s1(), scenario_s2()] {
                let report = BoundReport::new(&scenario, convention).unwrap();
                for n in [100u64, 10_000, 100_000] {
                    assert!(report.theorem2_bound(2000.0, n) > report.theorem1_bound(2000.0, n));
                }
            }
        }
    }

    #[test]
    fn raw_convention_fails_on_non_reversible_arm() {
        let p = TransitionMatrix::new(vec![
            vec![0.1, 0.8, 0.1],
            vec![0.1, 0.1, 0.8],
            vec![0.8, 0.1, 0.1],
        ])
        .unwrap();
        let arms = vec![
            ArmModel::new(p, vec![0.1, 0.5, 1.0]).unwrap(),
            ArmModel::gilbert_elliot(0.2, 0.3, 0.1, 1.0).unwrap(),
        ];
        let scenario = Scenario::new("mixed", arms).unwrap();
        let err = BoundReport::new(&scenario, GapConvention::Raw).unwrap_err();
        assert_eq!(
            err,
            BoundError::Arm {
                arm: 0,
                source: ArmError::ComplexSpectrum
            }
        );
        assert!(BoundReport::new(&scenario, GapConvention::Symmetrized).is_ok());
    }

    #[test]
    fn two_state_closed_forms_cross_check() {
        for (p01, p10) in [(0.01, 0.03), (0.04, 0.01), (0.1, 0.2), (0.5, 0.1), (0.33, 0.27)] {
            let arm = ArmModel::gilbert_elliot(p01, p10, 0.1, 1.0).unwrap();
            let pi1 = p01 / (p01 + p10);
            assert_abs_diff_eq!(arm.stationary()[1], pi1, epsilon = 1e-10);
            assert_abs_diff_eq!(arm.hitting_times()[(0, 1)], 1.0 / p01, epsilon = 1e-10);
            assert_abs_diff_eq!(arm.hitting_times()[(1, 0)], 1.0 / p10, epsilon = 1e-10);
            let lambda2 = 1.0 - p01 - p10;
            assert_abs_diff_eq!(
                arm.eigenvalue_gap(GapConvention::Raw).unwrap(),
                1.0 - lambda2,
                epsilon = 1e-10
            );
            assert_abs_diff_eq!(
                arm.eigenvalue_gap(GapConvention::Symmetrized).unwrap(),
                1.0 - lambda2 * lambda2,
                epsilon = 1e-10
            );
        }
    }
}
