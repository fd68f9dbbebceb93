//! Learner-side algorithms behind a single sequential-decision contract.
//!
//! Each slot the engine calls `select_arm` then `observe` exactly once, in
//! that order. Policies only ever see the probed arm's observation; the
//! best-fixed-arm oracle is the one exception to the "no true parameters"
//! rule.

mod exp3;
mod rca;
mod ucb1;

pub use exp3::{exp3_horizon_tuned_gain, Exp3};
pub use rca::{rca_index, Rca, RcaPhase};
pub use ucb1::Ucb1;

use rand::RngCore;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PolicyError {
    #[error("observe called without a pending select (arm {got}, expected {expected:?})")]
    ProtocolViolation { got: usize, expected: Option<usize> },
    #[error("two arms share the maximal mean reward within 1e-12")]
    AmbiguousOptimum,
}

/// Sequential-decision contract shared by all policies.
pub trait Policy {
    /// Chooses the arm to probe this slot. `rng` is the policy's private
    /// random stream; deterministic policies must not touch it.
    fn select_arm(&mut self, rng: &mut dyn RngCore) -> usize;

    /// Delivers the probed arm's observed state and reward.
    fn observe(&mut self, arm: usize, state: usize, reward: f64);

    fn label(&self) -> String;
}

/// Index of the arm with the strictly highest mean reward.
pub fn best_fixed_arm(means: &[f64]) -> Result<usize, PolicyError> {
    let mut best = 0;
    for (i, &m) in means.iter().enumerate().skip(1) {
        if m > means[best] {
            best = i;
        }
    }
    for (i, &m) in means.iter().enumerate() {
        if i != best && (means[best] - m).abs() < 1e-12 {
            return Err(PolicyError::AmbiguousOptimum);
        }
    }
    Ok(best)
}

/// Plays one fixed arm every slot. With the optimal arm this is the
/// best-single-action oracle; with a suboptimal arm it is a regret floor of
/// exactly gap * n in expectation.
pub struct FixedArm {
    arm: usize,
    oracle: bool,
}

impl FixedArm {
    pub fn new(arm: usize) -> Self {
        Self { arm, oracle: false }
    }

    pub fn oracle(arm: usize) -> Self {
        Self { arm, oracle: true }
    }
}

impl Policy for FixedArm {
    fn select_arm(&mut self, _rng: &mut dyn RngCore) -> usize {
        self.arm
    }

    fn observe(&mut self, _arm: usize, _state: usize, _reward: f64) {}

    fn label(&self) -> String {
        if self.oracle {
            "oracle".to_string()
        } else {
            format!("fixed:{}", self.arm + 1)
        }
    }
}

/// Uniform-random arm each slot; floor baseline.
pub struct UniformRandom {
    num_arms: usize,
}

impl UniformRandom {
    pub fn new(num_arms: usize) -> Self {
        assert!(num_arms >= 1);
        Self { num_arms }
    }
}

impl Policy for UniformRandom {
    fn select_arm(&mut self, rng: &mut dyn RngCore) -> usize {
        // One uniform variate, inverse-CDF over equal masses.
        let u = uniform_f64(rng);
        ((u * self.num_arms as f64) as usize).min(self.num_arms - 1)
    }

    fn observe(&mut self, _arm: usize, _state: usize, _reward: f64) {}

    fn label(&self) -> String {
        "random".to_string()
    }
}

/// One uniform f64 in [0, 1) from a dyn RngCore, 53-bit precision.
pub(crate) fn uniform_f64(rng: &mut dyn RngCore) -> f64 {
    (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

/// Shared argmax with ties to the lowest index.
pub(crate) fn argmax(values: &[f64]) -> usize {
    let mut best = 0;
    for (i, &v) in values.iter().enumerate().skip(1) {
        if v > values[best] {
            best = i;
        }
    }
    best
}
