//! Exp3 exponential-weights policy.

use super::{uniform_f64, Policy};
use rand::RngCore;

/// Weights are rescaled by the maximum whenever it exceeds this; the mixture
/// probabilities are invariant under the rescaling.
const WEIGHT_RESCALE_THRESHOLD: f64 = 1e100;

/// Horizon-tuned mixing parameter: min(1, sqrt(K ln K / ((e - 1) N))).
pub fn exp3_horizon_tuned_gain(num_arms: usize, horizon: u64) -> f64 {
    let k = num_arms as f64;
    (k * k.ln() / ((std::f64::consts::E - 1.0) * horizon as f64))
        .sqrt()
        .min(1.0)
}

pub struct Exp3 {
    /// Mixing parameter a in (0, 1].
    gain: f64,
    weights: Vec<f64>,
    /// Probability vector from the slot of the last select.
    last_probs: Vec<f64>,
    /// Rewards are divided by this before the exponent so the update sees
    /// values in [0, 1].
    reward_scale: f64,
    pending_select: Option<usize>,
}

impl Exp3 {
    pub fn new(num_arms: usize, gain: f64, reward_scale: f64) -> Self {
        assert!(num_arms >= 1);
        assert!(gain > 0.0 && gain <= 1.0);
        assert!(reward_scale > 0.0);
        Self {
            gain,
            weights: vec![1.0; num_arms],
            last_probs: vec![1.0 / num_arms as f64; num_arms],
            reward_scale,
            pending_select: None,
        }
    }

    pub fn gain(&self) -> f64 {
        self.gain
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Replaces the weight vector, e.g. to restore a checkpoint.
    pub fn set_weights(&mut self, weights: Vec<f64>) {
        assert_eq!(weights.len(), self.weights.len());
        assert!(weights.iter().all(|w| w.is_finite() && *w > 0.0));
        self.weights = weights;
    }

    /// Mixed distribution p_i = (1 - a) w_i / sum(w) + a / K.
    pub fn probabilities(&self) -> Vec<f64> {
        let k = self.weights.len() as f64;
        let total: f64 = self.weights.iter().sum();
        self.weights
            .iter()
            .map(|w| (1.0 - self.gain) * w / total + self.gain / k)
            .collect()
    }

    fn update(&mut self, arm: usize, reward: f64) {
        let k = self.weights.len() as f64;
        let r = reward / self.reward_scale;
        let p = self.last_probs[arm];
        self.weights[arm] *= (self.gain * r / (k * p)).exp();
        let max = self.weights.iter().copied().fold(0.0, f64::max);
        if max > WEIGHT_RESCALE_THRESHOLD {
            for w in &mut self.weights {
                *w /= max;
            }
        }
    }
}

impl Policy for Exp3 {
    fn select_arm(&mut self, rng: &mut dyn RngCore) -> usize {
        self.last_probs = self.probabilities();
        // One uniform variate, inverse-CDF in arm order.
        let u = uniform_f64(rng);
        let mut acc = 0.0;
        let mut arm = self.last_probs.len() - 1;
        for (i, &p) in self.last_probs.iter().enumerate() {
            acc += p;
            if u < acc {
                arm = i;
                break;
            }
        }
        self.pending_select = Some(arm);
        arm
    }

    fn observe(&mut self, arm: usize, _state: usize, reward: f64) {
        assert_eq!(
            self.pending_select.take(),
            Some(arm),
            "select/observe alternation violated"
        );
        self.update(arm, reward);
    }

    fn label(&self) -> String {
        format!("exp3(a={})", self.gain)
    }
}
