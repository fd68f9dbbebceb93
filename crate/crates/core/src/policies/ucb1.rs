//! UCB1 with a configurable exploration constant in place of the usual 2.

use super::{argmax, Policy};
use rand::RngCore;

pub struct Ucb1 {
    exploration: f64,
    /// Per-arm play counts T^i(n).
    counts: Vec<u64>,
    /// Per-arm cumulative rewards.
    sums: Vec<f64>,
    /// Completed slots n.
    slots: u64,
    pending_select: Option<usize>,
}

impl Ucb1 {
    pub fn new(num_arms: usize, exploration: f64) -> Self {
        assert!(num_arms >= 1);
        assert!(exploration > 0.0);
        Self {
            exploration,
            counts: vec![0; num_arms],
            sums: vec![0.0; num_arms],
            slots: 0,
            pending_select: None,
        }
    }

    /// Index of arm `i` at slot count `n`: sample mean plus
    /// sqrt(L * ln(n) / T^i).
    pub fn index(&self, arm: usize, n: u64) -> f64 {
        let t = self.counts[arm] as f64;
        self.sums[arm] / t + (self.exploration * (n as f64).ln() / t).sqrt()
    }

    pub fn play_counts(&self) -> &[u64] {
        &self.counts
    }

    pub fn slots(&self) -> u64 {
        self.slots
    }

    fn pick(&self) -> usize {
        let k = self.counts.len();
        // First K slots: play each arm once, in order.
        if (self.slots as usize) < k {
            return self.slots as usize;
        }
        let indices: Vec<f64> = (0..k).map(|i| self.index(i, self.slots)).collect();
        argmax(&indices)
    }
}

impl Policy for Ucb1 {
    fn select_arm(&mut self, _rng: &mut dyn RngCore) -> usize {
        let arm = self.pick();
        self.pending_select = Some(arm);
        arm
    }

    fn observe(&mut self, arm: usize, _state: usize, reward: f64) {
        assert_eq!(
            self.pending_select.take(),
            Some(arm),
            "select/observe alternation violated"
        );
        self.counts[arm] += 1;
        self.sums[arm] += reward;
        self.slots += 1;
    }

    fn label(&self) -> String {
        format!("ucb1(L={})", self.exploration)
    }
}
