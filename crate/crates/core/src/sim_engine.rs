//! Restless-environment simulation driver.
//!
//! Every slot all arms advance regardless of which one the policy probes; the
//! policy then sees the probed arm's new state and collects its reward.
//! Variate-consumption order is fixed so that, for a given seed, the arm
//! state paths are identical no matter which policy runs: initial stationary
//! draws in arm order, then one variate per arm per slot in arm order. Policy
//! randomness comes from a separate stream.

use crate::arm_models::{ArmError, ArmModel, ArmState};
use crate::policies::{
    best_fixed_arm, exp3_horizon_tuned_gain, Exp3, FixedArm, Policy, PolicyError, Rca, Ucb1,
    UniformRandom,
};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ScenarioError {
    #[error("scenario needs at least one arm")]
    NoArms,
    #[error(transparent)]
    Arm(#[from] ArmError),
    #[error(transparent)]
    Policy(#[from] PolicyError),
    #[error("fixed-arm policy refers to arm {got}, scenario has {num_arms}")]
    ArmOutOfRange { got: usize, num_arms: usize },
}

/// An ordered set of arms with its optimal-arm analytics.
#[derive(Debug, Clone)]
pub struct Scenario {
    name: String,
    arms: Vec<ArmModel>,
    optimal_arm: usize,
    best_mean: f64,
}

impl Scenario {
    pub fn new(name: impl Into<String>, arms: Vec<ArmModel>) -> Result<Self, ScenarioError> {
        if arms.is_empty() {
            return Err(ScenarioError::NoArms);
        }
        let means: Vec<f64> = arms.iter().map(|a| a.mean_reward()).collect();
        let optimal_arm = best_fixed_arm(&means)?;
        let best_mean = means[optimal_arm];
        Ok(Self {
            name: name.into(),
            arms,
            optimal_arm,
            best_mean,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn arms(&self) -> &[ArmModel] {
        &self.arms
    }

    pub fn num_arms(&self) -> usize {
        self.arms.len()
    }

    /// Index of the unique arm with the highest mean reward.
    pub fn optimal_arm(&self) -> usize {
        self.optimal_arm
    }

    /// mu-star: the highest stationary mean reward.
    pub fn best_mean(&self) -> f64 {
        self.best_mean
    }

    pub fn max_reward(&self) -> f64 {
        self.arms.iter().map(|a| a.max_reward()).fold(0.0, f64::max)
    }
}

fn gilbert_elliot_scenario(name: &str, params: &[(f64, f64)]) -> Scenario {
    let arms = params
        .iter()
        .map(|&(p01, p10)| ArmModel::gilbert_elliot(p01, p10, 0.1, 1.0).expect("built-in arm"))
        .collect();
    Scenario::new(name, arms).expect("built-in scenario")
}

/// The two five-channel Gilbert-Elliot scenarios used throughout.
pub fn builtin_scenarios() -> Vec<Scenario> {
    vec![scenario_s1(), scenario_s2()]
}

pub fn scenario_s1() -> Scenario {
    gilbert_elliot_scenario(
        "S1",
        &[(0.01, 0.03), (0.04, 0.01), (0.03, 0.01), (0.02, 0.01), (0.01, 0.02)],
    )
}

pub fn scenario_s2() -> Scenario {
    gilbert_elliot_scenario(
        "S2",
        &[(0.1, 0.2), (0.1, 0.3), (0.5, 0.1), (0.1, 0.4), (0.1, 0.5)],
    )
}

/// How to build a fresh policy instance for one run.
#[derive(Debug, Clone, PartialEq)]
pub enum PolicySpec {
    Rca { exploration: f64 },
    Ucb1 { exploration: f64 },
    /// `gain = None` selects the horizon-tuned value at build time.
    Exp3 { gain: Option<f64> },
    Oracle,
    Fixed { arm: usize },
    Random,
}

impl PolicySpec {
    pub fn build(
        &self,
        scenario: &Scenario,
        horizon: u64,
    ) -> Result<Box<dyn Policy + Send>, ScenarioError> {
        let k = scenario.num_arms();
        Ok(match *self {
            PolicySpec::Rca { exploration } => Box::new(Rca::new(k, exploration)),
            PolicySpec::Ucb1 { exploration } => Box::new(Ucb1::new(k, exploration)),
            PolicySpec::Exp3 { gain } => {
                let a = gain.unwrap_or_else(|| exp3_horizon_tuned_gain(k, horizon));
                Box::new(Exp3::new(k, a, scenario.max_reward()))
            }
            PolicySpec::Oracle => Box::new(FixedArm::oracle(scenario.optimal_arm())),
            PolicySpec::Fixed { arm } => {
                if arm >= k {
                    return Err(ScenarioError::ArmOutOfRange { got: arm, num_arms: k });
                }
                Box::new(FixedArm::new(arm))
            }
            PolicySpec::Random => Box::new(UniformRandom::new(k)),
        })
    }

    /// Resolved label, including the horizon-tuned Exp3 gain.
    pub fn label(&self, scenario: &Scenario, horizon: u64) -> String {
        self.build(scenario, horizon)
            .map(|p| p.label())
            .unwrap_or_else(|e| format!("invalid({e})"))
    }
}

/// Counter-based seed derivation (splitmix64); independent of execution order.
pub fn derive_seed(master: u64, index: u64) -> u64 {
    let mut z = master
        .wrapping_add(0x9E37_79B9_7F4A_7C15u64.wrapping_mul(index.wrapping_add(1)));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Checkpoint {
    pub slot: u64,
    pub cumulative_reward: f64,
    pub regret: f64,
}

/// Per-run decimated trace of cumulative reward and regret.
#[derive(Debug, Clone)]
pub struct RegretTrace {
    pub checkpoints: Vec<Checkpoint>,
    pub seed: u64,
    pub policy_label: String,
}

/// One finished episode: trace plus per-arm play counts.
#[derive(Debug, Clone)]
pub struct EpisodeResult {
    pub trace: RegretTrace,
    pub plays: Vec<u64>,
}

/// Runs one episode. All arms start from independent stationary draws;
/// deterministic given `seed`.
pub fn run_episode(
    scenario: &Scenario,
    policy: &mut (dyn Policy + Send),
    horizon: u64,
    seed: u64,
    checkpoint_stride: u64,
) -> EpisodeResult {
    assert!(horizon >= 1);
    assert!(checkpoint_stride >= 1);
    let mut env_rng = ChaCha8Rng::seed_from_u64(derive_seed(seed, 0));
    let mut policy_rng = ChaCha8Rng::seed_from_u64(derive_seed(seed, 1));
    let mut states: Vec<ArmState> = scenario
        .arms
        .iter()
        .map(|arm| arm.sample_stationary(&mut env_rng))
        .collect();
    let mut plays = vec![0u64; scenario.num_arms()];
    let mut cumulative = 0.0;
    let mut checkpoints = Vec::with_capacity((horizon / checkpoint_stride + 2) as usize);
    for slot in 1..=horizon {
        let probed = policy.select_arm(&mut policy_rng);
        for (arm, state) in scenario.arms.iter().zip(states.iter_mut()) {
            *state = arm.step(*state, &mut env_rng);
        }
        let observed = states[probed];
        let reward = scenario.arms[probed].reward(observed.0);
        policy.observe(probed, observed.0, reward);
        plays[probed] += 1;
        cumulative += reward;
        if slot % checkpoint_stride == 0 || slot == horizon {
            checkpoints.push(Checkpoint {
                slot,
                cumulative_reward: cumulative,
                regret: slot as f64 * scenario.best_mean - cumulative,
            });
        }
    }
    EpisodeResult {
        trace: RegretTrace {
            checkpoints,
            seed,
            policy_label: policy.label(),
        },
        plays,
    }
}

/// Aggregated Monte Carlo statistics at shared checkpoints.
#[derive(Debug, Clone)]
pub struct MonteCarloResult {
    pub slots: Vec<u64>,
    pub mean_regret: Vec<f64>,
    pub sd_regret: Vec<f64>,
    pub mean_cumulative_reward: Vec<f64>,
    /// Mean per-arm play counts at the final slot.
    pub mean_plays: Vec<f64>,
    pub runs: u64,
    pub horizon: u64,
    pub master_seed: u64,
    pub checkpoint_stride: u64,
    pub policy_label: String,
}

/// Runs `runs` independent episodes with counter-derived seeds and aggregates
/// them. Execution order (and parallelism) cannot affect the result.
pub fn monte_carlo(
    scenario: &Scenario,
    policy_spec: &PolicySpec,
    horizon: u64,
    runs: u64,
    master_seed: u64,
    checkpoint_stride: u64,
) -> Result<MonteCarloResult, ScenarioError> {
    assert!(runs >= 1);
    // Fail fast on an invalid spec before spawning work.
    policy_spec.build(scenario, horizon)?;
    let episodes: Vec<EpisodeResult> = (0..runs)
        .into_par_iter()
        .map(|j| {
            let mut policy = policy_spec
                .build(scenario, horizon)
                .expect("spec validated above");
            run_episode(
                scenario,
                policy.as_mut(),
                horizon,
                derive_seed(master_seed, j),
                checkpoint_stride,
            )
        })
        .collect();
    let slots: Vec<u64> = episodes[0]
        .trace
        .checkpoints
        .iter()
        .map(|c| c.slot)
        .collect();
    let n = slots.len();
    let runs_f = runs as f64;
    let mut mean_regret = vec![0.0; n];
    let mut mean_cumulative_reward = vec![0.0; n];
    for ep in &episodes {
        for (i, c) in ep.trace.checkpoints.iter().enumerate() {
            mean_regret[i] += c.regret;
            mean_cumulative_reward[i] += c.cumulative_reward;
        }
    }
    for v in mean_regret.iter_mut().chain(mean_cumulative_reward.iter_mut()) {
        *v /= runs_f;
    }
    let mut sd_regret = vec![0.0; n];
    if runs > 1 {
        for ep in &episodes {
            for (i, c) in ep.trace.checkpoints.iter().enumerate() {
                let d = c.regret - mean_regret[i];
                sd_regret[i] += d * d;
            }
        }
        for v in &mut sd_regret {
            *v = (*v / (runs_f - 1.0)).sqrt();
        }
    }
    let mut mean_plays = vec![0.0; scenario.num_arms()];
    for ep in &episodes {
        for (i, &p) in ep.plays.iter().enumerate() {
            mean_plays[i] += p as f64;
        }
    }
    for v in &mut mean_plays {
        *v /= runs_f;
    }
    Ok(MonteCarloResult {
        slots,
        mean_regret,
        sd_regret,
        mean_cumulative_reward,
        mean_plays,
        runs,
        horizon,
        master_seed,
        checkpoint_stride,
        policy_label: policy_spec.label(scenario, horizon),
    })
}
