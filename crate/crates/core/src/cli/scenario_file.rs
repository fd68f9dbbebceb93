//! JSON scenario ingestion.
//!
//! Format: { "name": ..., "arms": [ { "transition": [[row], ...],
//! "rewards": [...], "states": [labels]? } ] }. Matrices are row-major.

use crate::arm_models::{ArmModel, TransitionMatrix};
use crate::sim_engine::{Scenario, ScenarioError};
use serde::{Deserialize, Serialize};
use std::path::Path;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ScenarioFileError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("{path}: {source}")]
    Parse {
        path: String,
        source: serde_json::Error,
    },
    #[error("arm {arm}: {source}")]
    Arm { arm: usize, source: ScenarioError },
    #[error("{0}")]
    Scenario(ScenarioError),
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ScenarioFile {
    pub name: String,
    pub arms: Vec<ArmFile>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ArmFile {
    pub transition: Vec<Vec<f64>>,
    pub rewards: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub states: Option<Vec<String>>,
}

impl ScenarioFile {
    pub fn load(path: &Path) -> Result<Self, ScenarioFileError> {
        let text = std::fs::read_to_string(path).map_err(|source| ScenarioFileError::Io {
            path: path.display().to_string(),
            source,
        })?;
        serde_json::from_str(&text).map_err(|source| ScenarioFileError::Parse {
            path: path.display().to_string(),
            source,
        })
    }

    pub fn into_scenario(self) -> Result<Scenario, ScenarioFileError> {
        let mut arms = Vec::with_capacity(self.arms.len());
        for (i, arm) in self.arms.into_iter().enumerate() {
            let model = TransitionMatrix::new(arm.transition)
                .and_then(|t| ArmModel::new(t, arm.rewards))
                .map_err(|e| ScenarioFileError::Arm {
                    arm: i + 1,
                    source: ScenarioError::Arm(e),
                })?;
            arms.push(model);
        }
        Scenario::new(self.name, arms).map_err(ScenarioFileError::Scenario)
    }

    /// Canonical representation of a scenario for hashing and round-trips.
    pub fn from_scenario(scenario: &Scenario) -> Self {
        Self {
            name: scenario.name().to_string(),
            arms: scenario
                .arms()
                .iter()
                .map(|arm| {
                    let n = arm.num_states();
                    ArmFile {
                        transition: (0..n)
                            .map(|x| (0..n).map(|y| arm.transition().entry(x, y)).collect())
                            .collect(),
                        rewards: arm.rewards().to_vec(),
                        states: None,
                    }
                })
                .collect(),
        }
    }

    /// FNV-1a over the canonical JSON encoding.
    pub fn fingerprint(&self) -> String {
        let json = serde_json::to_string(self).expect("scenario serializes");
        let mut hash: u64 = 0xcbf2_9ce4_8422_2325;
        for b in json.as_bytes() {
            hash ^= u64::from(*b);
            hash = hash.wrapping_mul(0x0000_0100_0000_01b3);
        }
        format!("{hash:016x}")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sim_engine::scenario_s1;

    #[test]
    fn round_trips_builtin() {
        let file = ScenarioFile::from_scenario(&scenario_s1());
        let json = serde_json::to_string(&file).unwrap();
        let parsed: ScenarioFile = serde_json::from_str(&json).unwrap();
        let scenario = parsed.into_scenario().unwrap();
        assert_eq!(scenario.num_arms(), 5);
        assert_eq!(scenario.optimal_arm(), 1);
    }

    #[test]
    fn fingerprint_is_stable_and_distinguishing() {
        let a = ScenarioFile::from_scenario(&scenario_s1());
        let b = ScenarioFile::from_scenario(&crate::sim_engine::scenario_s2());
        assert_eq!(a.fingerprint(), a.fingerprint());
        assert_ne!(a.fingerprint(), b.fingerprint());
    }

    #[test]
    fn reports_offending_arm() {
        let file = ScenarioFile {
            name: "bad".into(),
            arms: vec![
                ArmFile {
                    transition: vec![vec![0.5, 0.5], vec![0.5, 0.5]],
                    rewards: vec![0.1, 1.0],
                    states: None,
                },
                ArmFile {
                    transition: vec![vec![1.0, 0.0], vec![0.0, 1.0]],
                    rewards: vec![0.1, 1.0],
                    states: None,
                },
            ],
        };
        let err = file.into_scenario().unwrap_err();
        assert!(matches!(err, ScenarioFileError::Arm { arm: 2, .. }));
    }
}
