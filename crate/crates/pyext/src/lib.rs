//! Python bindings: scenarios, bound reports, and Monte Carlo simulation.

use bandit_lab::arm_models::{ArmModel, GapConvention, TransitionMatrix};
use bandit_lab::regret_bounds::BoundReport;
use bandit_lab::sim_engine::{builtin_scenarios, monte_carlo, PolicySpec, Scenario as CoreScenario};
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::PyDict;

fn parse_convention(name: &str) -> PyResult<GapConvention> {
    match name {
        "symmetrized" => Ok(GapConvention::Symmetrized),
        "raw" => Ok(GapConvention::Raw),
        other => Err(PyValueError::new_err(format!(
            "unknown convention {other:?}; expected \"symmetrized\" or \"raw\""
        ))),
    }
}

/// A fixed set of restless arms plus derived optima.
#[pyclass(name = "Scenario", frozen)]
struct PyScenario {
    inner: CoreScenario,
}

#[pymethods]
impl PyScenario {
    /// Builds a scenario from per-arm transition matrices and reward vectors.
    #[new]
    fn new(
        name: String,
        transitions: Vec<Vec<Vec<f64>>>,
        rewards: Vec<Vec<f64>>,
    ) -> PyResult<Self> {
        if transitions.len() != rewards.len() {
            return Err(PyValueError::new_err(
                "transitions and rewards must have one entry per arm",
            ));
        }
        let arms = transitions
            .into_iter()
            .zip(rewards)
            .enumerate()
            .map(|(i, (p, r))| {
                let p = TransitionMatrix::new(p)
                    .map_err(|e| PyValueError::new_err(format!("arm {}: {e}", i + 1)))?;
                ArmModel::new(p, r)
                    .map_err(|e| PyValueError::new_err(format!("arm {}: {e}", i + 1)))
            })
            .collect::<PyResult<Vec<_>>>()?;
        let inner = CoreScenario::new(&name, arms)
            .map_err(|e| PyValueError::new_err(e.to_string()))?;
        Ok(Self { inner })
    }

    /// Looks up one of the built-in scenarios ("S1" or "S2").
    #[staticmethod]
    fn builtin(name: &str) -> PyResult<Self> {
        builtin_scenarios()
            .into_iter()
            .find(|s| s.name().eq_ignore_ascii_case(name))
            .map(|inner| Self { inner })
            .ok_or_else(|| PyValueError::new_err(format!("no built-in scenario named {name:?}")))
    }

    #[getter]
    fn name(&self) -> String {
        self.inner.name().to_string()
    }

    #[getter]
    fn num_arms(&self) -> usize {
        self.inner.num_arms()
    }

    /// Index (0-based) of the arm with the highest stationary mean reward.
    #[getter]
    fn optimal_arm(&self) -> usize {
        self.inner.optimal_arm()
    }

    #[getter]
    fn best_mean(&self) -> f64 {
        self.inner.best_mean()
    }

    #[getter]
    fn mean_rewards(&self) -> Vec<f64> {
        self.inner.arms().iter().map(|a| a.mean_reward()).collect()
    }

    fn stationary(&self, arm: usize) -> PyResult<Vec<f64>> {
        self.inner
            .arms()
            .get(arm)
            .map(|a| a.stationary().iter().copied().collect())
            .ok_or_else(|| PyValueError::new_err(format!("arm index {arm} out of range")))
    }

    fn __repr__(&self) -> String {
        format!(
            "Scenario(name={:?}, num_arms={}, best_mean={})",
            self.inner.name(),
            self.inner.num_arms(),
            self.inner.best_mean()
        )
    }
}

fn parse_policy(
    policy: &str,
    exploration: Option<f64>,
    gain: Option<f64>,
) -> PyResult<PolicySpec> {
    let needs_l = || {
        exploration.ok_or_else(|| {
            PyValueError::new_err(format!("policy {policy:?} requires exploration="))
        })
    };
    let spec = match policy {
        "rca" => PolicySpec::Rca { exploration: needs_l()? },
        "ucb1" => PolicySpec::Ucb1 { exploration: needs_l()? },
        "exp3" => PolicySpec::Exp3 { gain },
        "oracle" => PolicySpec::Oracle,
        "random" => PolicySpec::Random,
        other => {
            if let Some(arm) = other.strip_prefix("fixed:") {
                let arm: usize = arm
                    .parse()
                    .map_err(|_| PyValueError::new_err(format!("bad arm number in {other:?}")))?;
                if arm == 0 {
                    return Err(PyValueError::new_err("fixed arm numbers are 1-based"));
                }
                PolicySpec::Fixed { arm: arm - 1 }
            } else {
                return Err(PyValueError::new_err(format!(
                    "unknown policy {other:?}; expected rca, ucb1, exp3, oracle, random, or fixed:<n>"
                )));
            }
        }
    };
    if !matches!(spec, PolicySpec::Rca { .. } | PolicySpec::Ucb1 { .. }) && exploration.is_some() {
        return Err(PyValueError::new_err(format!(
            "exploration= does not apply to policy {policy:?}"
        )));
    }
    if !matches!(spec, PolicySpec::Exp3 { .. }) && gain.is_some() {
        return Err(PyValueError::new_err(format!(
            "gain= does not apply to policy {policy:?}"
        )));
    }
    Ok(spec)
}

/// Runs a Monte Carlo experiment and returns the aggregated trace as a dict.
#[pyfunction]
#[pyo3(signature = (scenario, policy, *, exploration=None, gain=None, horizon=100_000, runs=100, seed=0, stride=100))]
#[allow(clippy::too_many_arguments)]
fn simulate<'py>(
    py: Python<'py>,
    scenario: &PyScenario,
    policy: &str,
    exploration: Option<f64>,
    gain: Option<f64>,
    horizon: u64,
    runs: u64,
    seed: u64,
    stride: u64,
) -> PyResult<Bound<'py, PyDict>> {
    let spec = parse_policy(policy, exploration, gain)?;
    let result = py
        .detach(|| monte_carlo(&scenario.inner, &spec, horizon, runs, seed, stride))
        .map_err(|e| PyValueError::new_err(e.to_string()))?;
    let out = PyDict::new(py);
    out.set_item("policy", result.policy_label)?;
    out.set_item("slots", result.slots)?;
    out.set_item("mean_regret", result.mean_regret)?;
    out.set_item("sd_regret", result.sd_regret)?;
    out.set_item("mean_cumulative_reward", result.mean_cumulative_reward)?;
    out.set_item("mean_plays", result.mean_plays)?;
    out.set_item("runs", result.runs)?;
    out.set_item("horizon", result.horizon)?;
    out.set_item("seed", result.master_seed)?;
    Ok(out)
}

/// Bound constants and evaluated bounds for a scenario, as a dict.
#[pyfunction]
#[pyo3(signature = (scenario, *, convention="symmetrized", exploration=None, horizon=100_000))]
fn bounds<'py>(
    py: Python<'py>,
    scenario: &PyScenario,
    convention: &str,
    exploration: Option<f64>,
    horizon: u64,
) -> PyResult<Bound<'py, PyDict>> {
    let convention = parse_convention(convention)?;
    let report = BoundReport::new(&scenario.inner, convention)
        .map_err(|e| PyValueError::new_err(e.to_string()))?;
    let out = PyDict::new(py);
    out.set_item("l_threshold", report.l_threshold)?;
    out.set_item("f", report.f)?;
    out.set_item("beta", report.beta)?;
    out.set_item("best_mean", report.best_mean)?;
    out.set_item("optimal_arm", report.optimal_arm)?;
    out.set_item("min_eigenvalue_gap", report.min_eigenvalue_gap)?;
    let arms: Vec<Bound<'py, PyDict>> = report
        .arms
        .iter()
        .map(|a| {
            let d = PyDict::new(py);
            d.set_item("mean_reward", a.mean_reward)?;
            d.set_item("eigenvalue_gap", a.eigenvalue_gap)?;
            d.set_item("c", a.c)?;
            d.set_item("d", a.d)?;
            d.set_item("e", a.e)?;
            Ok(d)
        })
        .collect::<PyResult<_>>()?;
    out.set_item("arms", arms)?;
    let l = exploration.unwrap_or(report.l_threshold);
    out.set_item("exploration", l)?;
    out.set_item("meets_threshold", report.meets_threshold(l))?;
    out.set_item("theorem1_bound", report.theorem1_bound(l, horizon))?;
    out.set_item("theorem2_bound", report.theorem2_bound(l, horizon))?;
    Ok(out)
}

/// Sample-mean-plus-padding index over regenerative-cycle statistics.
#[pyfunction]
fn rca_index(r_total: f64, t2_arm: u64, t2: u64, exploration: f64) -> f64 {
    bandit_lab::policies::rca_index(r_total, t2_arm, t2, exploration)
}

/// Horizon-tuned Exp3 mixing parameter.
#[pyfunction]
fn exp3_horizon_tuned_gain(num_arms: usize, horizon: u64) -> f64 {
    bandit_lab::policies::exp3_horizon_tuned_gain(num_arms, horizon)
}

#[pymodule]
fn bandit_lab_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyScenario>()?;
    m.add_function(wrap_pyfunction!(simulate, m)?)?;
    m.add_function(wrap_pyfunction!(bounds, m)?)?;
    m.add_function(wrap_pyfunction!(rca_index, m)?)?;
    m.add_function(wrap_pyfunction!(exp3_horizon_tuned_gain, m)?)?;
    Ok(())
}
