//! Command-line front end: `simulate`, `bounds`, `scenarios`.

mod scenario_file;
mod svg;

pub use scenario_file::{ArmFile, ScenarioFile, ScenarioFileError};
pub use svg::{regret_chart, ChartConfig};

use crate::arm_models::GapConvention;
use crate::regret_bounds::{BoundError, BoundReport};
use crate::sim_engine::{
    builtin_scenarios, monte_carlo, MonteCarloResult, PolicySpec, Scenario, ScenarioError,
};
use clap::{Args, Parser, Subcommand, ValueEnum};
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use thiserror::Error;

/// Env var capping Monte Carlo worker threads (default: machine parallelism).
pub const THREADS_ENV: &str = "BANDIT_LAB_THREADS";

const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Error)]
pub enum CliError {
    #[error("unknown scenario '{0}' (expected S1, S2 or a path to a JSON file)")]
    UnknownScenario(String),
    #[error("unknown policy '{0}' (expected rca, ucb1, exp3, oracle, fixed:<i> or random)")]
    UnknownPolicy(String),
    #[error("--L is required for policy '{0}'")]
    MissingExploration(String),
    #[error("--L does not apply to policy '{0}'")]
    UnexpectedExploration(String),
    #[error("--a only applies to policy exp3")]
    UnexpectedGain,
    #[error("--a must be 'auto' or a number in (0, 1], got '{0}'")]
    BadGain(String),
    #[error(transparent)]
    ScenarioFile(#[from] ScenarioFileError),
    #[error(transparent)]
    Scenario(#[from] ScenarioError),
    #[error(transparent)]
    Bound(#[from] BoundError),
    #[error("cannot write {path}: {source}")]
    Write {
        path: String,
        source: std::io::Error,
    },
    #[error("{0} is not a valid thread count")]
    BadThreadCap(String),
}

#[derive(Parser, Debug)]
#[command(name = "bandit-lab", version, about = "Restless-bandit experiment runner")]
pub struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run Monte Carlo episodes of a policy on a scenario and write a CSV
    /// regret trace (optionally an SVG chart).
    Simulate(SimulateArgs),
    /// Print the regret-bound constants and the L-threshold for a scenario.
    Bounds(BoundsArgs),
    /// List the built-in scenarios (or inspect a scenario file).
    Scenarios(ScenariosArgs),
}

#[derive(Args, Debug)]
struct SimulateArgs {
    /// S1, S2 or a path to a scenario JSON file.
    #[arg(long)]
    scenario: String,
    /// rca | ucb1 | exp3 | oracle | fixed:<i> | random.
    #[arg(long)]
    policy: String,
    /// Exploration constant for rca/ucb1.
    #[arg(long = "L")]
    exploration: Option<f64>,
    /// Exp3 mixing parameter: a number in (0, 1] or 'auto' (horizon-tuned).
    #[arg(long = "a")]
    gain: Option<String>,
    #[arg(long, default_value_t = 100_000)]
    horizon: u64,
    #[arg(long, default_value_t = 100)]
    runs: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Checkpoint stride in slots.
    #[arg(long, default_value_t = 100)]
    stride: u64,
    /// Output CSV path.
    #[arg(long)]
    out: PathBuf,
    /// Optional SVG chart path.
    #[arg(long)]
    svg: Option<PathBuf>,
    /// Use a log-scaled x axis in the SVG chart.
    #[arg(long = "svg-logx", default_value_t = false)]
    svg_logx: bool,
}

#[derive(Args, Debug)]
struct BoundsArgs {
    #[arg(long)]
    scenario: String,
    #[arg(long, value_enum, default_value_t = Convention::Symmetrized)]
    convention: Convention,
    /// Evaluate the Theorem 1/2 bounds at this exploration constant.
    #[arg(long = "L")]
    exploration: Option<f64>,
    /// Horizon for the bound evaluation.
    #[arg(long)]
    n: Option<u64>,
}

#[derive(Args, Debug)]
struct ScenariosArgs {
    /// Also list a scenario loaded from this JSON file.
    #[arg(long)]
    scenario: Option<PathBuf>,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq)]
enum Convention {
    Symmetrized,
    Raw,
}

impl From<Convention> for GapConvention {
    fn from(c: Convention) -> Self {
        match c {
            Convention::Symmetrized => GapConvention::Symmetrized,
            Convention::Raw => GapConvention::Raw,
        }
    }
}

/// Parses argv and runs the requested subcommand.
pub fn run<I, T>(args: I) -> Result<(), CliError>
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = Cli::parse_from(args);
    match cli.command {
        Command::Simulate(args) => cmd_simulate(args),
        Command::Bounds(args) => cmd_bounds(args),
        Command::Scenarios(args) => cmd_scenarios(args),
    }
}

fn load_scenario(spec: &str) -> Result<Scenario, CliError> {
    match spec {
        "S1" | "s1" => Ok(crate::sim_engine::scenario_s1()),
        "S2" | "s2" => Ok(crate::sim_engine::scenario_s2()),
        other => {
            let path = Path::new(other);
            if path.exists() {
                Ok(ScenarioFile::load(path)?.into_scenario()?)
            } else {
                Err(CliError::UnknownScenario(other.to_string()))
            }
        }
    }
}

fn parse_policy(args: &SimulateArgs, scenario: &Scenario) -> Result<PolicySpec, CliError> {
    let name = args.policy.as_str();
    let needs_exploration = matches!(name, "rca" | "ucb1");
    if !needs_exploration && args.exploration.is_some() {
        return Err(CliError::UnexpectedExploration(name.to_string()));
    }
    if name != "exp3" && args.gain.is_some() {
        return Err(CliError::UnexpectedGain);
    }
    match name {
        "rca" | "ucb1" => {
            let exploration = args
                .exploration
                .ok_or_else(|| CliError::MissingExploration(name.to_string()))?;
            Ok(if name == "rca" {
                PolicySpec::Rca { exploration }
            } else {
                PolicySpec::Ucb1 { exploration }
            })
        }
        "exp3" => {
            let gain = match args.gain.as_deref() {
                None | Some("auto") => None,
                Some(text) => {
                    let a: f64 = text
                        .parse()
                        .map_err(|_| CliError::BadGain(text.to_string()))?;
                    if !(a > 0.0 && a <= 1.0) {
                        return Err(CliError::BadGain(text.to_string()));
                    }
                    Some(a)
                }
            };
            Ok(PolicySpec::Exp3 { gain })
        }
        "oracle" => Ok(PolicySpec::Oracle),
        "random" => Ok(PolicySpec::Random),
        other => {
            if let Some(index) = other.strip_prefix("fixed:") {
                let arm: usize = index
                    .parse()
                    .map_err(|_| CliError::UnknownPolicy(other.to_string()))?;
                if arm < 1 || arm > scenario.num_arms() {
                    return Err(CliError::Scenario(ScenarioError::ArmOutOfRange {
                        got: arm.saturating_sub(1),
                        num_arms: scenario.num_arms(),
                    }));
                }
                Ok(PolicySpec::Fixed { arm: arm - 1 })
            } else {
                Err(CliError::UnknownPolicy(other.to_string()))
            }
        }
    }
}

fn thread_pool() -> Result<Option<rayon::ThreadPool>, CliError> {
    match std::env::var(THREADS_ENV) {
        Ok(value) => {
            let threads: usize = value
                .parse()
                .ok()
                .filter(|&t| t >= 1)
                .ok_or(CliError::BadThreadCap(value))?;
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(threads)
                .build()
                .expect("thread pool");
            Ok(Some(pool))
        }
        Err(_) => Ok(None),
    }
}

/// 9-significant-digit, locale-independent float rendering.
fn fmt_sig(x: f64) -> String {
    format!("{x:.8e}")
}

/// Renders the CSV document: `# key=value` manifest, header, data rows, and
/// a trailing per-arm mean-plays summary block.
pub fn render_csv(scenario: &Scenario, result: &MonteCarloResult) -> String {
    let file = ScenarioFile::from_scenario(scenario);
    let mut out = String::new();
    let _ = writeln!(out, "# scenario={}", scenario.name());
    let _ = writeln!(out, "# scenario_hash={}", file.fingerprint());
    let _ = writeln!(out, "# policy={}", result.policy_label);
    let _ = writeln!(out, "# horizon={}", result.horizon);
    let _ = writeln!(out, "# runs={}", result.runs);
    let _ = writeln!(out, "# seed={}", result.master_seed);
    let _ = writeln!(out, "# stride={}", result.checkpoint_stride);
    let _ = writeln!(out, "# version={VERSION}");
    let _ = writeln!(out, "t,mean_regret,sd_regret,mean_cum_reward");
    for (i, &t) in result.slots.iter().enumerate() {
        let _ = writeln!(
            out,
            "{t},{},{},{}",
            fmt_sig(result.mean_regret[i]),
            fmt_sig(result.sd_regret[i]),
            fmt_sig(result.mean_cumulative_reward[i])
        );
    }
    let _ = writeln!(out, "# summary");
    for (i, plays) in result.mean_plays.iter().enumerate() {
        let _ = writeln!(out, "# mean_plays_{}={}", i + 1, fmt_sig(*plays));
    }
    out
}

fn write_file(path: &Path, content: &str) -> Result<(), CliError> {
    std::fs::write(path, content).map_err(|source| CliError::Write {
        path: path.display().to_string(),
        source,
    })
}

fn cmd_simulate(args: SimulateArgs) -> Result<(), CliError> {
    let scenario = load_scenario(&args.scenario)?;
    let spec = parse_policy(&args, &scenario)?;
    let run_mc = || {
        monte_carlo(
            &scenario,
            &spec,
            args.horizon,
            args.runs,
            args.seed,
            args.stride,
        )
    };
    let result = match thread_pool()? {
        Some(pool) => pool.install(run_mc),
        None => run_mc(),
    }?;
    write_file(&args.out, &render_csv(&scenario, &result))?;
    if let Some(svg_path) = &args.svg {
        let chart = regret_chart(
            &result.slots,
            &result.mean_regret,
            &ChartConfig {
                title: format!("{} on {}: mean regret", result.policy_label, scenario.name()),
                log_x: args.svg_logx,
            },
        );
        write_file(svg_path, &chart)?;
    }
    Ok(())
}

fn cmd_bounds(args: BoundsArgs) -> Result<(), CliError> {
    let scenario = load_scenario(&args.scenario)?;
    let convention: GapConvention = args.convention.into();
    let report = BoundReport::new(&scenario, convention)?;
    println!("scenario: {}", scenario.name());
    println!("convention: {:?}", convention);
    println!("mu_star: {} (arm {})", report.best_mean, report.optimal_arm + 1);
    println!("pi_min: {}", report.min_stationary);
    println!("r_max: {}", report.max_reward);
    println!("S_max: {}", report.max_states);
    println!("pi_hat_max: {}", report.max_pi_hat);
    println!("eps_min: {}", report.min_eigenvalue_gap);
    println!("beta: {}", report.beta);
    println!("F: {}", report.f);
    println!("L_threshold: {}", report.l_threshold);
    println!("arm,mu,pi_min,M_max,eps,C,D,E");
    for (i, a) in report.arms.iter().enumerate() {
        println!(
            "{},{},{},{},{},{},{},{}",
            i + 1,
            a.mean_reward,
            a.min_stationary,
            a.max_hitting_time,
            a.eigenvalue_gap,
            a.c,
            a.d,
            a.e
        );
    }
    if let (Some(l), Some(n)) = (args.exploration, args.n) {
        if !report.meets_threshold(l) {
            eprintln!(
                "warning: L = {l} is below the threshold {}; the logarithmic bound is not guaranteed",
                report.l_threshold
            );
        }
        println!("theorem1_bound(L={l}, n={n}): {}", report.theorem1_bound(l, n));
        println!("theorem2_bound(L={l}, n={n}): {}", report.theorem2_bound(l, n));
    }
    Ok(())
}

fn list_scenario(scenario: &Scenario) {
    println!(
        "{}: {} arms, optimal arm {} (mu* = {})",
        scenario.name(),
        scenario.num_arms(),
        scenario.optimal_arm() + 1,
        scenario.best_mean()
    );
    for (i, arm) in scenario.arms().iter().enumerate() {
        if arm.num_states() == 2 {
            println!(
                "  arm {}: p01={} p10={} r=({}, {}) pi1={} mu={}",
                i + 1,
                arm.transition().entry(0, 1),
                arm.transition().entry(1, 0),
                arm.reward(0),
                arm.reward(1),
                arm.stationary()[1],
                arm.mean_reward()
            );
        } else {
            println!(
                "  arm {}: {} states mu={}",
                i + 1,
                arm.num_states(),
                arm.mean_reward()
            );
        }
    }
}

fn cmd_scenarios(args: ScenariosArgs) -> Result<(), CliError> {
    for scenario in builtin_scenarios() {
        list_scenario(&scenario);
    }
    if let Some(path) = &args.scenario {
        let scenario = ScenarioFile::load(path)?.into_scenario()?;
        list_scenario(&scenario);
    }
    Ok(())
}
