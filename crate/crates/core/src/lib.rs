//! Restless multi-armed bandit experimentation framework.
//!
//! Arms are finite-state irreducible aperiodic Markov chains whose states
//! keep evolving whether or not they are probed. The crate provides:
//!
//! - [`arm_models`]: chain validation plus the spectral and hitting-time
//!   analytics (stationary distribution, multiplicative symmetrization,
//!   eigenvalue gaps, mean hitting times);
//! - [`policies`]: the regenerative cycle algorithm (RCA) and the UCB1,
//!   Exp3, fixed-arm and uniform-random baselines behind one
//!   select/observe contract;
//! - [`regret_bounds`]: the finite-time logarithmic regret-bound constants
//!   and the exploration-constant threshold;
//! - [`sim_engine`]: seeded, order-independent Monte Carlo episode runner;
//! - [`cli`]: the `bandit-lab` command-line front end with CSV/SVG output.

pub mod arm_models;
pub mod cli;
pub mod policies;
pub mod regret_bounds;
pub mod sim_engine;
