//! Finite-state Markov-chain arms and their spectral/hitting-time analytics.
//!
//! An arm is an irreducible, aperiodic chain with strictly positive per-state
//! rewards. Construction validates the chain and precomputes everything the
//! regret-bound constants need: stationary distribution, mean reward,
//! multiplicative symmetrization, eigenvalue gaps (both conventions) and the
//! full mean-hitting-time matrix.

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use thiserror::Error;

/// Hard cap on states per arm; dense solvers only.
pub const MAX_STATES: usize = 64;

/// Row-sum / entry validation tolerance.
pub const STOCHASTIC_TOL: f64 = 1e-12;
/// Residual tolerance for the stationary-distribution solve.
pub const STATIONARY_TOL: f64 = 1e-10;
/// Symmetry tolerance for the conjugated matrix in the eigenvalue-gap solve.
pub const SPECTRAL_SYM_TOL: f64 = 1e-9;
/// Residual tolerance for the hitting-time solves.
pub const HITTING_TOL: f64 = 1e-9;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ArmError {
    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },
    #[error("chain has {0} states, maximum supported is {MAX_STATES}")]
    TooManyStates(usize),
    #[error("row {row} sums to {sum}, not 1")]
    NotStochastic { row: usize, sum: f64 },
    #[error("entry ({row},{col}) = {value} is not a probability")]
    InvalidEntry { row: usize, col: usize, value: f64 },
    #[error("chain is reducible")]
    Reducible,
    #[error("chain is periodic (period {0})")]
    Periodic(usize),
    #[error("linear system is numerically singular")]
    SingularSystem,
    #[error("conjugated matrix is not symmetric; use the symmetrized convention")]
    ComplexSpectrum,
    #[error("multiplicative symmetrization is reducible")]
    IrreducibilityViolated,
    #[error("reward vector has {got} entries, chain has {want} states")]
    RewardDimension { got: usize, want: usize },
    #[error("reward for state {0} is not strictly positive")]
    NonPositiveReward(usize),
}

/// Row-stochastic transition matrix of a validated irreducible aperiodic chain.
#[derive(Debug, Clone, PartialEq)]
pub struct TransitionMatrix {
    entries: DMatrix<f64>,
}

impl TransitionMatrix {
    /// Validates and wraps a row-major matrix of transition probabilities.
    pub fn new(rows: Vec<Vec<f64>>) -> Result<Self, ArmError> {
        let n = rows.len();
        for r in &rows {
            if r.len() != n {
                return Err(ArmError::NotSquare {
                    rows: n,
                    cols: r.len(),
                });
            }
        }
        let entries = DMatrix::from_fn(n, n, |i, j| rows[i][j]);
        Self::from_matrix(entries)
    }

    pub fn from_matrix(entries: DMatrix<f64>) -> Result<Self, ArmError> {
        let (n, m) = entries.shape();
        if n != m {
            return Err(ArmError::NotSquare { rows: n, cols: m });
        }
        if n == 0 || n > MAX_STATES {
            return Err(ArmError::TooManyStates(n));
        }
        for i in 0..n {
            let mut sum = 0.0;
            for j in 0..n {
                let p = entries[(i, j)];
                if !p.is_finite() || !(0.0..=1.0 + STOCHASTIC_TOL).contains(&p) {
                    return Err(ArmError::InvalidEntry {
                        row: i,
                        col: j,
                        value: p,
                    });
                }
                sum += p;
            }
            if (sum - 1.0).abs() > STOCHASTIC_TOL {
                return Err(ArmError::NotStochastic { row: i, sum });
            }
        }
        check_irreducible(&entries)?;
        check_aperiodic(&entries)?;
        Ok(Self { entries })
    }

    /// Convenience constructor for a two-state (Gilbert-Elliot) chain given
    /// the up- and down-transition probabilities.
    pub fn gilbert_elliot(p01: f64, p10: f64) -> Result<Self, ArmError> {
        Self::new(vec![vec![1.0 - p01, p01], vec![p10, 1.0 - p10]])
    }

    pub fn dimension(&self) -> usize {
        self.entries.nrows()
    }

    pub fn entry(&self, x: usize, y: usize) -> f64 {
        self.entries[(x, y)]
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.entries
    }
}

fn reachable(adj: &[Vec<usize>], start: usize) -> Vec<bool> {
    let mut seen = vec![false; adj.len()];
    let mut stack = vec![start];
    seen[start] = true;
    while let Some(u) = stack.pop() {
        for &v in &adj[u] {
            if !seen[v] {
                seen[v] = true;
                stack.push(v);
            }
        }
    }
    seen
}

fn adjacency(entries: &DMatrix<f64>) -> Vec<Vec<usize>> {
    let n = entries.nrows();
    (0..n)
        .map(|i| (0..n).filter(|&j| entries[(i, j)] > 0.0).collect())
        .collect()
}

/// Single communicating class: every state reaches and is reached by state 0.
fn check_irreducible(entries: &DMatrix<f64>) -> Result<(), ArmError> {
    let n = entries.nrows();
    let fwd = adjacency(entries);
    let bwd: Vec<Vec<usize>> = (0..n)
        .map(|j| (0..n).filter(|&i| entries[(i, j)] > 0.0).collect())
        .collect();
    if reachable(&fwd, 0).iter().all(|&r| r) && reachable(&bwd, 0).iter().all(|&r| r) {
        Ok(())
    } else {
        Err(ArmError::Reducible)
    }
}

/// Period via BFS levels: for an irreducible digraph the period is the gcd of
/// level[u] + 1 - level[v] over all edges (u, v). Exact, no thresholding.
fn check_aperiodic(entries: &DMatrix<f64>) -> Result<(), ArmError> {
    let n = entries.nrows();
    let adj = adjacency(entries);
    let mut level = vec![usize::MAX; n];
    let mut queue = std::collections::VecDeque::from([0usize]);
    level[0] = 0;
    while let Some(u) = queue.pop_front() {
        for &v in &adj[u] {
            if level[v] == usize::MAX {
                level[v] = level[u] + 1;
                queue.push_back(v);
            }
        }
    }
    let mut period: u64 = 0;
    for u in 0..n {
        for &v in &adj[u] {
            let diff = (level[u] as i64 + 1 - level[v] as i64).unsigned_abs();
            period = gcd(period, diff);
        }
    }
    if period == 1 {
        Ok(())
    } else {
        Err(ArmError::Periodic(period as usize))
    }
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// Validates a transition matrix; identity operation on success.
pub fn validate_chain(p: TransitionMatrix) -> Result<TransitionMatrix, ArmError> {
    // Construction already validated; re-run the checks so the operation is
    // usable on matrices deserialized through other paths.
    TransitionMatrix::from_matrix(p.entries)
}

/// Unique stationary distribution of a validated chain, solved directly by
/// replacing one balance equation with the normalization constraint.
pub fn stationary_distribution(p: &TransitionMatrix) -> Result<DVector<f64>, ArmError> {
    let n = p.dimension();
    let mut a = p.entries.transpose() - DMatrix::<f64>::identity(n, n);
    for j in 0..n {
        a[(n - 1, j)] = 1.0;
    }
    let mut b = DVector::zeros(n);
    b[n - 1] = 1.0;
    let pi = a
        .lu()
        .solve(&b)
        .ok_or(ArmError::SingularSystem)?;
    let residual = (&pi.transpose() * p.matrix() - pi.transpose()).abs().max();
    if residual > STATIONARY_TOL || pi.iter().any(|&x| x <= 0.0) {
        return Err(ArmError::SingularSystem);
    }
    Ok(pi)
}

/// Multiplicative symmetrization P_hat = P' P, where P' is the adjoint of P
/// under the stationary distribution: P'[x][y] = pi[y] P[y][x] / pi[x].
pub fn multiplicative_symmetrization(p: &TransitionMatrix, pi: &DVector<f64>) -> DMatrix<f64> {
    let n = p.dimension();
    let adjoint = DMatrix::from_fn(n, n, |x, y| pi[y] * p.entry(y, x) / pi[x]);
    adjoint * p.matrix()
}

/// Eigenvalue gap 1 - lambda_2 of a row-stochastic matrix with stationary
/// distribution `pi`, computed on the symmetric conjugate
/// D^{1/2} M D^{-1/2}. Fails with `ComplexSpectrum` when the conjugate is not
/// symmetric (raw-P mode on a non-reversible chain).
pub fn eigenvalue_gap(m: &DMatrix<f64>, pi: &DVector<f64>) -> Result<f64, ArmError> {
    let n = m.nrows();
    let sym = DMatrix::from_fn(n, n, |x, y| (pi[x] / pi[y]).sqrt() * m[(x, y)]);
    for x in 0..n {
        for y in (x + 1)..n {
            if (sym[(x, y)] - sym[(y, x)]).abs() > SPECTRAL_SYM_TOL {
                return Err(ArmError::ComplexSpectrum);
            }
        }
    }
    if n == 1 {
        return Ok(1.0);
    }
    // Force exact symmetry before the symmetric eigensolver.
    let sym = (&sym + sym.transpose()) * 0.5;
    let mut eigen: Vec<f64> = sym.symmetric_eigen().eigenvalues.iter().copied().collect();
    eigen.sort_by(|a, b| b.partial_cmp(a).unwrap());
    Ok(1.0 - eigen[1])
}

/// Mean hitting times M[x][y]: expected slots to first reach y from x, with
/// M[y][y] = 0. One dense solve per target state.
pub fn mean_hitting_times(p: &TransitionMatrix) -> Result<DMatrix<f64>, ArmError> {
    let n = p.dimension();
    let mut out = DMatrix::zeros(n, n);
    for target in 0..n {
        // System over x != target: M[x] = 1 + sum_{z != target} P[x][z] M[z].
        let others: Vec<usize> = (0..n).filter(|&x| x != target).collect();
        let k = others.len();
        if k == 0 {
            continue;
        }
        let a = DMatrix::from_fn(k, k, |i, j| {
            let delta = if i == j { 1.0 } else { 0.0 };
            delta - p.entry(others[i], others[j])
        });
        let b = DVector::from_element(k, 1.0);
        let sol = a.lu().solve(&b).ok_or(ArmError::SingularSystem)?;
        for (i, &x) in others.iter().enumerate() {
            out[(x, target)] = sol[i];
        }
    }
    // Residual check against the defining equations.
    for target in 0..n {
        for x in 0..n {
            if x == target {
                continue;
            }
            let mut rhs = 1.0;
            for z in 0..n {
                if z != target {
                    rhs += p.entry(x, z) * out[(z, target)];
                }
            }
            if (out[(x, target)] - rhs).abs() > HITTING_TOL * rhs.max(1.0) {
                return Err(ArmError::SingularSystem);
            }
        }
    }
    Ok(out)
}

/// State of one arm between slots.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ArmState(pub usize);

/// Which stochastic matrix the eigenvalue gap is taken on.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GapConvention {
    /// Gap of the multiplicative symmetrization P_hat (the theorem statement).
    Symmetrized,
    /// Gap of P itself; only defined for reversible chains.
    Raw,
}

/// A validated arm together with all derived analytics.
#[derive(Debug, Clone)]
pub struct ArmModel {
    transition: TransitionMatrix,
    rewards: Vec<f64>,
    stationary: DVector<f64>,
    mean_reward: f64,
    symmetrization: DMatrix<f64>,
    symmetrization_irreducible: bool,
    gap_symmetrized: f64,
    gap_raw: Result<f64, ArmError>,
    hitting_times: DMatrix<f64>,
    /// Cumulative row sums of the transition matrix, for inverse-CDF stepping.
    row_cdf: Vec<Vec<f64>>,
    stationary_cdf: Vec<f64>,
}

impl ArmModel {
    pub fn new(transition: TransitionMatrix, rewards: Vec<f64>) -> Result<Self, ArmError> {
        let n = transition.dimension();
        if rewards.len() != n {
            return Err(ArmError::RewardDimension {
                got: rewards.len(),
                want: n,
            });
        }
        for (x, &r) in rewards.iter().enumerate() {
            if !r.is_finite() || r <= 0.0 {
                return Err(ArmError::NonPositiveReward(x));
            }
        }
        let stationary = stationary_distribution(&transition)?;
        let mean_reward = rewards
            .iter()
            .zip(stationary.iter())
            .map(|(r, pi)| r * pi)
            .sum();
        let symmetrization = multiplicative_symmetrization(&transition, &stationary);
        let symmetrization_irreducible = check_irreducible(&symmetrization).is_ok();
        let gap_symmetrized = eigenvalue_gap(&symmetrization, &stationary)?;
        let gap_raw = eigenvalue_gap(transition.matrix(), &stationary);
        let hitting_times = mean_hitting_times(&transition)?;
        let row_cdf = (0..n)
            .map(|x| {
                let mut acc = 0.0;
                (0..n)
                    .map(|y| {
                        acc += transition.entry(x, y);
                        acc
                    })
                    .collect()
            })
            .collect();
        let mut acc = 0.0;
        let stationary_cdf = stationary
            .iter()
            .map(|&p| {
                acc += p;
                acc
            })
            .collect();
        Ok(Self {
            transition,
            rewards,
            stationary,
            mean_reward,
            symmetrization,
            symmetrization_irreducible,
            gap_symmetrized,
            gap_raw,
            hitting_times,
            row_cdf,
            stationary_cdf,
        })
    }

    pub fn gilbert_elliot(p01: f64, p10: f64, r0: f64, r1: f64) -> Result<Self, ArmError> {
        Self::new(TransitionMatrix::gilbert_elliot(p01, p10)?, vec![r0, r1])
    }

    pub fn num_states(&self) -> usize {
        self.transition.dimension()
    }

    pub fn transition(&self) -> &TransitionMatrix {
        &self.transition
    }

    pub fn reward(&self, state: usize) -> f64 {
        self.rewards[state]
    }

    pub fn rewards(&self) -> &[f64] {
        &self.rewards
    }

    pub fn stationary(&self) -> &DVector<f64> {
        &self.stationary
    }

    pub fn mean_reward(&self) -> f64 {
        self.mean_reward
    }

    pub fn symmetrization(&self) -> &DMatrix<f64> {
        &self.symmetrization
    }

    pub fn symmetrization_irreducible(&self) -> bool {
        self.symmetrization_irreducible
    }

    /// Eigenvalue gap under the requested convention. `Raw` fails with
    /// `ComplexSpectrum` on non-reversible chains; `Symmetrized` fails with
    /// `IrreducibilityViolated` when P_hat is reducible.
    pub fn eigenvalue_gap(&self, convention: GapConvention) -> Result<f64, ArmError> {
        match convention {
            GapConvention::Symmetrized => {
                if self.symmetrization_irreducible {
                    Ok(self.gap_symmetrized)
                } else {
                    Err(ArmError::IrreducibilityViolated)
                }
            }
            GapConvention::Raw => self.gap_raw.clone(),
        }
    }

    pub fn hitting_times(&self) -> &DMatrix<f64> {
        &self.hitting_times
    }

    /// Largest off-diagonal mean hitting time.
    pub fn max_hitting_time(&self) -> f64 {
        let n = self.num_states();
        let mut max = 0.0f64;
        for x in 0..n {
            for y in 0..n {
                if x != y {
                    max = max.max(self.hitting_times[(x, y)]);
                }
            }
        }
        max
    }

    pub fn min_stationary(&self) -> f64 {
        self.stationary.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max_reward(&self) -> f64 {
        self.rewards.iter().copied().fold(0.0, f64::max)
    }

    /// max over states of max(pi_x, 1 - pi_x).
    pub fn max_pi_hat(&self) -> f64 {
        self.stationary
            .iter()
            .map(|&p| p.max(1.0 - p))
            .fold(0.0, f64::max)
    }

    /// Advances the chain one slot. Consumes exactly one uniform variate and
    /// uses inverse-CDF sampling in natural state order.
    pub fn step<R: Rng + ?Sized>(&self, state: ArmState, rng: &mut R) -> ArmState {
        let u: f64 = rng.random();
        ArmState(index_from_cdf(&self.row_cdf[state.0], u))
    }

    /// Draws an initial state from the stationary distribution; one variate.
    pub fn sample_stationary<R: Rng + ?Sized>(&self, rng: &mut R) -> ArmState {
        let u: f64 = rng.random();
        ArmState(index_from_cdf(&self.stationary_cdf, u))
    }
}

fn index_from_cdf(cdf: &[f64], u: f64) -> usize {
    for (i, &c) in cdf.iter().enumerate() {
        if u < c {
            return i;
        }
    }
    cdf.len() - 1
}
