//! Replicated simulated annealing in the style of the Digital Annealer.
//!
//! Each replica is an independent Metropolis chain over single bit flips.
//! The temperature decays exponentially, `T <- T (1 - beta)` every `interval`
//! iterations. A dynamic offset is subtracted from every proposed energy
//! change: it grows by `offset_rate` after each rejected proposal and drops
//! back to zero on acceptance, so a chain stuck in a local minimum is pushed
//! out of it.

use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::qubo::{FlipEvaluator, QuboMatrix};

/// Annealer settings. [`Default`] gives the Digital Annealer settings used for
/// the 1000-variable benchmark instances.
#[derive(Debug, Clone, PartialEq)]
pub struct SolverParams {
    /// Start temperature.
    pub t0: f64,
    /// Fractional temperature decay per interval, in (0, 1).
    pub beta: f64,
    /// Iterations between two temperature decays.
    pub interval: u64,
    /// Offset added after every rejected proposal.
    pub offset_rate: f64,
    /// Iterations per replica.
    pub iterations: u64,
    pub replicas: usize,
    /// Maximum number of distinct solutions returned.
    pub top_k: usize,
    pub seed: u64,
}

impl Default for SolverParams {
    fn default() -> Self {
        Self {
            t0: 1e4,
            beta: 0.2,
            interval: 1,
            offset_rate: 1e3,
            iterations: 1_000_000,
            replicas: 128,
            top_k: 128,
            seed: 0,
        }
    }
}

impl SolverParams {
    /// Each replica contributes at most two candidates: its best and its
    /// final state.
    pub const RETAINED_PER_REPLICA: usize = 2;

    pub fn validate(&self) -> Result<()> {
        if !(self.t0.is_finite() && self.t0 > 0.0) {
            return Err(Error::InvalidParams("t0 must be positive and finite"));
        }
        if !(self.beta > 0.0 && self.beta < 1.0) {
            return Err(Error::InvalidParams("beta must lie in (0, 1)"));
        }
        if self.interval == 0 {
            return Err(Error::InvalidParams("interval must be positive"));
        }
        if !(self.offset_rate.is_finite() && self.offset_rate >= 0.0) {
            return Err(Error::InvalidParams("offset_rate must be finite and >= 0"));
        }
        if self.iterations == 0 {
            return Err(Error::InvalidParams("iterations must be positive"));
        }
        if self.replicas == 0 {
            return Err(Error::InvalidParams("replicas must be positive"));
        }
        if self.top_k == 0 {
            return Err(Error::InvalidParams("top_k must be positive"));
        }
        if self.top_k > self.replicas * Self::RETAINED_PER_REPLICA {
            return Err(Error::InvalidParams(
                "top_k exceeds the number of candidates the replicas can retain",
            ));
        }
        Ok(())
    }
}

/// `t0 (1 - beta)^floor(step / interval)`.
pub fn temperature_at(params: &SolverParams, step: u64) -> f64 {
    let decays = step / params.interval.max(1);
    params.t0 * libm::pow(1.0 - params.beta, decays as f64)
}

/// Metropolis test on the offset-adjusted energy change.
#[inline]
pub fn metropolis_accept(delta: f64, temperature: f64, offset: f64, u: f64) -> bool {
    let shifted = delta - offset;
    shifted <= 0.0 || u < libm::exp(-shifted / temperature)
}

/// One bit vector and its energy under the matrix that was solved.
#[derive(Debug, Clone, PartialEq)]
pub struct Sample {
    pub bits: Vec<bool>,
    pub energy: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolveResult {
    /// Ascending by energy, unique bit vectors, at most `top_k` entries.
    pub samples: Vec<Sample>,
    /// Best energy seen by each replica, in replica order.
    pub replica_best: Vec<f64>,
}

impl SolveResult {
    pub fn best(&self) -> Option<&Sample> {
        self.samples.first()
    }
}

/// A single-objective QUBO solver. The scalarisation loop only talks to
/// solvers through this trait, so another Ising machine can be plugged in.
pub trait Solver: Sync {
    /// Solves `q`; `seed` fully determines the outcome.
    fn solve(&self, q: &QuboMatrix, seed: u64) -> Result<SolveResult>;
}

/// The simulated-annealing [`Solver`]. The per-call seed replaces
/// `params.seed`.
#[derive(Debug, Clone, Default)]
pub struct Annealer {
    pub params: SolverParams,
}

impl Annealer {
    pub fn new(params: SolverParams) -> Result<Self> {
        params.validate()?;
        Ok(Self { params })
    }
}

impl Solver for Annealer {
    fn solve(&self, q: &QuboMatrix, seed: u64) -> Result<SolveResult> {
        let params = SolverParams {
            seed,
            ..self.params.clone()
        };
        solve(q, &params)
    }
}

/// Runs all replicas and merges their best and final states.
pub fn solve(q: &QuboMatrix, params: &SolverParams) -> Result<SolveResult> {
    params.validate()?;
    let eval = FlipEvaluator::new(q);
    let outcomes = run_replicas(q, &eval, params);
    merge(q, params, outcomes)
}

/// Same result as [`solve`], never using the thread pool.
pub fn solve_serial(q: &QuboMatrix, params: &SolverParams) -> Result<SolveResult> {
    params.validate()?;
    let eval = FlipEvaluator::new(q);
    let outcomes = (0..params.replicas)
        .map(|r| run_replica(q, &eval, params, r))
        .collect();
    merge(q, params, outcomes)
}

#[cfg(feature = "parallel")]
fn run_replicas(
    q: &QuboMatrix,
    eval: &FlipEvaluator,
    params: &SolverParams,
) -> Vec<ReplicaOutcome> {
    use rayon::prelude::*;
    (0..params.replicas)
        .into_par_iter()
        .map(|r| run_replica(q, eval, params, r))
        .collect()
}

#[cfg(not(feature = "parallel"))]
fn run_replicas(
    q: &QuboMatrix,
    eval: &FlipEvaluator,
    params: &SolverParams,
) -> Vec<ReplicaOutcome> {
    (0..params.replicas)
        .map(|r| run_replica(q, eval, params, r))
        .collect()
}

struct ReplicaOutcome {
    best: Vec<bool>,
    best_energy: f64,
    last: Vec<bool>,
}

/// Random generator of replica `r`: the solve seed selects the key and the
/// replica index selects the ChaCha stream, so replicas never share draws.
fn replica_rng(seed: u64, replica: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(replica as u64);
    rng
}

/// State of one annealing chain.
pub(crate) struct Chain<'a> {
    eval: &'a FlipEvaluator,
    rng: ChaCha8Rng,
    x: Vec<bool>,
    field: Vec<f64>,
    energy: f64,
    temperature: f64,
    offset: f64,
    decay: f64,
    interval: u64,
    offset_rate: f64,
    step: u64,
}

impl<'a> Chain<'a> {
    pub(crate) fn new(
        q: &QuboMatrix,
        eval: &'a FlipEvaluator,
        params: &SolverParams,
        replica: usize,
    ) -> Self {
        let mut rng = replica_rng(params.seed, replica);
        let x: Vec<bool> = (0..eval.n()).map(|_| rng.random()).collect();
        let field = eval
            .init_fields(&x)
            .expect("state length matches evaluator")
            .as_slice()
            .to_vec();
        let energy = q.evaluate(&x).expect("state length matches matrix");
        Self {
            eval,
            rng,
            x,
            field,
            energy,
            temperature: params.t0,
            offset: 0.0,
            decay: 1.0 - params.beta,
            interval: params.interval,
            offset_rate: params.offset_rate,
            step: 0,
        }
    }

    /// One proposal. Returns whether it was accepted.
    pub(crate) fn step(&mut self) -> bool {
        if self.step > 0 && self.step.is_multiple_of(self.interval) {
            self.temperature *= self.decay;
        }
        self.step += 1;
        let i = self.rng.random_range(0..self.x.len());
        let delta = self.eval.delta_unchecked(&self.x, &self.field, i);
        // u is only drawn for uphill moves
        let accepted = delta - self.offset <= 0.0
            || metropolis_accept(delta, self.temperature, self.offset, self.rng.random());
        if accepted {
            self.eval.flip_unchecked(&mut self.x, &mut self.field, i);
            self.energy += delta;
            self.offset = 0.0;
        } else {
            self.offset += self.offset_rate;
        }
        accepted
    }

    pub(crate) fn energy(&self) -> f64 {
        self.energy
    }

    pub(crate) fn state(&self) -> &[bool] {
        &self.x
    }

    #[cfg(test)]
    pub(crate) fn offset(&self) -> f64 {
        self.offset
    }
}

fn run_replica(
    q: &QuboMatrix,
    eval: &FlipEvaluator,
    params: &SolverParams,
    replica: usize,
) -> ReplicaOutcome {
    let mut chain = Chain::new(q, eval, params, replica);
    let mut best = chain.state().to_vec();
    let mut best_energy = chain.energy();
    for _ in 0..params.iterations {
        if chain.step() && chain.energy() < best_energy {
            best_energy = chain.energy();
            best.copy_from_slice(chain.state());
        }
    }
    ReplicaOutcome {
        best,
        best_energy,
        last: chain.state().to_vec(),
    }
}

fn merge(
    q: &QuboMatrix,
    params: &SolverParams,
    outcomes: Vec<ReplicaOutcome>,
) -> Result<SolveResult> {
    let replica_best = outcomes.iter().map(|o| o.best_energy).collect();
    let mut candidates: Vec<Vec<bool>> = Vec::with_capacity(outcomes.len() * 2);
    for o in outcomes {
        candidates.push(o.best);
        candidates.push(o.last);
    }
    candidates.sort_unstable();
    candidates.dedup();
    // exact energies, so the running sums of the chains never leak out
    let mut samples = candidates
        .into_iter()
        .map(|bits| {
            let energy = q.evaluate(&bits)?;
            Ok(Sample { bits, energy })
        })
        .collect::<Result<Vec<_>>>()?;
    samples.sort_by(|a, b| {
        a.energy
            .total_cmp(&b.energy)
            .then_with(|| a.bits.cmp(&b.bits))
    });
    samples.truncate(params.top_k);
    Ok(SolveResult {
        samples,
        replica_best,
    })
}
