//! Multi-objective QUBO optimisation by weighted-sum scalarisation.
//!
//! The crate is `no_std` (it needs `alloc`). It provides:
//!
//! * [`qubo`]: dense QUBO matrices, mUBQP instances, objective evaluation,
//!   weighted aggregation and incremental single-flip energy deltas.
//! * [`anneal`]: a replicated simulated annealer with exponential cooling and a
//!   dynamic-offset escape mechanism, modelled on the Digital Annealer.
//! * [`scalarise`]: simplex-lattice (uniform), dichotomic and adaptive-averages
//!   weight generation and the outer solve loop that fills a Pareto archive.
//! * [`pareto`]: dominance, non-dominated filtering, the archive, exact
//!   hypervolume for 2 to 4 objectives and 2D attainment surfaces.
//! * [`generator`]: synthetic correlated instances and instance fingerprints.
//!
//! Enable the `parallel` feature to run annealing replicas and uniform-method
//! solver calls on the rayon pool. Results do not depend on the schedule.

#![cfg_attr(not(any(feature = "std", test)), no_std)]

extern crate alloc;

pub mod anneal;
mod error;
pub mod generator;
pub mod pareto;
pub mod qubo;
pub mod scalarise;
pub mod seed;

pub use anneal::{Annealer, Sample, SolveResult, Solver, SolverParams};
pub use error::{Error, Result};
pub use generator::{corpus_fingerprint, generate_instance, Fingerprint, GeneratorParams};
pub use pareto::{
    attainment_surface, dominates, filter_nondominated, hypervolume, ParetoArchive, ReferencePoint,
};
pub use qubo::{FieldCache, FlipEvaluator, MubqpInstance, QuboMatrix, Solution, WeightVector};
pub use scalarise::{Distance, Method, RunOutcome, ScalariseConfig, WeightRecord};
