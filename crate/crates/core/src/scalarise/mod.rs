//! Weighted-sum scalarisation: weight generation and the outer solve loop.
//!
//! Three ways to pick the weights are supported:
//!
//! * [`Method::Uniform`]: a simplex lattice fixed up front, solved in any order.
//! * [`Method::Dichotomic`]: two objectives only; each new weight is normal to
//!   the largest gap between adjacent stored solutions.
//! * [`Method::Averages`]: any number of objectives; each new weight is the
//!   midpoint of the two lexicographically adjacent explored weights whose
//!   best solutions lie farthest apart.
//!
//! Every solver call is seeded from the run seed and the exact weight vector,
//! so the uniform method's result does not depend on the order of its weights
//! and methods that share a weight share the solver outcome for it.

use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::anneal::Solver;
use crate::error::{Error, Result};
use crate::pareto::ParetoArchive;
use crate::qubo::{MubqpInstance, Solution, WeightVector};
use crate::seed;

mod adaptive;
mod lattice;

pub use adaptive::{
    averages_next_weight, dichotomic_next_weight, dichotomic_raw_weight, DUPLICATE_TOLERANCE,
};
pub use lattice::{lattice_degree_for, lattice_size, simplex_lattice};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Method {
    Uniform,
    Dichotomic,
    Averages,
}

/// Distance between cost vectors used to rank gaps.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Distance {
    Manhattan,
    Euclidean,
}

impl Distance {
    pub(crate) fn measure(self, u: &[f64], v: &[f64]) -> f64 {
        let diffs = u.iter().zip(v).map(|(a, b)| a - b);
        match self {
            Distance::Manhattan => diffs.map(f64::abs).sum(),
            Distance::Euclidean => libm::sqrt(diffs.map(|d| d * d).sum()),
        }
    }
}

/// L1 or L2 distance between two equally long vectors.
pub fn distance(u: &[f64], v: &[f64], metric: Distance) -> Result<f64> {
    if u.len() != v.len() {
        return Err(Error::DimensionMismatch {
            expected: u.len(),
            found: v.len(),
        });
    }
    Ok(metric.measure(u, v))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ScalariseConfig {
    pub method: Method,
    /// Ignored by the uniform method; the dichotomic method always uses
    /// Euclidean gaps.
    pub distance: Distance,
    pub n_weights: usize,
}

impl ScalariseConfig {
    pub fn validate(&self, m: usize) -> Result<()> {
        match self.method {
            Method::Uniform => lattice_degree_for(self.n_weights, m).map(|_| ()),
            Method::Dichotomic => {
                if m != 2 {
                    return Err(Error::ObjectiveCountMismatch {
                        required: 2,
                        found: m,
                    });
                }
                if self.n_weights < 2 {
                    return Err(Error::TooFewWeights {
                        required: 2,
                        found: self.n_weights,
                    });
                }
                Ok(())
            }
            Method::Averages => {
                if self.n_weights < m {
                    return Err(Error::TooFewWeights {
                        required: m,
                        found: self.n_weights,
                    });
                }
                Ok(())
            }
        }
    }
}

/// The explored weight and the best solution its solver call returned.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightRecord {
    pub weight: WeightVector,
    pub best: Solution,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunOutcome {
    /// Weights in the order they were solved.
    pub weights: Vec<WeightVector>,
    pub records: Vec<WeightRecord>,
    /// Filtered down to non-dominated solutions.
    pub archive: ParetoArchive,
    /// Adaptive steps that fell back to a random simplex weight.
    pub fallbacks: usize,
}

/// Runs the configured method with `solver`.
pub fn run<S: Solver>(
    instance: &MubqpInstance,
    config: &ScalariseConfig,
    solver: &S,
    run_seed: u64,
) -> Result<RunOutcome> {
    match config.method {
        Method::Uniform => run_uniform(instance, config, solver, run_seed),
        Method::Dichotomic => run_dichotomic(instance, config, solver, run_seed),
        Method::Averages => run_averages(instance, config, solver, run_seed),
    }
}

/// Aggregates, solves and lifts every returned sample to a [`Solution`]
/// with its cost vector. The first solution is the solver's best.
pub fn solve_weighted<S: Solver>(
    instance: &MubqpInstance,
    weight: &WeightVector,
    solver: &S,
    run_seed: u64,
) -> Result<Vec<Solution>> {
    let q = instance.aggregate(weight)?;
    let result = solver.solve(&q, seed::weight_seed(run_seed, weight.as_slice()))?;
    if result.samples.is_empty() {
        return Err(Error::EmptySolverResult);
    }
    result
        .samples
        .into_iter()
        .map(|s| {
            let costs = instance.costs(&s.bits)?;
            Ok(Solution {
                bits: s.bits,
                costs,
                energy: s.energy,
            })
        })
        .collect()
}

/// Simplex-lattice weights, one solver call each.
pub fn run_uniform<S: Solver>(
    instance: &MubqpInstance,
    config: &ScalariseConfig,
    solver: &S,
    run_seed: u64,
) -> Result<RunOutcome> {
    let m = instance.m();
    let h = lattice_degree_for(config.n_weights, m)?;
    let weights = simplex_lattice(h, m)?;
    run_fixed(instance, weights, solver, run_seed)
}

/// Solves every weight of a fixed list. The archive does not depend on the
/// order of `weights`.
pub fn run_fixed<S: Solver>(
    instance: &MubqpInstance,
    weights: Vec<WeightVector>,
    solver: &S,
    run_seed: u64,
) -> Result<RunOutcome> {
    let results = solve_all(instance, &weights, solver, run_seed)?;
    let mut archive = ParetoArchive::new(instance.m());
    let mut records = Vec::with_capacity(weights.len());
    for (index, (weight, solutions)) in weights.iter().zip(results).enumerate() {
        records.push(WeightRecord {
            weight: weight.clone(),
            best: solutions[0].clone(),
        });
        for s in solutions {
            archive.insert(s, index)?;
        }
    }
    archive.finalize();
    Ok(RunOutcome {
        weights,
        records,
        archive,
        fallbacks: 0,
    })
}

#[cfg(feature = "parallel")]
fn solve_all<S: Solver>(
    instance: &MubqpInstance,
    weights: &[WeightVector],
    solver: &S,
    run_seed: u64,
) -> Result<Vec<Vec<Solution>>> {
    use rayon::prelude::*;
    weights
        .par_iter()
        .map(|w| solve_weighted(instance, w, solver, run_seed))
        .collect()
}

#[cfg(not(feature = "parallel"))]
fn solve_all<S: Solver>(
    instance: &MubqpInstance,
    weights: &[WeightVector],
    solver: &S,
    run_seed: u64,
) -> Result<Vec<Vec<Solution>>> {
    weights
        .iter()
        .map(|w| solve_weighted(instance, w, solver, run_seed))
        .collect()
}

/// Dichotomic search; two objectives only.
pub fn run_dichotomic<S: Solver>(
    instance: &MubqpInstance,
    config: &ScalariseConfig,
    solver: &S,
    run_seed: u64,
) -> Result<RunOutcome> {
    config.validate(instance.m())?;
    run_adaptive(instance, config, solver, run_seed, dichotomic_next_weight)
}

/// Adaptive averages under `config.distance`.
pub fn run_averages<S: Solver>(
    instance: &MubqpInstance,
    config: &ScalariseConfig,
    solver: &S,
    run_seed: u64,
) -> Result<RunOutcome> {
    config.validate(instance.m())?;
    let metric = config.distance;
    run_adaptive(instance, config, solver, run_seed, |records| {
        averages_next_weight(records, metric)
    })
}

fn run_adaptive<S: Solver>(
    instance: &MubqpInstance,
    config: &ScalariseConfig,
    solver: &S,
    run_seed: u64,
    next_weight: impl Fn(&[WeightRecord]) -> Result<WeightVector>,
) -> Result<RunOutcome> {
    let m = instance.m();
    let initial = simplex_lattice(1, m)?;
    let mut fallback_rng =
        ChaCha8Rng::seed_from_u64(seed::combine(run_seed, seed::tag(b"random-simplex-weight")));
    let mut archive = ParetoArchive::new(m);
    let mut records: Vec<WeightRecord> = Vec::with_capacity(config.n_weights);
    let mut weights = Vec::with_capacity(config.n_weights);
    let mut fallbacks = 0;

    for call in 0..config.n_weights {
        let weight = match initial.get(call) {
            Some(w) => w.clone(),
            None => match next_weight(&records) {
                Ok(w) => w,
                Err(err) => {
                    fallbacks += 1;
                    let w = random_simplex_weight(m, &mut fallback_rng)?;
                    log::warn!(
                        "weight {call}: {err}; falling back to random weight {:?}",
                        w.as_slice()
                    );
                    w
                }
            },
        };
        let solutions = solve_weighted(instance, &weight, solver, run_seed)?;
        records.push(WeightRecord {
            weight: weight.clone(),
            best: solutions[0].clone(),
        });
        for s in solutions {
            archive.insert(s, call)?;
        }
        weights.push(weight);
    }
    archive.finalize();
    Ok(RunOutcome {
        weights,
        records,
        archive,
        fallbacks,
    })
}

/// Uniform draw from the simplex (flat Dirichlet via normalised exponentials).
pub fn random_simplex_weight<R: Rng + ?Sized>(m: usize, rng: &mut R) -> Result<WeightVector> {
    let draws: Vec<f64> = (0..m)
        .map(|_| -libm::log(1.0 - rng.random::<f64>()))
        .collect();
    let total: f64 = draws.iter().sum();
    if total <= 0.0 {
        return Ok(WeightVector::unit(m, 0));
    }
    WeightVector::new(draws.into_iter().map(|d| d / total).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::anneal::{Annealer, SolverParams};
    use crate::generator::{generate_instance, GeneratorParams};

    fn instance(m: usize, n: usize, seed: u64) -> MubqpInstance {
        generate_instance(&GeneratorParams {
            n,
            m,
            rho: -0.2,
            density: 0.8,
            coeff_bound: 100,
            seed,
        })
        .unwrap()
    }

    fn solver() -> Annealer {
        Annealer::new(SolverParams {
            t0: 1e3,
            interval: 40,
            offset_rate: 50.0,
            iterations: 2_000,
            replicas: 4,
            top_k: 4,
            ..SolverParams::default()
        })
        .unwrap()
    }

    fn config(method: Method, distance: Distance, n_weights: usize) -> ScalariseConfig {
        ScalariseConfig {
            method,
            distance,
            n_weights,
        }
    }

    fn on_simplex(w: &WeightVector) -> bool {
        let sum: f64 = w.as_slice().iter().sum();
        (sum - 1.0).abs() <= 1e-9 && w.as_slice().iter().all(|l| (0.0..=1.0).contains(l))
    }

    /// Counts calls, otherwise delegates.
    struct Counting<S> {
        inner: S,
        calls: core::sync::atomic::AtomicUsize,
    }

    impl<S: Solver> Solver for Counting<S> {
        fn solve(&self, q: &crate::QuboMatrix, seed: u64) -> Result<crate::SolveResult> {
            self.calls
                .fetch_add(1, core::sync::atomic::Ordering::SeqCst);
            self.inner.solve(q, seed)
        }
    }

    #[test]
    fn distances() {
        assert_eq!(
            distance(&[0.0, 0.0], &[3.0, 4.0], Distance::Manhattan),
            Ok(7.0)
        );
        assert_eq!(
            distance(&[0.0, 0.0], &[3.0, 4.0], Distance::Euclidean),
            Ok(5.0)
        );
        assert_eq!(
            distance(&[1.5, 2.0], &[1.5, 2.0], Distance::Euclidean),
            Ok(0.0)
        );
        assert!(distance(&[0.0], &[1.0, 2.0], Distance::Manhattan).is_err());
    }

    #[test]
    fn config_validation() {
        assert!(config(Method::Uniform, Distance::Euclidean, 10)
            .validate(4)
            .is_ok());
        assert!(matches!(
            config(Method::Uniform, Distance::Euclidean, 7).validate(3),
            Err(Error::UnreachableWeightCount { .. })
        ));
        assert!(config(Method::Dichotomic, Distance::Euclidean, 10)
            .validate(3)
            .is_err());
        assert!(config(Method::Dichotomic, Distance::Euclidean, 1)
            .validate(2)
            .is_err());
        assert!(config(Method::Averages, Distance::Manhattan, 3)
            .validate(4)
            .is_err());
    }

    #[test]
    fn every_method_makes_exactly_n_weights_calls() {
        let inst2 = instance(2, 14, 1);
        let inst3 = instance(3, 14, 2);
        let cases = [
            (&inst2, config(Method::Uniform, Distance::Euclidean, 10)),
            (&inst2, config(Method::Dichotomic, Distance::Euclidean, 10)),
            (&inst2, config(Method::Averages, Distance::Manhattan, 10)),
            (&inst3, config(Method::Uniform, Distance::Euclidean, 10)),
            (&inst3, config(Method::Averages, Distance::Euclidean, 10)),
        ];
        for (inst, cfg) in cases {
            let counting = Counting {
                inner: solver(),
                calls: Default::default(),
            };
            let out = run(inst, &cfg, &counting, 9).unwrap();
            assert_eq!(counting.calls.into_inner(), 10, "{cfg:?}");
            assert_eq!(out.weights.len(), 10);
            assert_eq!(out.records.len(), 10);
            assert!(out.weights.iter().all(on_simplex));
            assert!(!out.archive.is_empty());
        }
    }

    #[test]
    fn uniform_weights_for_two_objectives() {
        let out = run(
            &instance(2, 10, 3),
            &config(Method::Uniform, Distance::Manhattan, 10),
            &solver(),
            0,
        )
        .unwrap();
        assert_eq!(out.weights[0].as_slice(), &[1.0, 0.0]);
        assert!((out.weights[1].as_slice()[0] - 8.0 / 9.0).abs() < 1e-15);
        assert_eq!(out.weights[9].as_slice(), &[0.0, 1.0]);
    }

    #[test]
    fn two_weight_dichotomic_equals_degree_one_uniform() {
        let inst = instance(2, 12, 4);
        let d = run(
            &inst,
            &config(Method::Dichotomic, Distance::Euclidean, 2),
            &solver(),
            5,
        )
        .unwrap();
        let u = run(
            &inst,
            &config(Method::Uniform, Distance::Euclidean, 2),
            &solver(),
            5,
        )
        .unwrap();
        assert_eq!(d.weights, u.weights);
        assert_eq!(d.archive.entries(), u.archive.entries());
    }

    #[test]
    fn adaptive_runs_are_deterministic() {
        let inst = instance(2, 12, 6);
        for cfg in [
            config(Method::Dichotomic, Distance::Euclidean, 8),
            config(Method::Averages, Distance::Euclidean, 8),
        ] {
            let a = run(&inst, &cfg, &solver(), 77).unwrap();
            let b = run(&inst, &cfg, &solver(), 77).unwrap();
            assert_eq!(a, b);
        }
    }

    #[test]
    fn averages_third_weight_is_midpoint() {
        let inst = instance(2, 12, 7);
        let out = run(
            &inst,
            &config(Method::Averages, Distance::Manhattan, 3),
            &solver(),
            1,
        )
        .unwrap();
        assert_eq!(out.weights[2].as_slice(), &[0.5, 0.5]);
    }

    #[test]
    fn averages_fourth_weight_for_three_objectives() {
        let inst = instance(3, 12, 8);
        let out = run(
            &inst,
            &config(Method::Averages, Distance::Euclidean, 4),
            &solver(),
            1,
        )
        .unwrap();
        let w = out.weights[3].as_slice();
        assert!(w == [0.0, 0.5, 0.5] || w == [0.5, 0.5, 0.0], "{w:?}");
    }

    #[test]
    fn averages_weights_are_dyadic() {
        let inst = instance(4, 12, 9);
        let out = run(
            &inst,
            &config(Method::Averages, Distance::Euclidean, 10),
            &solver(),
            3,
        )
        .unwrap();
        assert_eq!(out.fallbacks, 0);
        for w in &out.weights {
            for &l in w.as_slice() {
                // exact dyadic rationals with small denominators
                let scaled = l * 1024.0;
                assert_eq!(scaled, libm::round(scaled), "{l}");
            }
        }
    }

    #[test]
    fn uniform_archive_ignores_weight_order() {
        let inst = instance(3, 12, 10);
        let weights = simplex_lattice(3, 3).unwrap();
        let mut reversed = weights.clone();
        reversed.reverse();
        let a = run_fixed(&inst, weights, &solver(), 42).unwrap();
        let b = run_fixed(&inst, reversed, &solver(), 42).unwrap();
        let key = |o: &RunOutcome| {
            o.archive
                .entries()
                .iter()
                .map(|e| (e.solution.costs.clone(), e.solution.bits.clone()))
                .collect::<Vec<_>>()
        };
        assert_eq!(key(&a), key(&b));
    }

    #[test]
    fn solutions_carry_consistent_costs_and_energy() {
        let inst = instance(3, 12, 11);
        let out = run(
            &inst,
            &config(Method::Averages, Distance::Manhattan, 6),
            &solver(),
            2,
        )
        .unwrap();
        for e in out.archive.entries() {
            let s = &e.solution;
            assert_eq!(s.costs, inst.costs(&s.bits).unwrap());
            let w = &out.weights[e.weight_index];
            let expected = w.dot(&s.costs);
            assert!((s.energy - expected).abs() <= 1e-9 * expected.abs().max(1.0));
        }
    }

    #[test]
    fn random_weights_are_on_simplex() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        for m in 2..6 {
            for _ in 0..100 {
                assert!(on_simplex(&random_simplex_weight(m, &mut rng).unwrap()));
            }
        }
    }
}
