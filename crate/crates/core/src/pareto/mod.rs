//! Dominance relations, the Pareto archive and front quality indicators.
//!
//! All objectives are minimised.

use alloc::vec::Vec;
use core::cmp::Ordering;

use crate::error::{Error, Result};
use crate::qubo::Solution;

mod attainment;
mod hypervolume;

pub use attainment::attainment_surface;
pub use hypervolume::{hypervolume, ReferencePoint};

/// `a` dominates `b`: no worse everywhere and strictly better somewhere.
pub fn dominates(a: &[f64], b: &[f64]) -> Result<bool> {
    if a.len() != b.len() {
        return Err(Error::DimensionMismatch {
            expected: a.len(),
            found: b.len(),
        });
    }
    Ok(dominates_unchecked(a, b))
}

#[inline]
pub(crate) fn dominates_unchecked(a: &[f64], b: &[f64]) -> bool {
    let mut strictly = false;
    for (x, y) in a.iter().zip(b) {
        if x > y {
            return false;
        }
        strictly |= x < y;
    }
    strictly
}

#[inline]
fn weakly_dominates(a: &[f64], b: &[f64]) -> bool {
    a.iter().zip(b).all(|(x, y)| x <= y)
}

pub(crate) fn lex_cmp(a: &[f64], b: &[f64]) -> Ordering {
    a.iter()
        .zip(b)
        .map(|(x, y)| x.total_cmp(y))
        .find(|o| o.is_ne())
        .unwrap_or_else(|| a.len().cmp(&b.len()))
}

/// Sorts by `order`, keeps the first item of every run of equal cost vectors
/// and drops everything dominated. Output is lexicographic by cost vector.
fn nondominated_by<T>(
    mut items: Vec<T>,
    costs: impl Fn(&T) -> &[f64],
    tiebreak: impl Fn(&T, &T) -> Ordering,
) -> Vec<T> {
    items.sort_by(|a, b| lex_cmp(costs(a), costs(b)).then_with(|| tiebreak(a, b)));
    let mut kept: Vec<T> = Vec::new();
    for item in items {
        let c = costs(&item);
        if let Some(last) = kept.last() {
            if costs(last) == c {
                continue;
            }
        }
        // only lexicographically smaller points can dominate; equal ones were
        // skipped above, so weak dominance suffices
        if kept.iter().any(|k| weakly_dominates(costs(k), c)) {
            continue;
        }
        kept.push(item);
    }
    kept
}

/// The non-dominated subset, one solution per distinct cost vector (the one
/// with the smallest bit vector), ordered lexicographically by cost vector.
pub fn filter_nondominated(solutions: Vec<Solution>) -> Vec<Solution> {
    nondominated_by(solutions, |s| &s.costs, |a, b| a.bits.cmp(&b.bits))
}

/// Non-dominated distinct points, lexicographically ordered.
pub fn nondominated_points<P: AsRef<[f64]>>(points: &[P]) -> Vec<Vec<f64>> {
    let owned = points.iter().map(|p| p.as_ref().to_vec()).collect();
    nondominated_by(owned, |p| p.as_slice(), |_, _| Ordering::Equal)
}

/// A solution in the archive together with the index of the scalarisation
/// call that produced it.
#[derive(Debug, Clone, PartialEq)]
pub struct ArchiveEntry {
    pub solution: Solution,
    pub weight_index: usize,
}

/// Collects every solution returned by the solver and filters them down to
/// the non-dominated set.
///
/// Among entries with equal cost vectors the one with the smallest bit vector
/// (then the smallest `weight_index`) survives, so the final set does not
/// depend on insertion order.
#[derive(Debug, Clone, PartialEq)]
pub struct ParetoArchive {
    m: usize,
    entries: Vec<ArchiveEntry>,
    upper: Option<Vec<f64>>,
    pending: usize,
}

const PRUNE_THRESHOLD: usize = 8192;

impl ParetoArchive {
    pub fn new(m: usize) -> Self {
        Self {
            m,
            entries: Vec::new(),
            upper: None,
            pending: 0,
        }
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn insert(&mut self, solution: Solution, weight_index: usize) -> Result<()> {
        if solution.costs.len() != self.m {
            return Err(Error::DimensionMismatch {
                expected: self.m,
                found: solution.costs.len(),
            });
        }
        match &mut self.upper {
            Some(upper) => {
                for (u, &c) in upper.iter_mut().zip(&solution.costs) {
                    if c > *u {
                        *u = c;
                    }
                }
            }
            None => self.upper = Some(solution.costs.clone()),
        }
        self.entries.push(ArchiveEntry {
            solution,
            weight_index,
        });
        self.pending += 1;
        // filtering early and late give the same final set
        if self.pending > PRUNE_THRESHOLD {
            self.finalize();
        }
        Ok(())
    }

    /// Associative union; call [`finalize`](Self::finalize) afterwards.
    pub fn merge(&mut self, other: ParetoArchive) -> Result<()> {
        if other.m != self.m {
            return Err(Error::DimensionMismatch {
                expected: self.m,
                found: other.m,
            });
        }
        if let Some(theirs) = other.upper {
            match &mut self.upper {
                Some(mine) => mine.iter_mut().zip(theirs).for_each(|(a, b)| {
                    if b > *a {
                        *a = b
                    }
                }),
                None => self.upper = Some(theirs),
            }
        }
        self.pending += other.entries.len();
        self.entries.extend(other.entries);
        Ok(())
    }

    /// Drops dominated and duplicate entries.
    pub fn finalize(&mut self) {
        let entries = core::mem::take(&mut self.entries);
        self.entries = nondominated_by(
            entries,
            |e| &e.solution.costs,
            |a, b| {
                a.solution
                    .bits
                    .cmp(&b.solution.bits)
                    .then(a.weight_index.cmp(&b.weight_index))
            },
        );
        self.pending = 0;
    }

    pub fn entries(&self) -> &[ArchiveEntry] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Componentwise maximum over every solution ever inserted, including the
    /// ones filtering removed.
    pub fn upper_bound(&self) -> Option<&[f64]> {
        self.upper.as_deref()
    }

    pub fn cost_vectors(&self) -> Vec<Vec<f64>> {
        self.entries
            .iter()
            .map(|e| e.solution.costs.clone())
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;
    use proptest::prelude::*;

    fn sol(costs: &[f64], bit: bool) -> Solution {
        Solution {
            bits: vec![bit],
            costs: costs.to_vec(),
            energy: 0.0,
        }
    }

    #[test]
    fn dominance_examples() {
        assert!(dominates(&[1.0, 2.0], &[2.0, 3.0]).unwrap());
        assert!(!dominates(&[1.0, 2.0], &[1.0, 2.0]).unwrap());
        assert!(!dominates(&[1.0, 3.0], &[2.0, 2.0]).unwrap());
        assert!(!dominates(&[2.0, 2.0], &[1.0, 3.0]).unwrap());
        assert!(dominates(&[1.0], &[1.0, 2.0]).is_err());
    }

    #[test]
    fn filter_examples() {
        let pts = [[1.0, 3.0], [3.0, 3.0], [2.0, 2.0], [3.0, 1.0]];
        let out = filter_nondominated(pts.iter().map(|p| sol(p, false)).collect());
        let costs: Vec<_> = out.iter().map(|s| s.costs.clone()).collect();
        assert_eq!(costs, vec![vec![1.0, 3.0], vec![2.0, 2.0], vec![3.0, 1.0]]);

        let single = filter_nondominated(vec![sol(&[4.0, 4.0], true)]);
        assert_eq!(single, vec![sol(&[4.0, 4.0], true)]);
    }

    #[test]
    fn equal_costs_keep_smallest_bits() {
        let out = filter_nondominated(vec![sol(&[1.0, 1.0], true), sol(&[1.0, 1.0], false)]);
        assert_eq!(out, vec![sol(&[1.0, 1.0], false)]);
    }

    #[test]
    fn archive_tracks_prefilter_upper_bound() {
        let mut a = ParetoArchive::new(2);
        assert!(a.upper_bound().is_none());
        a.insert(sol(&[1.0, 3.0], false), 0).unwrap();
        a.insert(sol(&[2.0, 2.0], false), 0).unwrap();
        a.insert(sol(&[5.0, 5.0], true), 1).unwrap();
        a.finalize();
        assert_eq!(a.len(), 2);
        assert_eq!(a.upper_bound(), Some(&[5.0, 5.0][..]));
        assert!(a.insert(sol(&[1.0], false), 2).is_err());
    }

    #[test]
    fn archive_merge_is_order_independent() {
        let pts = [[3.0, 1.0], [1.0, 3.0], [2.0, 2.0], [2.0, 2.0], [4.0, 4.0]];
        let mut a = ParetoArchive::new(2);
        let mut b = ParetoArchive::new(2);
        for (i, p) in pts.iter().enumerate() {
            let target = if i % 2 == 0 { &mut a } else { &mut b };
            target.insert(sol(p, i % 3 == 0), i).unwrap();
        }
        let mut ab = a.clone();
        ab.merge(b.clone()).unwrap();
        ab.finalize();
        let mut ba = b;
        ba.merge(a).unwrap();
        ba.finalize();
        assert_eq!(ab.entries(), ba.entries());
        assert_eq!(ab.upper_bound(), ba.upper_bound());
    }

    fn quadratic_oracle(points: &[Vec<f64>]) -> Vec<Vec<f64>> {
        let mut out: Vec<Vec<f64>> = Vec::new();
        for (i, p) in points.iter().enumerate() {
            let dominated = points.iter().enumerate().any(|(j, q)| {
                j != i
                    && q.iter().zip(p).all(|(a, b)| a <= b)
                    && q.iter().zip(p).any(|(a, b)| a < b)
            });
            if !dominated && !out.contains(p) {
                out.push(p.clone());
            }
        }
        out.sort_by(|a, b| lex_cmp(a, b));
        out
    }

    proptest! {
        #[test]
        fn filter_matches_quadratic_oracle(
            pts in proptest::collection::vec(proptest::collection::vec(0i32..20, 3), 1..200)
        ) {
            let pts: Vec<Vec<f64>> = pts
                .into_iter()
                .map(|p| p.into_iter().map(f64::from).collect())
                .collect();
            prop_assert_eq!(nondominated_points(&pts), quadratic_oracle(&pts));
        }

        #[test]
        fn filter_is_idempotent(
            pts in proptest::collection::vec(proptest::collection::vec(0i32..10, 2), 1..60)
        ) {
            let pts: Vec<Vec<f64>> = pts
                .into_iter()
                .map(|p| p.into_iter().map(f64::from).collect())
                .collect();
            let once = nondominated_points(&pts);
            prop_assert_eq!(nondominated_points(&once), once.clone());
        }
    }
}
