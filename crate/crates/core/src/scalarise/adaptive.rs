//! Next-weight rules of the two adaptive methods.

use alloc::vec::Vec;
use core::cmp::Ordering;

use super::{Distance, WeightRecord};
use crate::error::{Error, Result};
use crate::pareto::lex_cmp;
use crate::qubo::WeightVector;

/// Per-component tolerance for treating two weights as the same.
pub const DUPLICATE_TOLERANCE: f64 = 1e-9;

fn already_explored(records: &[WeightRecord], w: &WeightVector) -> bool {
    records
        .iter()
        .any(|r| r.weight.approx_eq(w, DUPLICATE_TOLERANCE))
}

/// Adjacent index pairs of `order`, ranked by decreasing gap; equal gaps keep
/// the lower index first.
fn ranked_gaps(order: &[usize], gap: impl Fn(usize, usize) -> f64) -> Vec<(usize, usize, f64)> {
    let mut pairs: Vec<(usize, usize, f64)> = order
        .windows(2)
        .map(|w| (w[0], w[1], gap(w[0], w[1])))
        .collect();
    pairs.sort_by(|a, b| b.2.partial_cmp(&a.2).unwrap_or(Ordering::Equal));
    pairs
}

/// Midpoint of the two lexicographically adjacent weights whose best
/// solutions are farthest apart under `metric`.
///
/// Midpoints that repeat an explored weight are skipped in favour of the next
/// largest gap. [`Error::NoProgress`] means every midpoint was a repeat.
pub fn averages_next_weight(records: &[WeightRecord], metric: Distance) -> Result<WeightVector> {
    if records.len() < 2 {
        return Err(Error::TooFewRecords(records.len()));
    }
    let mut order: Vec<usize> = (0..records.len()).collect();
    order.sort_by(|&a, &b| lex_cmp(records[a].weight.as_slice(), records[b].weight.as_slice()));
    let pairs = ranked_gaps(&order, |a, b| {
        metric.measure(&records[a].best.costs, &records[b].best.costs)
    });
    for (u, v, _) in pairs {
        let mid = records[u]
            .weight
            .as_slice()
            .iter()
            .zip(records[v].weight.as_slice())
            .map(|(a, b)| (a + b) / 2.0)
            .collect();
        let mid = WeightVector::new(mid)?;
        if !already_explored(records, &mid) {
            return Ok(mid);
        }
    }
    Err(Error::NoProgress)
}

/// Weight perpendicular to the segment between `y` and `z` where
/// `c1(y) > c1(z)`: `(c2(y) - c2(z), c1(z) - c1(y))`, normalised to sum one.
/// `None` when the normalising sum is zero.
pub fn dichotomic_raw_weight(y: &[f64], z: &[f64]) -> Option<[f64; 2]> {
    let t1 = y[1] - z[1];
    let t2 = z[0] - y[0];
    let sum = t1 + t2;
    if sum == 0.0 || !sum.is_finite() {
        return None;
    }
    Some([t1 / sum, t2 / sum])
}

/// Dichotomic search step for two objectives.
///
/// Stored best solutions are sorted by the first objective; the adjacent pair
/// with the largest Euclidean gap gets the weight that makes both equally
/// good. Pairs with identical costs, pairs whose weight leaves the simplex
/// (one point dominates the other) and pairs whose weight was already
/// explored are skipped. If nothing else remains the out-of-range weights are
/// clamped into `[0, 1]` and renormalised.
pub fn dichotomic_next_weight(records: &[WeightRecord]) -> Result<WeightVector> {
    if records.len() < 2 {
        return Err(Error::TooFewRecords(records.len()));
    }
    if let Some(r) = records.iter().find(|r| r.best.costs.len() != 2) {
        return Err(Error::ObjectiveCountMismatch {
            required: 2,
            found: r.best.costs.len(),
        });
    }
    let costs = |i: usize| -> &[f64] { &records[i].best.costs };
    let mut order: Vec<usize> = (0..records.len()).collect();
    order.sort_by(|&a, &b| lex_cmp(costs(a), costs(b)));
    let pairs: Vec<(usize, usize, f64)> = ranked_gaps(&order, |a, b| {
        Distance::Euclidean.measure(costs(a), costs(b))
    })
    .into_iter()
    .filter(|p| p.2 > 0.0)
    .collect();

    for &(z, y, _) in &pairs {
        let Some(raw) = dichotomic_raw_weight(costs(y), costs(z)) else {
            continue;
        };
        if raw.iter().all(|l| (0.0..=1.0).contains(l)) {
            let w = WeightVector::new(raw.to_vec())?;
            if !already_explored(records, &w) {
                return Ok(w);
            }
        }
    }
    for &(z, y, _) in &pairs {
        let Some(raw) = dichotomic_raw_weight(costs(y), costs(z)) else {
            continue;
        };
        let clamped = [raw[0].clamp(0.0, 1.0), raw[1].clamp(0.0, 1.0)];
        let sum = clamped[0] + clamped[1];
        if sum <= 0.0 {
            continue;
        }
        let w = WeightVector::new(alloc::vec![clamped[0] / sum, clamped[1] / sum])?;
        if !already_explored(records, &w) {
            log::warn!(
                "dichotomic search: clamped weight {:?} from a dominated pair",
                w.as_slice()
            );
            return Ok(w);
        }
    }
    Err(Error::NoProgress)
}
