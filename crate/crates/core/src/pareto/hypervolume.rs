//! Exact hypervolume for 2 to 4 objectives.
//!
//! Two objectives use a sorted sweep. Higher dimensions slice along the last
//! objective and recurse on the projected points, summing slab volumes
//! (the HSO dimension-sweep scheme).

use alloc::vec::Vec;

use crate::error::{Error, Result};

/// Upper corner of the hypervolume box; every compared point should weakly
/// dominate it.
#[derive(Debug, Clone, PartialEq)]
pub struct ReferencePoint(Vec<f64>);

impl ReferencePoint {
    pub fn new(bounds: Vec<f64>) -> Result<Self> {
        if bounds.is_empty() {
            return Err(Error::InvalidInstance("reference point is empty"));
        }
        if bounds.iter().any(|b| !b.is_finite()) {
            return Err(Error::InvalidInstance("reference point must be finite"));
        }
        Ok(Self(bounds))
    }

    pub fn bounds(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// Lebesgue measure of the union of the boxes `[p, reference]`.
///
/// Points outside the reference box in any objective are dropped with a
/// warning.
pub fn hypervolume<P: AsRef<[f64]>>(points: &[P], reference: &ReferencePoint) -> Result<f64> {
    let m = reference.len();
    if !(2..=4).contains(&m) {
        return Err(Error::UnsupportedObjectiveCount(m));
    }
    let r = reference.bounds();
    let mut inside = Vec::with_capacity(points.len());
    let mut clipped = 0usize;
    for p in points {
        let p = p.as_ref();
        if p.len() != m {
            return Err(Error::DimensionMismatch {
                expected: m,
                found: p.len(),
            });
        }
        if p.iter().zip(r).any(|(a, b)| a > b) {
            clipped += 1;
            continue;
        }
        // boxes touching the reference in some objective are empty
        if p.iter().zip(r).all(|(a, b)| a < b) {
            inside.push(p.to_vec());
        }
    }
    if clipped > 0 {
        log::warn!("hypervolume: {clipped} point(s) outside the reference box were ignored");
    }
    if inside.is_empty() {
        return Ok(0.0);
    }
    Ok(sweep(&mut inside, r, m))
}

fn sweep(points: &mut [Vec<f64>], r: &[f64], d: usize) -> f64 {
    if d == 2 {
        return area(points, r);
    }
    let k = d - 1;
    points.sort_by(|a, b| a[k].total_cmp(&b[k]));
    let mut volume = 0.0;
    let mut active: Vec<Vec<f64>> = Vec::with_capacity(points.len());
    for i in 0..points.len() {
        active.push(points[i][..k].to_vec());
        let upper = if i + 1 < points.len() {
            points[i + 1][k]
        } else {
            r[k]
        };
        let depth = upper - points[i][k];
        if depth > 0.0 {
            volume += sweep(&mut active.clone(), r, k) * depth;
        }
    }
    volume
}

fn area(points: &mut [Vec<f64>], r: &[f64]) -> f64 {
    points.sort_by(|a, b| a[0].total_cmp(&b[0]).then(a[1].total_cmp(&b[1])));
    let mut total = 0.0;
    let mut floor = r[1];
    for p in points.iter() {
        if p[1] < floor {
            total += (r[0] - p[0]) * (floor - p[1]);
            floor = p[1];
        }
    }
    total
}
