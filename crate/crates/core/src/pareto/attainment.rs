//! Bi-objective empirical attainment surfaces.

use alloc::vec::Vec;

use crate::error::{Error, Result};

/// Boundary of the region attained by at least `level` of the run fronts.
///
/// A point is attained by a run when some point of that run's front weakly
/// dominates it. Level 1 is the best surface and `level == runs` the worst.
/// The returned points are minimal, pairwise non-dominated and sorted by the
/// first objective; coordinates come from the input fronts.
pub fn attainment_surface<P: AsRef<[f64]>>(
    run_fronts: &[Vec<P>],
    level: usize,
) -> Result<Vec<[f64; 2]>> {
    let runs = run_fronts.len();
    if runs == 0 {
        return Err(Error::NoRuns);
    }
    if level == 0 || level > runs {
        return Err(Error::InvalidLevel { level, runs });
    }
    // each run as (x, running min y) after sorting by x
    let mut staircases: Vec<Vec<(f64, f64)>> = Vec::with_capacity(runs);
    let mut xs: Vec<f64> = Vec::new();
    for front in run_fronts {
        let mut pts = Vec::with_capacity(front.len());
        for p in front {
            let p = p.as_ref();
            if p.len() != 2 {
                return Err(Error::DimensionMismatch {
                    expected: 2,
                    found: p.len(),
                });
            }
            pts.push((p[0], p[1]));
            xs.push(p[0]);
        }
        pts.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.total_cmp(&b.1)));
        let mut best = f64::INFINITY;
        for p in pts.iter_mut() {
            best = best.min(p.1);
            p.1 = best;
        }
        staircases.push(pts);
    }
    xs.sort_by(f64::total_cmp);
    xs.dedup();

    let mut cursor = alloc::vec![0usize; runs];
    let mut reach = alloc::vec![f64::INFINITY; runs];
    let mut scratch = Vec::with_capacity(runs);
    let mut surface: Vec<[f64; 2]> = Vec::new();
    for &x in &xs {
        for (r, stairs) in staircases.iter().enumerate() {
            while cursor[r] < stairs.len() && stairs[cursor[r]].0 <= x {
                reach[r] = stairs[cursor[r]].1;
                cursor[r] += 1;
            }
        }
        scratch.clear();
        scratch.extend_from_slice(&reach);
        let (_, kth, _) = scratch.select_nth_unstable_by(level - 1, f64::total_cmp);
        let y = *kth;
        if y.is_finite() && surface.last().is_none_or(|last| y < last[1]) {
            surface.push([x, y]);
        }
    }
    Ok(surface)
}
