use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::qubo::WeightVector;

/// `binom(h + m - 1, m - 1)`, the number of lattice weight vectors, or `None`
/// on overflow.
pub fn lattice_size(h: usize, m: usize) -> Option<usize> {
    if m == 0 {
        return Some(0);
    }
    let k = (m - 1) as u128;
    let n = (h + m - 1) as u128;
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc.checked_mul(n - i)? / (i + 1);
    }
    usize::try_from(acc).ok()
}

/// Every weight vector whose components are multiples of `1/h` and sum to
/// one, in lexicographically descending order.
pub fn simplex_lattice(h: usize, m: usize) -> Result<Vec<WeightVector>> {
    match (h, m) {
        (_, 0) => return Err(Error::TooFewObjectives(0)),
        (_, 1) => return Ok(alloc::vec![WeightVector::unit(1, 0)]),
        (0, _) => return Err(Error::DegenerateLattice(m)),
        _ => {}
    }
    let mut out = Vec::with_capacity(lattice_size(h, m).unwrap_or(0));
    let mut counts = Vec::with_capacity(m);
    fill(h, m, &mut counts, &mut out, h as f64);
    Ok(out)
}

fn fill(
    remaining: usize,
    slots: usize,
    counts: &mut Vec<usize>,
    out: &mut Vec<WeightVector>,
    h: f64,
) {
    if slots == 1 {
        counts.push(remaining);
        let lambdas = counts.iter().map(|&c| c as f64 / h).collect();
        out.push(WeightVector::new(lambdas).expect("lattice points lie on the simplex"));
        counts.pop();
        return;
    }
    for c in (0..=remaining).rev() {
        counts.push(c);
        fill(remaining - c, slots - 1, counts, out, h);
        counts.pop();
    }
}

/// The lattice degree `h` that yields exactly `n_weights` vectors.
pub fn lattice_degree_for(n_weights: usize, m: usize) -> Result<usize> {
    let mut achievable = Vec::new();
    for h in 1.. {
        let Some(size) = lattice_size(h, m) else {
            break;
        };
        achievable.push(size);
        if size == n_weights {
            return Ok(h);
        }
        if size > n_weights || m <= 1 {
            break;
        }
    }
    Err(Error::UnreachableWeightCount {
        requested: n_weights,
        m,
        achievable,
    })
}
