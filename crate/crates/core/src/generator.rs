//! Synthetic correlated instances and summary statistics of instances.
//!
//! Each entry `(i, j)` is nonzero with probability `density`, jointly for all
//! objectives. A nonzero entry draws `m` correlated standard normals, maps
//! them through the normal CDF and discretises onto `[-R, R]`. The Gaussian
//! correlation is set to `2 sin(pi rho / 6)`, which makes the Pearson
//! correlation of the uniform marginals equal `rho`.

use alloc::vec;
use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::qubo::{MubqpInstance, QuboMatrix};

pub const DEFAULT_COEFF_BOUND: i64 = 100;

#[derive(Debug, Clone, PartialEq)]
pub struct GeneratorParams {
    pub n: usize,
    pub m: usize,
    pub rho: f64,
    pub density: f64,
    /// Coefficients are integers in `[-coeff_bound, coeff_bound]`.
    pub coeff_bound: i64,
    pub seed: u64,
}

impl GeneratorParams {
    /// Lowest pairwise correlation for which the equicorrelation matrix is
    /// positive semidefinite.
    pub fn correlation_bound(m: usize) -> f64 {
        if m <= 2 {
            -1.0
        } else {
            -1.0 / (m as f64 - 1.0)
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n == 0 {
            return Err(Error::EmptyMatrix);
        }
        if self.m < 2 {
            return Err(Error::TooFewObjectives(self.m));
        }
        if !(self.density > 0.0 && self.density <= 1.0) {
            return Err(Error::InvalidParams("density must lie in (0, 1]"));
        }
        if self.coeff_bound < 1 {
            return Err(Error::InvalidParams("coefficient bound must be at least 1"));
        }
        if !self.rho.is_finite() || self.rho.abs() > 1.0 {
            return Err(Error::InvalidParams("rho must lie in [-1, 1]"));
        }
        let bound = Self::correlation_bound(self.m);
        if self.rho < bound {
            return Err(Error::InfeasibleCorrelation {
                rho: self.rho,
                m: self.m,
                bound,
            });
        }
        Ok(())
    }
}

/// Lower-triangular factor of the equicorrelation matrix with off-diagonal
/// `r`. Zero pivots (singular matrices) yield zero columns.
fn equicorrelation_cholesky(m: usize, r: f64) -> Vec<f64> {
    let mut l = vec![0.0; m * m];
    for i in 0..m {
        for j in 0..=i {
            let target = if i == j { 1.0 } else { r };
            let s: f64 = (0..j).map(|k| l[i * m + k] * l[j * m + k]).sum();
            if i == j {
                l[i * m + i] = libm::sqrt((target - s).max(0.0));
            } else {
                let pivot = l[j * m + j];
                l[i * m + j] = if pivot > 1e-12 {
                    (target - s) / pivot
                } else {
                    0.0
                };
            }
        }
    }
    l
}

fn normal_cdf(z: f64) -> f64 {
    0.5 * libm::erfc(-z / core::f64::consts::SQRT_2)
}

pub fn generate_instance(params: &GeneratorParams) -> Result<MubqpInstance> {
    params.validate()?;
    let GeneratorParams {
        n,
        m,
        rho,
        density,
        coeff_bound,
        seed,
    } = *params;
    let gaussian_rho = (2.0 * libm::sin(core::f64::consts::PI * rho / 6.0))
        .max(GeneratorParams::correlation_bound(m));
    let chol = equicorrelation_cholesky(m, gaussian_rho);
    let levels = (2 * coeff_bound + 1) as f64;

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    // entry-major: the m coefficients of entry (i, j) are contiguous
    let mut entries = vec![0.0; n * n * m];
    let mut z = vec![0.0; m];
    for entry in entries.chunks_exact_mut(m) {
        if density < 1.0 && rng.random::<f64>() >= density {
            continue;
        }
        for zk in z.iter_mut() {
            *zk = rng.sample(StandardNormal);
        }
        for (k, c) in entry.iter_mut().enumerate() {
            let corr: f64 = (0..=k).map(|j| chol[k * m + j] * z[j]).sum();
            let level = libm::floor(normal_cdf(corr) * levels).min(levels - 1.0);
            *c = level - coeff_bound as f64;
        }
    }
    let coeffs = (0..m).map(|k| {
        entries
            .iter()
            .skip(k)
            .step_by(m)
            .copied()
            .collect::<Vec<f64>>()
    });
    let objectives = coeffs
        .into_iter()
        .map(|c| QuboMatrix::new(n, c))
        .collect::<Result<Vec<_>>>()?;
    MubqpInstance::new(rho, density, objectives)
}

/// Summary statistics of an instance.
#[derive(Debug, Clone, PartialEq)]
pub struct Fingerprint {
    pub n: usize,
    pub m: usize,
    /// Fraction of entries `(i, j)` whose coefficient vector is not all zero.
    pub density: f64,
    /// Pearson correlation of objectives `k < l` over the nonzero entries, in
    /// row-major pair order; `None` when a variance vanishes.
    pub correlations: Vec<((usize, usize), Option<f64>)>,
    pub min_coeff: f64,
    pub max_coeff: f64,
}

impl Fingerprint {
    pub fn correlation(&self, k: usize, l: usize) -> Option<f64> {
        let key = if k < l { (k, l) } else { (l, k) };
        self.correlations.iter().find(|(p, _)| *p == key)?.1
    }
}

pub fn corpus_fingerprint(instance: &MubqpInstance) -> Fingerprint {
    let n = instance.n();
    let m = instance.m();
    let mats: Vec<&[f64]> = instance.objectives().iter().map(|q| q.as_slice()).collect();
    let nonzero: Vec<usize> = (0..n * n)
        .filter(|&idx| mats.iter().any(|q| q[idx] != 0.0))
        .collect();
    let mut min_coeff = f64::INFINITY;
    let mut max_coeff = f64::NEG_INFINITY;
    for q in &mats {
        for &v in q.iter() {
            min_coeff = min_coeff.min(v);
            max_coeff = max_coeff.max(v);
        }
    }
    let mut correlations = Vec::with_capacity(m * (m - 1) / 2);
    for k in 0..m {
        for l in k + 1..m {
            correlations.push(((k, l), pearson(&nonzero, mats[k], mats[l])));
        }
    }
    Fingerprint {
        n,
        m,
        density: nonzero.len() as f64 / (n * n) as f64,
        correlations,
        min_coeff,
        max_coeff,
    }
}

fn pearson(idx: &[usize], a: &[f64], b: &[f64]) -> Option<f64> {
    if idx.len() < 2 {
        return None;
    }
    let len = idx.len() as f64;
    let mean_a = idx.iter().map(|&i| a[i]).sum::<f64>() / len;
    let mean_b = idx.iter().map(|&i| b[i]).sum::<f64>() / len;
    let (mut sab, mut saa, mut sbb) = (0.0, 0.0, 0.0);
    for &i in idx {
        let da = a[i] - mean_a;
        let db = b[i] - mean_b;
        sab += da * db;
        saa += da * da;
        sbb += db * db;
    }
    if saa == 0.0 || sbb == 0.0 {
        return None;
    }
    Some(sab / libm::sqrt(saa * sbb))
}
