//! Dense QUBO matrices and multi-objective instances.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};

/// Absolute tolerance on the component sum of a [`WeightVector`].
pub const WEIGHT_SUM_TOLERANCE: f64 = 1e-9;

/// A dense `n x n` QUBO coefficient matrix stored row-major.
///
/// The cost of a bit vector `x` is the full double sum
/// `sum_i sum_j Q[i][j] x_i x_j` over all ordered pairs; the matrix is never
/// symmetrised or folded to a triangle.
#[derive(Debug, Clone, PartialEq)]
pub struct QuboMatrix {
    n: usize,
    coeffs: Vec<f64>,
}

impl QuboMatrix {
    pub fn new(n: usize, coeffs: Vec<f64>) -> Result<Self> {
        if n == 0 {
            return Err(Error::EmptyMatrix);
        }
        if coeffs.len() != n * n {
            return Err(Error::DimensionMismatch {
                expected: n * n,
                found: coeffs.len(),
            });
        }
        if let Some(pos) = coeffs.iter().position(|c| !c.is_finite()) {
            return Err(Error::NonFiniteCoefficient {
                row: pos / n,
                col: pos % n,
            });
        }
        Ok(Self { n, coeffs })
    }

    pub fn from_rows<R: AsRef<[f64]>>(rows: &[R]) -> Result<Self> {
        let n = rows.len();
        let mut coeffs = Vec::with_capacity(n * n);
        for row in rows {
            let row = row.as_ref();
            if row.len() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    found: row.len(),
                });
            }
            coeffs.extend_from_slice(row);
        }
        Self::new(n, coeffs)
    }

    pub fn zeros(n: usize) -> Result<Self> {
        Self::new(n, vec![0.0; n * n])
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.coeffs[i * self.n + j]
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[f64] {
        &self.coeffs[i * self.n..(i + 1) * self.n]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.coeffs
    }

    fn check_len(&self, x: &[bool]) -> Result<()> {
        if x.len() != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                found: x.len(),
            });
        }
        Ok(())
    }

    /// `x^T Q x` over all ordered pairs `(i, j)`.
    ///
    /// Used both for a single objective `c_k(x)` and for the energy of an
    /// aggregated matrix.
    pub fn evaluate(&self, x: &[bool]) -> Result<f64> {
        self.check_len(x)?;
        let ones: Vec<usize> = (0..self.n).filter(|&i| x[i]).collect();
        let mut total = 0.0;
        for &i in &ones {
            let row = self.row(i);
            for &j in &ones {
                total += row[j];
            }
        }
        Ok(total)
    }
}

/// `m` QUBO objectives over the same `n` binary variables, with the
/// correlation and density they were generated with.
#[derive(Debug, Clone, PartialEq)]
pub struct MubqpInstance {
    rho: f64,
    density: f64,
    objectives: Vec<QuboMatrix>,
}

impl MubqpInstance {
    pub fn new(rho: f64, density: f64, objectives: Vec<QuboMatrix>) -> Result<Self> {
        if objectives.len() < 2 {
            return Err(Error::TooFewObjectives(objectives.len()));
        }
        let n = objectives[0].n();
        if let Some(bad) = objectives.iter().find(|q| q.n() != n) {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: bad.n(),
            });
        }
        if !(-1.0..=1.0).contains(&rho) {
            return Err(Error::InvalidInstance("rho must lie in [-1, 1]"));
        }
        if !(density > 0.0 && density <= 1.0) {
            return Err(Error::InvalidInstance("density must lie in (0, 1]"));
        }
        Ok(Self {
            rho,
            density,
            objectives,
        })
    }

    pub fn m(&self) -> usize {
        self.objectives.len()
    }

    pub fn n(&self) -> usize {
        self.objectives[0].n()
    }

    pub fn rho(&self) -> f64 {
        self.rho
    }

    pub fn density(&self) -> f64 {
        self.density
    }

    pub fn objectives(&self) -> &[QuboMatrix] {
        &self.objectives
    }

    /// The cost vector `(c_1(x), ..., c_m(x))`.
    pub fn costs(&self, x: &[bool]) -> Result<Vec<f64>> {
        self.objectives.iter().map(|q| q.evaluate(x)).collect()
    }

    /// Componentwise weighted sum `sum_k w_k P_k` of the objective matrices.
    pub fn aggregate(&self, w: &WeightVector) -> Result<QuboMatrix> {
        if w.len() != self.m() {
            return Err(Error::DimensionMismatch {
                expected: self.m(),
                found: w.len(),
            });
        }
        let n = self.n();
        let mut coeffs = vec![0.0; n * n];
        for (q, &lambda) in self.objectives.iter().zip(w.as_slice()) {
            for (acc, &c) in coeffs.iter_mut().zip(q.as_slice()) {
                *acc += lambda * c;
            }
        }
        QuboMatrix::new(n, coeffs)
    }
}

/// A point on the unit simplex: components in `[0, 1]` summing to one.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightVector(Vec<f64>);

impl WeightVector {
    pub fn new(lambdas: Vec<f64>) -> Result<Self> {
        if lambdas.is_empty() {
            return Err(Error::InvalidWeight("empty weight vector"));
        }
        if lambdas.iter().any(|l| !(0.0..=1.0).contains(l)) {
            return Err(Error::InvalidWeight("component outside [0, 1]"));
        }
        let sum: f64 = lambdas.iter().sum();
        if (sum - 1.0).abs() > WEIGHT_SUM_TOLERANCE {
            return Err(Error::InvalidWeight("components do not sum to 1"));
        }
        Ok(Self(lambdas))
    }

    /// The `k`-th unit vector of length `m`.
    pub fn unit(m: usize, k: usize) -> Self {
        let mut v = vec![0.0; m];
        v[k] = 1.0;
        Self(v)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }

    pub fn dot(&self, costs: &[f64]) -> f64 {
        self.0.iter().zip(costs).map(|(l, c)| l * c).sum()
    }

    /// Componentwise equality within `tol`.
    pub fn approx_eq(&self, other: &WeightVector, tol: f64) -> bool {
        self.len() == other.len()
            && self
                .0
                .iter()
                .zip(&other.0)
                .all(|(a, b)| (a - b).abs() <= tol)
    }
}

/// A bit vector with its cost vector and the weighted energy it was found at.
#[derive(Debug, Clone, PartialEq)]
pub struct Solution {
    pub bits: Vec<bool>,
    pub costs: Vec<f64>,
    pub energy: f64,
}

/// Caller-owned local fields for one state `x`.
///
/// `field[i] = sum_{j != i} (Q[i][j] + Q[j][i]) x_j`. Flipping bit `i` changes
/// the energy by `(1 - 2 x_i) (Q[i][i] + field[i])`: the diagonal enters once,
/// through `Q[i][i]`, because `x_i^2 = x_i`.
#[derive(Debug, Clone, PartialEq)]
pub struct FieldCache {
    field: Vec<f64>,
}

impl FieldCache {
    pub fn as_slice(&self) -> &[f64] {
        &self.field
    }
}

/// Precomputed symmetric couplings of a [`QuboMatrix`] for O(1) flip deltas
/// and O(n) field updates.
#[derive(Debug, Clone)]
pub struct FlipEvaluator {
    n: usize,
    diag: Vec<f64>,
    // Q + Q^T with a zero diagonal, row-major
    coupling: Vec<f64>,
}

impl FlipEvaluator {
    pub fn new(q: &QuboMatrix) -> Self {
        let n = q.n();
        let diag = (0..n).map(|i| q.get(i, i)).collect();
        let mut coupling = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    coupling[i * n + j] = q.get(i, j) + q.get(j, i);
                }
            }
        }
        Self { n, diag, coupling }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn init_fields(&self, x: &[bool]) -> Result<FieldCache> {
        self.check(x, None)?;
        let mut field = vec![0.0; self.n];
        for (j, _) in x.iter().enumerate().filter(|(_, &b)| b) {
            let row = &self.coupling[j * self.n..(j + 1) * self.n];
            for (f, &c) in field.iter_mut().zip(row) {
                *f += c;
            }
        }
        Ok(FieldCache { field })
    }

    /// `E(x with bit i flipped) - E(x)`.
    pub fn delta_energy(&self, x: &[bool], fields: &FieldCache, i: usize) -> Result<f64> {
        self.check(x, Some(i))?;
        if fields.field.len() != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                found: fields.field.len(),
            });
        }
        Ok(self.delta_unchecked(x, &fields.field, i))
    }

    /// Flips bit `i` and restores the field invariant in O(n). Returns the
    /// energy change.
    pub fn flip(&self, x: &mut [bool], fields: &mut FieldCache, i: usize) -> Result<f64> {
        let delta = self.delta_energy(x, fields, i)?;
        self.flip_unchecked(x, &mut fields.field, i);
        Ok(delta)
    }

    #[inline]
    pub(crate) fn delta_unchecked(&self, x: &[bool], field: &[f64], i: usize) -> f64 {
        let local = self.diag[i] + field[i];
        if x[i] {
            -local
        } else {
            local
        }
    }

    #[inline]
    pub(crate) fn flip_unchecked(&self, x: &mut [bool], field: &mut [f64], i: usize) {
        let row = &self.coupling[i * self.n..(i + 1) * self.n];
        if x[i] {
            for (f, &c) in field.iter_mut().zip(row) {
                *f -= c;
            }
        } else {
            for (f, &c) in field.iter_mut().zip(row) {
                *f += c;
            }
        }
        x[i] = !x[i];
    }

    fn check(&self, x: &[bool], index: Option<usize>) -> Result<()> {
        if x.len() != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                found: x.len(),
            });
        }
        match index {
            Some(i) if i >= self.n => Err(Error::IndexOutOfRange {
                index: i,
                len: self.n,
            }),
            _ => Ok(()),
        }
    }
}
