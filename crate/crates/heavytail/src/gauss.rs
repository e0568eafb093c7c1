//! Covariance handling, Cholesky factorization and multivariate normal
//! sampling, including the 2x2 equal-variance parametrization whose inverse
//! matrix is `[[1, theta], [theta, 1]]`.

use rand_distr::{Distribution, StandardNormal};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::rng::{self, tags};

/// Relative tolerance below which an asymmetric input is silently symmetrized.
const SYMMETRY_TOL: f64 = 1e-12;
/// Cholesky pivots at or below `PIVOT_TOL * max_diagonal` reject the matrix.
const PIVOT_TOL: f64 = 1e-12;

/// The 2x2 covariance with unit-diagonal inverse `[[1, theta], [theta, 1]]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ThetaCovariance {
    theta: f64,
}

impl ThetaCovariance {
    pub fn new(theta: f64) -> Result<Self> {
        if !theta.is_finite() || theta.abs() >= 1.0 {
            return Err(Error::InvalidParameter(format!(
                "theta must lie in (-1, 1), got {theta}"
            )));
        }
        Ok(Self { theta })
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    /// The covariance itself: `[[1, -theta], [-theta, 1]] / (1 - theta^2)`.
    pub fn covariance(&self) -> CovarianceMatrix {
        let scale = 1.0 / (1.0 - self.theta * self.theta);
        let entries = vec![scale, -self.theta * scale, -self.theta * scale, scale];
        CovarianceMatrix { dim: 2, entries }
    }

    /// The inverse matrix `[[1, theta], [theta, 1]]`, row-major.
    pub fn inverse_entries(&self) -> [f64; 4] {
        [1.0, self.theta, self.theta, 1.0]
    }
}

/// Maps `theta` to the full 2x2 covariance matrix.
pub fn theta_to_covariance(theta: f64) -> Result<CovarianceMatrix> {
    Ok(ThetaCovariance::new(theta)?.covariance())
}

/// A symmetric matrix with positive diagonal, stored row-major.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CovarianceMatrix {
    dim: usize,
    entries: Vec<f64>,
}

impl CovarianceMatrix {
    /// Validates and stores an `dim x dim` row-major matrix. Inputs that are
    /// asymmetric within rounding are replaced by `(A + A^T) / 2`; anything
    /// worse is rejected.
    pub fn new(dim: usize, mut entries: Vec<f64>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidParameter("dimension must be positive".into()));
        }
        if entries.len() != dim * dim {
            return Err(Error::DimensionMismatch {
                expected: dim * dim,
                actual: entries.len(),
            });
        }
        if entries.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidParameter(
                "matrix entries must be finite".into(),
            ));
        }
        let max_abs = entries.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        let mut max_asym = 0.0f64;
        for i in 0..dim {
            for j in (i + 1)..dim {
                max_asym = max_asym.max((entries[i * dim + j] - entries[j * dim + i]).abs());
            }
        }
        if max_asym > SYMMETRY_TOL * max_abs.max(1.0) {
            return Err(Error::NotSymmetric {
                max_asymmetry: max_asym,
            });
        }
        for i in 0..dim {
            for j in (i + 1)..dim {
                let mean = 0.5 * (entries[i * dim + j] + entries[j * dim + i]);
                entries[i * dim + j] = mean;
                entries[j * dim + i] = mean;
            }
            if entries[i * dim + i] <= 0.0 {
                return Err(Error::InvalidParameter(format!(
                    "diagonal entry {i} must be positive, got {}",
                    entries[i * dim + i]
                )));
            }
        }
        Ok(Self { dim, entries })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let dim = rows.len();
        for row in rows {
            if row.len() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    actual: row.len(),
                });
            }
        }
        Self::new(dim, rows.concat())
    }

    pub fn identity(dim: usize) -> Self {
        let mut entries = vec![0.0; dim * dim];
        for i in 0..dim {
            entries[i * dim + i] = 1.0;
        }
        Self { dim, entries }
    }

    pub fn diagonal(variances: &[f64]) -> Result<Self> {
        let dim = variances.len();
        let mut entries = vec![0.0; dim * dim];
        for (i, &v) in variances.iter().enumerate() {
            entries[i * dim + i] = v;
        }
        Self::new(dim, entries)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.entries[i * self.dim + j]
    }

    pub fn entries(&self) -> &[f64] {
        &self.entries
    }
}

/// Lower-triangular factor `L` with `L L^T` equal to the source covariance.
#[derive(Debug, Clone, PartialEq)]
pub struct CholeskyFactor {
    dim: usize,
    entries: Vec<f64>,
}

impl CholeskyFactor {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.entries[i * self.dim + j]
    }

    /// Replaces a standard-normal vector `z` by `L z` in place.
    pub fn apply_in_place(&self, z: &mut [f64]) {
        debug_assert_eq!(z.len(), self.dim);
        for i in (0..self.dim).rev() {
            let row = &self.entries[i * self.dim..i * self.dim + i + 1];
            z[i] = row.iter().zip(z.iter()).map(|(l, zj)| l * zj).sum();
        }
    }

    /// Reconstructs `L L^T`, row-major. Used by round-trip checks.
    pub fn product(&self) -> Vec<f64> {
        let n = self.dim;
        let mut out = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..n {
                let mut acc = 0.0;
                for k in 0..=i.min(j) {
                    acc += self.entries[i * n + k] * self.entries[j * n + k];
                }
                out[i * n + j] = acc;
            }
        }
        out
    }
}

/// Standard Cholesky factorization with an explicit pivot tolerance, so a
/// genuinely singular matrix is reported rather than producing NaNs.
pub fn cholesky(sigma: &CovarianceMatrix) -> Result<CholeskyFactor> {
    let n = sigma.dim;
    let max_diag = (0..n).fold(0.0f64, |m, i| m.max(sigma.get(i, i)));
    let threshold = PIVOT_TOL * max_diag;
    let mut l = vec![0.0; n * n];
    for j in 0..n {
        let mut pivot = sigma.get(j, j);
        for k in 0..j {
            pivot -= l[j * n + k] * l[j * n + k];
        }
        if pivot <= threshold {
            return Err(Error::NotPositiveDefinite { index: j, pivot });
        }
        let diag = pivot.sqrt();
        l[j * n + j] = diag;
        for i in (j + 1)..n {
            let mut acc = sigma.get(i, j);
            for k in 0..j {
                acc -= l[i * n + k] * l[j * n + k];
            }
            l[i * n + j] = acc / diag;
        }
    }
    Ok(CholeskyFactor { dim: n, entries: l })
}

/// Generating parameters recorded alongside every batch of draws.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BatchMeta {
    pub kind: &'static str,
    pub count: usize,
    pub dim: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub theta: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub weights: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub scale: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub covariance: Option<Vec<f64>>,
}

impl BatchMeta {
    pub(crate) fn new(kind: &'static str, count: usize, dim: usize) -> Self {
        Self {
            kind,
            count,
            dim,
            theta: None,
            weights: None,
            scale: None,
            covariance: None,
        }
    }
}

/// A reproducible batch of scalar draws.
#[derive(Debug, Clone, PartialEq)]
pub struct SampleBatch {
    pub values: Vec<f64>,
    pub seed: u64,
    pub meta: BatchMeta,
}

impl SampleBatch {
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

/// A reproducible batch of `dim`-vector draws, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct VectorBatch {
    pub dim: usize,
    pub values: Vec<f64>,
    pub seed: u64,
    pub meta: BatchMeta,
}

impl VectorBatch {
    pub fn len(&self) -> usize {
        self.values.len() / self.dim
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.values[i * self.dim..(i + 1) * self.dim]
    }

    /// Copies out coordinate `j` of every draw.
    pub fn coordinate(&self, j: usize) -> Vec<f64> {
        self.values
            .chunks_exact(self.dim)
            .map(|row| row[j])
            .collect()
    }
}

pub(crate) fn check_count(count: usize) -> Result<()> {
    if count == 0 {
        return Err(Error::InvalidParameter("count must be at least 1".into()));
    }
    Ok(())
}

/// Writes one `N(0, L L^T)` draw into `row`.
#[inline]
pub(crate) fn draw_mvn<R: rand::Rng>(rng: &mut R, factor: &CholeskyFactor, row: &mut [f64]) {
    for z in row.iter_mut() {
        *z = StandardNormal.sample(rng);
    }
    factor.apply_in_place(row);
}

/// Draws iid centered Gaussian vectors with covariance `L L^T`.
pub fn sample_mvn(factor: &CholeskyFactor, count: usize, seed: u64) -> Result<VectorBatch> {
    check_count(count)?;
    let dim = factor.dim();
    let values = rng::sample_batched(count, dim, seed, tags::MVN, |rng, chunk| {
        for row in chunk.chunks_exact_mut(dim) {
            draw_mvn(rng, factor, row);
        }
    });
    let mut meta = BatchMeta::new("mvn", count, dim);
    meta.covariance = Some(factor.product());
    Ok(VectorBatch {
        dim,
        values,
        seed,
        meta,
    })
}
