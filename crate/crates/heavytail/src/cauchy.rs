//! Univariate Cauchy distribution and multivariate Cauchy laws defined by a
//! discrete symmetric spectral measure on the unit sphere.

use std::f64::consts::PI;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::gauss::{check_count, BatchMeta, SampleBatch, VectorBatch};
use crate::rng::{self, tags};

const UNIT_NORM_TOL: f64 = 1e-12;

/// Scale parameter of a Cauchy distribution; strictly positive.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CauchyScale(f64);

impl CauchyScale {
    pub const STANDARD: CauchyScale = CauchyScale(1.0);

    pub fn new(sigma: f64) -> Result<Self> {
        if !sigma.is_finite() || sigma <= 0.0 {
            return Err(Error::InvalidParameter(format!(
                "scale must be positive, got {sigma}"
            )));
        }
        Ok(Self(sigma))
    }

    pub fn get(self) -> f64 {
        self.0
    }
}

/// Density `sigma / (pi (x^2 + sigma^2))`.
pub fn cauchy_pdf(x: f64, scale: CauchyScale) -> f64 {
    let s = scale.get();
    s / (PI * (x * x + s * s))
}

/// The same density written through its value at zero:
/// `f(0) / (pi^2 f(0)^2 x^2 + 1)`.
pub fn cauchy_pdf_selfref(x: f64, scale: CauchyScale) -> f64 {
    let f0 = 1.0 / (PI * scale.get());
    f0 / (PI * PI * f0 * f0 * x * x + 1.0)
}

/// CDF `1/2 + atan(x / sigma) / pi`.
pub fn cauchy_cdf(x: f64, scale: CauchyScale) -> f64 {
    0.5 + (x / scale.get()).atan() / PI
}

/// Inverse CDF; defined for `p` in the open unit interval.
pub fn cauchy_quantile(p: f64, scale: CauchyScale) -> Result<f64> {
    if !(0.0 < p && p < 1.0) {
        return Err(Error::InvalidParameter(format!(
            "probability must lie in (0, 1), got {p}"
        )));
    }
    Ok(scale.get() * (PI * (p - 0.5)).tan())
}

/// Draws iid Cauchy variates by quantile transform of uniforms.
pub fn sample_cauchy(count: usize, scale: CauchyScale, seed: u64) -> Result<SampleBatch> {
    check_count(count)?;
    let s = scale.get();
    let values = rng::sample_batched(count, 1, seed, tags::CAUCHY, |rng, chunk| {
        for v in chunk.iter_mut() {
            *v = s * standard_cauchy(rng);
        }
    });
    let mut meta = BatchMeta::new("cauchy", count, 1);
    meta.scale = Some(s);
    Ok(SampleBatch { values, seed, meta })
}

#[inline]
pub(crate) fn standard_cauchy<R: rand::Rng>(rng: &mut R) -> f64 {
    let u: f64 = rng.random();
    (PI * (u - 0.5)).tan()
}

/// One stored atom of a symmetric spectral measure: the direction represents
/// the pair `{+s, -s}` and `pair_mass` is the total mass of the pair.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpectralAtom {
    pub direction: Vec<f64>,
    pub pair_mass: f64,
}

impl SpectralAtom {
    pub fn new(direction: Vec<f64>, pair_mass: f64) -> Self {
        Self {
            direction,
            pair_mass,
        }
    }
}

/// A finite symmetric atomic measure on the unit sphere. With this mass
/// convention the real characteristic function of the associated Cauchy law
/// is `exp(-sum_k gamma_k |<t, s_k>|)`, and a single axis atom of unit mass
/// gives a standard Cauchy coordinate.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpectralMeasure {
    dim: usize,
    atoms: Vec<SpectralAtom>,
}

impl SpectralMeasure {
    pub fn new(dim: usize, atoms: Vec<SpectralAtom>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidParameter("dimension must be positive".into()));
        }
        if atoms.is_empty() {
            return Err(Error::InvalidParameter(
                "spectral measure needs at least one atom".into(),
            ));
        }
        for atom in &atoms {
            if atom.direction.len() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    actual: atom.direction.len(),
                });
            }
            let norm = atom.direction.iter().map(|s| s * s).sum::<f64>().sqrt();
            if (norm - 1.0).abs() > UNIT_NORM_TOL {
                return Err(Error::InvalidParameter(format!(
                    "atom direction must have unit norm, got |s| = {norm}"
                )));
            }
            if !atom.pair_mass.is_finite() || atom.pair_mass <= 0.0 {
                return Err(Error::InvalidParameter(format!(
                    "atom mass must be positive, got {}",
                    atom.pair_mass
                )));
            }
        }
        for i in 0..atoms.len() {
            for j in (i + 1)..atoms.len() {
                if directions_equal_up_to_sign(&atoms[i].direction, &atoms[j].direction) {
                    return Err(Error::InvalidParameter(format!(
                        "atoms {i} and {j} share a direction up to sign"
                    )));
                }
            }
        }
        Ok(Self { dim, atoms })
    }

    /// Unit mass on every axis pair: independent standard Cauchy coordinates.
    pub fn axes(dim: usize) -> Self {
        let atoms = (0..dim)
            .map(|j| {
                let mut direction = vec![0.0; dim];
                direction[j] = 1.0;
                SpectralAtom::new(direction, 1.0)
            })
            .collect();
        Self { dim, atoms }
    }

    /// All mass on `+-(1, ..., 1)/sqrt(n)`, scaled so every marginal is
    /// standard Cauchy: the coordinates are almost surely equal.
    pub fn diagonal(dim: usize) -> Self {
        let n = dim as f64;
        let atoms = vec![SpectralAtom::new(vec![1.0 / n.sqrt(); dim], n.sqrt())];
        Self { dim, atoms }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn atoms(&self) -> &[SpectralAtom] {
        &self.atoms
    }

    /// Marginal scale of coordinate `j`: `sum_k gamma_k |s_{k,j}|`.
    pub fn marginal_scale(&self, j: usize) -> f64 {
        self.atoms
            .iter()
            .map(|a| a.pair_mass * a.direction[j].abs())
            .sum()
    }
}

fn directions_equal_up_to_sign(a: &[f64], b: &[f64]) -> bool {
    let same = a.iter().zip(b).all(|(x, y)| (x - y).abs() <= UNIT_NORM_TOL);
    let negated = a.iter().zip(b).all(|(x, y)| (x + y).abs() <= UNIT_NORM_TOL);
    same || negated
}

/// Real characteristic function `exp(-sum_k gamma_k |<t, s_k>|)` of the
/// multivariate Cauchy law with spectral measure `gamma`.
pub fn mv_cauchy_charfn(t: &[f64], gamma: &SpectralMeasure) -> Result<f64> {
    if t.len() != gamma.dim() {
        return Err(Error::DimensionMismatch {
            expected: gamma.dim(),
            actual: t.len(),
        });
    }
    let exponent: f64 = gamma
        .atoms()
        .iter()
        .map(|a| {
            let dot: f64 = t.iter().zip(&a.direction).map(|(x, s)| x * s).sum();
            a.pair_mass * dot.abs()
        })
        .sum();
    Ok((-exponent).exp())
}

/// Draws from the multivariate Cauchy law as `X = sum_k gamma_k W_k s_k`
/// with `W_k` iid standard Cauchy.
pub fn sample_mv_cauchy(gamma: &SpectralMeasure, count: usize, seed: u64) -> Result<VectorBatch> {
    check_count(count)?;
    let dim = gamma.dim();
    let atoms = gamma.atoms();
    let values = rng::sample_batched(count, dim, seed, tags::MV_CAUCHY, |rng, chunk| {
        for row in chunk.chunks_exact_mut(dim) {
            row.fill(0.0);
            for atom in atoms {
                let w = atom.pair_mass * standard_cauchy(rng);
                for (x, s) in row.iter_mut().zip(&atom.direction) {
                    *x += w * s;
                }
            }
        }
    });
    Ok(VectorBatch {
        dim,
        values,
        seed,
        meta: BatchMeta::new("mv_cauchy", count, dim),
    })
}
