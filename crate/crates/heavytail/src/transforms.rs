//! Samplers for the three normal-to-Cauchy transformations:
//!
//! * `pm`  — convex combination of coordinatewise ratios `X_j / Y_j`,
//! * `abs` — the same with denominators `|Y_j|`,
//! * `bm`  — convex combination of Brownian motion coordinates, each read at
//!   its own random time `Y_j^{-2}`.
//!
//! The stopped-Brownian-motion transform has two independent constructions:
//! an explicit path sampler (cumulative correlated increments at the sorted
//! stopping times) and, for n = 2, a scale-mixture sampler built on the
//! conditional variance of the combination given `(Y_1, Y_2)`.

use std::fmt;

use rand_distr::{Distribution, StandardNormal};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::gauss::{
    check_count, cholesky, draw_mvn, BatchMeta, CholeskyFactor, CovarianceMatrix, SampleBatch,
    ThetaCovariance, VectorBatch,
};
use crate::rng::{self, tags};
use crate::stats::{ks_two_sample, EmpiricalSample};

const WEIGHT_SUM_TOL: f64 = 1e-12;

/// Convex-combination coefficients: entries in `[0, 1]` summing to one.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(transparent)]
pub struct Weights(Vec<f64>);

impl Weights {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::InvalidParameter("weights must be non-empty".into()));
        }
        for (j, &w) in values.iter().enumerate() {
            if !w.is_finite() || !(0.0..=1.0).contains(&w) {
                return Err(Error::InvalidParameter(format!(
                    "weight {j} must lie in [0, 1], got {w}"
                )));
            }
        }
        let sum: f64 = values.iter().sum();
        if (sum - 1.0).abs() > WEIGHT_SUM_TOL {
            return Err(Error::InvalidParameter(format!(
                "weights must sum to 1, got {sum}"
            )));
        }
        Ok(Self(values))
    }

    /// Two-coordinate weights `(w1, 1 - w1)`.
    pub fn pair(w1: f64) -> Result<Self> {
        Self::new(vec![w1, 1.0 - w1])
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

    pub fn get(&self, j: usize) -> f64 {
        self.0[j]
    }
}

/// Which of the three transformations a batch or density model refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum TransformKind {
    #[serde(rename = "pm")]
    RatioPm,
    #[serde(rename = "abs")]
    AbsRatio,
    #[serde(rename = "bm")]
    StoppedBm,
}

impl fmt::Display for TransformKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            TransformKind::RatioPm => "pm",
            TransformKind::AbsRatio => "abs",
            TransformKind::StoppedBm => "bm",
        })
    }
}

fn check_dims(sigma: &CovarianceMatrix, weights: &Weights) -> Result<()> {
    if sigma.dim() != weights.len() {
        return Err(Error::DimensionMismatch {
            expected: sigma.dim(),
            actual: weights.len(),
        });
    }
    Ok(())
}

fn ratio_meta(
    kind: &'static str,
    sigma: &CovarianceMatrix,
    weights: &Weights,
    count: usize,
) -> BatchMeta {
    let mut meta = BatchMeta::new(kind, count, 1);
    meta.weights = Some(weights.as_slice().to_vec());
    meta.covariance = Some(sigma.entries().to_vec());
    meta
}

/// One draw of `sum_j w_j x_j / d(y_j)` where `d` maps the denominator.
/// Redraws on an exactly zero denominator or a non-finite combination;
/// both are probability-zero events that must not abort a batch.
#[inline]
fn ratio_draw<R: rand::Rng>(
    rng: &mut R,
    factor: &CholeskyFactor,
    weights: &[f64],
    denom: impl Fn(f64) -> f64,
    x: &mut [f64],
    y: &mut [f64],
) -> f64 {
    loop {
        draw_mvn(rng, factor, x);
        draw_mvn(rng, factor, y);
        if y.contains(&0.0) {
            continue;
        }
        let v: f64 = weights
            .iter()
            .zip(x.iter().zip(y.iter()))
            .map(|(&w, (&xi, &yi))| w * xi / denom(yi))
            .sum();
        if v.is_finite() {
            return v;
        }
    }
}

fn sample_ratio(
    kind: &'static str,
    tag: u64,
    denom: fn(f64) -> f64,
    sigma: &CovarianceMatrix,
    weights: &Weights,
    count: usize,
    seed: u64,
) -> Result<SampleBatch> {
    check_dims(sigma, weights)?;
    check_count(count)?;
    let factor = cholesky(sigma)?;
    let n = sigma.dim();
    let w = weights.as_slice();
    let values = rng::sample_batched(count, 1, seed, tag, |rng, chunk| {
        let mut x = vec![0.0; n];
        let mut y = vec![0.0; n];
        for out in chunk.iter_mut() {
            *out = ratio_draw(rng, &factor, w, denom, &mut x, &mut y);
        }
    });
    Ok(SampleBatch {
        values,
        seed,
        meta: ratio_meta(kind, sigma, weights, count),
    })
}

/// The convex combination `sum_j w_j X_j / Y_j` of coordinatewise ratios of
/// two iid centered normal vectors with covariance `sigma`; standard Cauchy
/// for every covariance.
pub fn sample_ratio_pm(
    sigma: &CovarianceMatrix,
    weights: &Weights,
    count: usize,
    seed: u64,
) -> Result<SampleBatch> {
    sample_ratio(
        "ratio_pm",
        tags::RATIO_PM,
        |y| y,
        sigma,
        weights,
        count,
        seed,
    )
}

/// The variant with absolute-value denominators, `sum_j w_j X_j / |Y_j|`.
pub fn sample_abs_ratio(
    sigma: &CovarianceMatrix,
    weights: &Weights,
    count: usize,
    seed: u64,
) -> Result<SampleBatch> {
    sample_ratio(
        "abs_ratio",
        tags::ABS_RATIO,
        f64::abs,
        sigma,
        weights,
        count,
        seed,
    )
}

/// Scratch space reused across path draws within one batch.
struct PathScratch {
    y: Vec<f64>,
    order: Vec<(f64, usize)>,
    increment: Vec<f64>,
    position: Vec<f64>,
    stopped: Vec<f64>,
}

impl PathScratch {
    fn new(n: usize) -> Self {
        Self {
            y: vec![0.0; n],
            order: vec![(0.0, 0); n],
            increment: vec![0.0; n],
            position: vec![0.0; n],
            stopped: vec![0.0; n],
        }
    }
}

/// Builds one vector Brownian path at the given times (any order) and records
/// each coordinate at its own time. Increments between consecutive sorted
/// times are independent `N(0, dt * Sigma)`; a tied time contributes a
/// zero-length step.
#[inline]
fn bm_values_at_own_times<R: rand::Rng>(
    rng: &mut R,
    factor: &CholeskyFactor,
    times: &[(f64, usize)],
    scratch_increment: &mut [f64],
    position: &mut [f64],
    stopped: &mut [f64],
) {
    position.fill(0.0);
    let mut previous = 0.0;
    for &(t, idx) in times {
        let dt = t - previous;
        debug_assert!(dt >= 0.0);
        draw_mvn(rng, factor, scratch_increment);
        let step = dt.sqrt();
        for (p, inc) in position.iter_mut().zip(scratch_increment.iter()) {
            *p += step * inc;
        }
        stopped[idx] = position[idx];
        previous = t;
    }
}

#[inline]
fn stopped_bm_draw<R: rand::Rng>(
    rng: &mut R,
    factor: &CholeskyFactor,
    weights: &[f64],
    scratch: &mut PathScratch,
) -> f64 {
    loop {
        draw_mvn(rng, factor, &mut scratch.y);
        let mut valid = true;
        for (j, &y) in scratch.y.iter().enumerate() {
            let t = 1.0 / (y * y);
            if !t.is_finite() {
                valid = false;
                break;
            }
            scratch.order[j] = (t, j);
        }
        if !valid {
            continue;
        }
        scratch.order.sort_unstable_by(|a, b| a.0.total_cmp(&b.0));
        bm_values_at_own_times(
            rng,
            factor,
            &scratch.order,
            &mut scratch.increment,
            &mut scratch.position,
            &mut scratch.stopped,
        );
        let v: f64 = weights
            .iter()
            .zip(scratch.stopped.iter())
            .map(|(&w, &s)| w * s)
            .sum();
        if v.is_finite() {
            return v;
        }
    }
}

/// The randomly stopped Brownian motion combination
/// `sum_j w_j X_j(Y_j^{-2})`, built path-wise from correlated increments.
pub fn sample_stopped_bm_path(
    sigma: &CovarianceMatrix,
    weights: &Weights,
    count: usize,
    seed: u64,
) -> Result<SampleBatch> {
    check_dims(sigma, weights)?;
    check_count(count)?;
    let factor = cholesky(sigma)?;
    let n = sigma.dim();
    let w = weights.as_slice();
    let values = rng::sample_batched(count, 1, seed, tags::BM_PATH, |rng, chunk| {
        let mut scratch = PathScratch::new(n);
        for out in chunk.iter_mut() {
            *out = stopped_bm_draw(rng, &factor, w, &mut scratch);
        }
    });
    Ok(SampleBatch {
        values,
        seed,
        meta: ratio_meta("stopped_bm_path", sigma, weights, count),
    })
}

/// Conditional variance of `w1 X_1(y1^{-2}) + w2 X_2(y2^{-2})` given
/// `(Y_1, Y_2) = (y1, y2)` under the theta parametrization; the mixed term
/// enters through `min(t1, t2) = 1 / max(y1^2, y2^2)`.
#[inline]
fn mixture_variance(theta: f64, w1: f64, w2: f64, y1: f64, y2: f64) -> f64 {
    let omt = 1.0 - theta * theta;
    let y1sq = y1 * y1;
    let y2sq = y2 * y2;
    w1 * w1 / (y1sq * omt) - 2.0 * w1 * w2 * theta / (y1sq.max(y2sq) * omt) + w2 * w2 / (y2sq * omt)
}

/// The n = 2 stopped-Brownian-motion combination sampled through its scale
/// mixture representation: draw `(Y_1, Y_2)`, then emit a centered normal
/// with the conditional variance.
pub fn sample_stopped_bm_mixture(
    theta: &ThetaCovariance,
    weights: &Weights,
    count: usize,
    seed: u64,
) -> Result<SampleBatch> {
    if weights.len() != 2 {
        return Err(Error::DimensionMismatch {
            expected: 2,
            actual: weights.len(),
        });
    }
    check_count(count)?;
    let factor = cholesky(&theta.covariance())?;
    let (w1, w2) = (weights.get(0), weights.get(1));
    let th = theta.theta();
    let values = rng::sample_batched(count, 1, seed, tags::BM_MIXTURE, |rng, chunk| {
        let mut y = [0.0f64; 2];
        for out in chunk.iter_mut() {
            *out = loop {
                draw_mvn(rng, &factor, &mut y);
                if y[0] == 0.0 || y[1] == 0.0 {
                    continue;
                }
                let var = mixture_variance(th, w1, w2, y[0], y[1]);
                if !var.is_finite() {
                    continue;
                }
                assert!(var > 0.0, "conditional variance {var} at y = {y:?}");
                let z: f64 = StandardNormal.sample(rng);
                break var.sqrt() * z;
            };
        }
    });
    let mut meta = BatchMeta::new("stopped_bm_mixture", count, 1);
    meta.theta = Some(th);
    meta.weights = Some(weights.as_slice().to_vec());
    Ok(SampleBatch { values, seed, meta })
}

/// Simulates the vector Brownian motion at a single time `t` by accumulating
/// `steps` correlated increments.
fn bm_vector_at_time(
    factor: &CholeskyFactor,
    t: f64,
    steps: usize,
    count: usize,
    seed: u64,
    tag: u64,
) -> VectorBatch {
    let n = factor.dim();
    let dt = t / steps as f64;
    let values = rng::sample_batched(count, n, seed, tag, |rng, chunk| {
        let mut increment = vec![0.0; n];
        for row in chunk.chunks_exact_mut(n) {
            row.fill(0.0);
            for _ in 0..steps {
                draw_mvn(rng, factor, &mut increment);
                for (p, inc) in row.iter_mut().zip(increment.iter()) {
                    *p += dt.sqrt() * inc;
                }
            }
        }
    });
    let mut meta = BatchMeta::new("bm_at_time", count, n);
    meta.scale = Some(t);
    VectorBatch {
        dim: n,
        values,
        seed,
        meta,
    }
}

/// Checks Brownian self-similarity at the probe time 1: compares draws of
/// `X(c)` against `sqrt(c) X(1)` coordinate by coordinate with a two-sample
/// KS test at the 0.01 level. Both sides are built from genuine multi-step
/// paths on independent streams.
pub fn bm_selfsimilarity_check(
    sigma: &CovarianceMatrix,
    c: f64,
    count: usize,
    seed: u64,
) -> Result<bool> {
    if c.is_nan() || c <= 0.0 || c.is_infinite() {
        return Err(Error::InvalidParameter(format!(
            "time scale must be positive, got {c}"
        )));
    }
    check_count(count)?;
    let factor = cholesky(sigma)?;
    let steps = 4;
    let scaled = bm_vector_at_time(&factor, c, steps, count, seed, tags::BM_AT_TIME);
    let unit = bm_vector_at_time(
        &factor,
        1.0,
        steps,
        count,
        seed,
        tags::BM_AT_TIME ^ (1 << 32),
    );
    for j in 0..sigma.dim() {
        let a = EmpiricalSample::new(scaled.coordinate(j))?;
        let b = EmpiricalSample::new(unit.coordinate(j).iter().map(|x| c.sqrt() * x).collect())?;
        if !ks_two_sample(&a, &b, 0.01)?.passes {
            return Ok(false);
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cauchy::{cauchy_cdf, CauchyScale};
    use crate::gauss::theta_to_covariance;
    use crate::rng::substream;
    use crate::stats::ks_one_sample;

    fn ks_standard_cauchy(values: Vec<f64>) -> bool {
        let sample = EmpiricalSample::new(values).unwrap();
        ks_one_sample(&sample, |x| cauchy_cdf(x, CauchyScale::STANDARD), 0.01)
            .unwrap()
            .passes
    }

    #[test]
    fn weights_validation() {
        assert!(Weights::new(vec![0.3, 0.7]).is_ok());
        assert!(Weights::new(vec![1.0]).is_ok());
        assert!(Weights::new(vec![]).is_err());
        assert!(Weights::new(vec![0.5, 0.6]).is_err());
        assert!(Weights::new(vec![-0.1, 1.1]).is_err());
        assert!(Weights::new(vec![0.5, 0.5 + 1e-9]).is_err());
        assert!(Weights::pair(0.3).is_ok());
    }

    #[test]
    fn dimension_mismatch_rejected() {
        let sigma = CovarianceMatrix::identity(2);
        let w = Weights::new(vec![0.2, 0.3, 0.5]).unwrap();
        for result in [
            sample_ratio_pm(&sigma, &w, 10, 0),
            sample_abs_ratio(&sigma, &w, 10, 0),
            sample_stopped_bm_path(&sigma, &w, 10, 0),
        ] {
            assert!(matches!(result, Err(Error::DimensionMismatch { .. })));
        }
        let theta = ThetaCovariance::new(0.1).unwrap();
        assert!(sample_stopped_bm_mixture(&theta, &w, 10, 0).is_err());
    }

    #[test]
    fn scalar_ratio_is_standard_cauchy() {
        let sigma = CovarianceMatrix::identity(1);
        let w = Weights::new(vec![1.0]).unwrap();
        let batch = sample_ratio_pm(&sigma, &w, 1_000_000, 101).unwrap();
        assert!(ks_standard_cauchy(batch.values));
        let batch = sample_abs_ratio(&sigma, &w, 1_000_000, 102).unwrap();
        assert!(ks_standard_cauchy(batch.values));
        let batch = sample_stopped_bm_path(&sigma, &w, 1_000_000, 103).unwrap();
        assert!(ks_standard_cauchy(batch.values));
    }

    #[test]
    fn diagonal_covariance_gives_cauchy_for_all_transforms() {
        // unequal variances exercise the per-coordinate scale cancellation
        let sigma = CovarianceMatrix::diagonal(&[1.0, 4.0, 0.25]).unwrap();
        let w = Weights::new(vec![0.2, 0.5, 0.3]).unwrap();
        let batch = sample_ratio_pm(&sigma, &w, 1_000_000, 104).unwrap();
        assert!(ks_standard_cauchy(batch.values));
        let batch = sample_abs_ratio(&sigma, &w, 1_000_000, 105).unwrap();
        assert!(ks_standard_cauchy(batch.values));
        let batch = sample_stopped_bm_path(&sigma, &w, 1_000_000, 106).unwrap();
        assert!(ks_standard_cauchy(batch.values));
    }

    #[test]
    fn ratio_pm_correlated_is_still_cauchy() {
        let sigma = theta_to_covariance(0.5).unwrap();
        let w = Weights::new(vec![0.3, 0.7]).unwrap();
        let batch = sample_ratio_pm(&sigma, &w, 1_000_000, 107).unwrap();
        assert!(ks_standard_cauchy(batch.values));
    }

    #[test]
    fn abs_ratio_correlated_piles_mass_at_zero() {
        let sigma = theta_to_covariance(0.5).unwrap();
        let w = Weights::new(vec![0.5, 0.5]).unwrap();
        let batch = sample_abs_ratio(&sigma, &w, 1_000_000, 108).unwrap();
        let sample = EmpiricalSample::new(batch.values).unwrap();
        let bin = crate::stats::histogram_density(&sample, 0.05, (-0.025, 0.025)).unwrap()[0];
        let excess = bin.density - 1.0 / std::f64::consts::PI;
        assert!(
            excess > 3.0 * bin.std_error,
            "density at 0 = {} (se {})",
            bin.density,
            bin.std_error
        );
    }

    #[test]
    fn mixture_variance_reduces_when_uncorrelated() {
        let (w1, w2) = (0.3, 0.7);
        for &(y1, y2) in &[(0.5, 1.5), (-2.0, 0.1), (1.0, 1.0)] {
            let var = mixture_variance(0.0, w1, w2, y1, y2);
            let expected = w1 * w1 / (y1 * y1) + w2 * w2 / (y2 * y2);
            approx::assert_relative_eq!(var, expected, epsilon = 1e-14);
        }
    }

    #[test]
    fn mixture_uncorrelated_is_cauchy() {
        let theta = ThetaCovariance::new(0.0).unwrap();
        let w = Weights::new(vec![0.4, 0.6]).unwrap();
        let batch = sample_stopped_bm_mixture(&theta, &w, 1_000_000, 109).unwrap();
        assert!(ks_standard_cauchy(batch.values));
    }

    #[test]
    fn mixture_variance_positive_for_correlated_draws() {
        // the sampler asserts positivity on every draw
        let theta = ThetaCovariance::new(0.5).unwrap();
        let w = Weights::new(vec![0.5, 0.5]).unwrap();
        let batch = sample_stopped_bm_mixture(&theta, &w, 200_000, 110).unwrap();
        assert_eq!(batch.len(), 200_000);
    }

    #[test]
    fn path_and_mixture_agree() {
        let theta = ThetaCovariance::new(0.5).unwrap();
        let w = Weights::new(vec![0.5, 0.5]).unwrap();
        let path = sample_stopped_bm_path(&theta.covariance(), &w, 1_000_000, 111).unwrap();
        let mixture = sample_stopped_bm_mixture(&theta, &w, 1_000_000, 111).unwrap();
        let a = EmpiricalSample::new(path.values).unwrap();
        let b = EmpiricalSample::new(mixture.values).unwrap();
        let res = ks_two_sample(&a, &b, 0.01).unwrap();
        assert!(
            res.passes,
            "statistic {} critical {}",
            res.statistic, res.critical_value
        );
    }

    #[test]
    fn tied_stopping_times_take_zero_length_steps() {
        let factor = cholesky(&theta_to_covariance(0.5).unwrap()).unwrap();
        let mut rng = substream(42, 0);
        let times = [(2.0, 0), (2.0, 1)];
        let mut increment = vec![0.0; 2];
        let mut position = vec![0.0; 2];
        let mut stopped = vec![0.0; 2];
        bm_values_at_own_times(
            &mut rng,
            &factor,
            &times,
            &mut increment,
            &mut position,
            &mut stopped,
        );
        assert!(stopped.iter().all(|v| v.is_finite()));
        // both coordinates are read at the same time, so the second
        // (zero-length) increment must not move the path
        assert_eq!(stopped[0], position[0]);
        assert_eq!(stopped[1], position[1]);
    }

    #[test]
    fn samplers_reproduce_per_seed() {
        let sigma = theta_to_covariance(-0.3).unwrap();
        let w = Weights::new(vec![0.6, 0.4]).unwrap();
        let a = sample_stopped_bm_path(&sigma, &w, 30_000, 9).unwrap();
        let b = sample_stopped_bm_path(&sigma, &w, 30_000, 9).unwrap();
        assert_eq!(a, b);
        let c = sample_abs_ratio(&sigma, &w, 30_000, 9).unwrap();
        let d = sample_abs_ratio(&sigma, &w, 30_000, 9).unwrap();
        assert_eq!(c, d);
        // different samplers with the same seed use independent streams
        assert_ne!(a.values, c.values);
    }

    #[test]
    fn selfsimilarity_trivial_and_scaled() {
        let identity = CovarianceMatrix::identity(1);
        assert!(bm_selfsimilarity_check(&identity, 1.0, 200_000, 13).unwrap());
        assert!(bm_selfsimilarity_check(&identity, 4.0, 200_000, 14).unwrap());
        let sigma = theta_to_covariance(0.5).unwrap();
        assert!(bm_selfsimilarity_check(&sigma, 0.25, 200_000, 15).unwrap());
        assert!(bm_selfsimilarity_check(&sigma, -1.0, 10, 0).is_err());
    }
}
