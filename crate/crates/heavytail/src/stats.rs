//! Empirical-distribution machinery: ECDFs, Kolmogorov-Smirnov tests and
//! fixed-bin histogram density estimates.
//!
//! Critical values use the asymptotic Kolmogorov distribution; every consumer
//! in this crate works with samples of 1e5 draws or more, where the
//! asymptotic regime is accurate.

use crate::error::{Error, Result};

/// Significance levels with supported critical values.
const SUPPORTED_ALPHAS: [f64; 3] = [0.05, 0.01, 0.001];

/// A sample stored in ascending order.
#[derive(Debug, Clone, PartialEq)]
pub struct EmpiricalSample {
    sorted: Vec<f64>,
}

impl EmpiricalSample {
    pub fn new(mut values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::EmptySample);
        }
        values.sort_unstable_by(f64::total_cmp);
        Ok(Self { sorted: values })
    }

    pub fn count(&self) -> usize {
        self.sorted.len()
    }

    pub fn sorted_values(&self) -> &[f64] {
        &self.sorted
    }
}

/// Outcome of a Kolmogorov-Smirnov test at a fixed significance level.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KsResult {
    pub statistic: f64,
    pub critical_value: f64,
    pub alpha: f64,
    pub passes: bool,
}

/// Inverse of the asymptotic Kolmogorov distribution at level `alpha`:
/// `c(alpha) = sqrt(-ln(alpha / 2) / 2)`. The truncation error of the
/// one-term inversion is below 1e-9 for the supported levels.
fn kolmogorov_coefficient(alpha: f64) -> Result<f64> {
    if !SUPPORTED_ALPHAS.contains(&alpha) {
        return Err(Error::InvalidParameter(format!(
            "alpha must be one of {SUPPORTED_ALPHAS:?}, got {alpha}"
        )));
    }
    Ok((-(alpha / 2.0).ln() / 2.0).sqrt())
}

/// One-sample KS test of `sample` against the continuous CDF `cdf`.
pub fn ks_one_sample<F>(sample: &EmpiricalSample, cdf: F, alpha: f64) -> Result<KsResult>
where
    F: Fn(f64) -> f64,
{
    let c = kolmogorov_coefficient(alpha)?;
    let n = sample.count() as f64;
    let mut statistic = 0.0f64;
    for (i, &x) in sample.sorted_values().iter().enumerate() {
        let f = cdf(x);
        let upper = (i as f64 + 1.0) / n - f;
        let lower = f - i as f64 / n;
        statistic = statistic.max(upper).max(lower);
    }
    let critical_value = c / n.sqrt();
    Ok(KsResult {
        statistic,
        critical_value,
        alpha,
        passes: statistic < critical_value,
    })
}

/// Two-sample KS test: sup difference of the two ECDFs with the asymptotic
/// critical value scaled by `sqrt(n m / (n + m))`.
pub fn ks_two_sample(a: &EmpiricalSample, b: &EmpiricalSample, alpha: f64) -> Result<KsResult> {
    let c = kolmogorov_coefficient(alpha)?;
    let (xs, ys) = (a.sorted_values(), b.sorted_values());
    let (n, m) = (xs.len() as f64, ys.len() as f64);
    let (mut i, mut j) = (0usize, 0usize);
    let mut statistic = 0.0f64;
    while i < xs.len() && j < ys.len() {
        let t = xs[i].min(ys[j]);
        while i < xs.len() && xs[i] <= t {
            i += 1;
        }
        while j < ys.len() && ys[j] <= t {
            j += 1;
        }
        statistic = statistic.max((i as f64 / n - j as f64 / m).abs());
    }
    let critical_value = c * ((n + m) / (n * m)).sqrt();
    Ok(KsResult {
        statistic,
        critical_value,
        alpha,
        passes: statistic < critical_value,
    })
}

/// One histogram cell: midpoint, density estimate and its binomial
/// standard error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HistogramBin {
    pub center: f64,
    pub density: f64,
    pub std_error: f64,
}

/// Fixed-bin density estimate over `range`, one bin per `bin_width`.
/// The estimate in a bin is `count / (n * bin_width)` and its standard error
/// `sqrt(p (1 - p) / n) / bin_width` with `p` the bin proportion.
pub fn histogram_density(
    sample: &EmpiricalSample,
    bin_width: f64,
    range: (f64, f64),
) -> Result<Vec<HistogramBin>> {
    if bin_width.is_nan() || bin_width <= 0.0 {
        return Err(Error::InvalidParameter(format!(
            "bin width must be positive, got {bin_width}"
        )));
    }
    let (lo, hi) = range;
    if hi.partial_cmp(&lo) != Some(std::cmp::Ordering::Greater) {
        return Err(Error::InvalidParameter(format!("empty range [{lo}, {hi})")));
    }
    let bins = ((hi - lo) / bin_width).round().max(1.0) as usize;
    let n = sample.count() as f64;
    let sorted = sample.sorted_values();
    let mut out = Vec::with_capacity(bins);
    for k in 0..bins {
        let left = lo + k as f64 * bin_width;
        let right = lo + (k + 1) as f64 * bin_width;
        let start = sorted.partition_point(|&x| x < left);
        let end = sorted.partition_point(|&x| x < right);
        let p = (end - start) as f64 / n;
        out.push(HistogramBin {
            center: 0.5 * (left + right),
            density: p / bin_width,
            std_error: (p * (1.0 - p) / n).sqrt() / bin_width,
        });
    }
    Ok(out)
}
