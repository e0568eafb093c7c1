//! Adaptive quadrature on finite and semi-infinite intervals.
//!
//! Each interval is integrated with the embedded 10-point Gauss / 21-point
//! Kronrod pair; the interval with the largest error estimate is bisected
//! until the global estimate meets the requested tolerance. A semi-infinite
//! upper limit is handled by the substitution `x = a + u / (1 - u)` with
//! Jacobian `1 / (1 - u)^2`, which maps `[a, inf)` onto `[0, 1)`.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::error::{Error, Result};

/// Tolerances and subdivision budget for adaptive integration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureConfig {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_subdivisions: usize,
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        Self {
            abs_tol: 1e-10,
            rel_tol: 1e-8,
            max_subdivisions: 2000,
        }
    }
}

impl QuadratureConfig {
    pub fn new(abs_tol: f64, rel_tol: f64, max_subdivisions: usize) -> Result<Self> {
        let cfg = Self {
            abs_tol,
            rel_tol,
            max_subdivisions,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.abs_tol.is_nan()
            || self.abs_tol <= 0.0
            || self.rel_tol.is_nan()
            || self.rel_tol <= 0.0
        {
            return Err(Error::InvalidParameter(format!(
                "quadrature tolerances must be positive, got abs {} rel {}",
                self.abs_tol, self.rel_tol
            )));
        }
        if self.max_subdivisions == 0 {
            return Err(Error::InvalidParameter(
                "max_subdivisions must be at least 1".into(),
            ));
        }
        Ok(())
    }
}

/// Value, error estimate and work spent by one adaptive integration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntegralResult {
    pub value: f64,
    pub error_estimate: f64,
    pub subdivisions_used: usize,
}

impl IntegralResult {
    pub(crate) fn combine(results: &[IntegralResult]) -> IntegralResult {
        IntegralResult {
            value: results.iter().map(|r| r.value).sum(),
            error_estimate: results.iter().map(|r| r.error_estimate).sum(),
            subdivisions_used: results.iter().map(|r| r.subdivisions_used).sum(),
        }
    }
}

/// Integrates `f` from `lower` to `upper`; `upper` may be `f64::INFINITY`.
pub fn integrate_adaptive<F>(
    f: F,
    lower: f64,
    upper: f64,
    cfg: &QuadratureConfig,
) -> Result<IntegralResult>
where
    F: Fn(f64) -> f64,
{
    integrate_adaptive_seeded(f, lower, upper, &[], cfg)
}

/// As [`integrate_adaptive`], with interior breakpoints seeding the initial
/// subdivision. Useful when the integrand is known to concentrate at a scale
/// the first bisections would otherwise have to discover.
pub fn integrate_adaptive_seeded<F>(
    f: F,
    lower: f64,
    upper: f64,
    breakpoints: &[f64],
    cfg: &QuadratureConfig,
) -> Result<IntegralResult>
where
    F: Fn(f64) -> f64,
{
    cfg.validate()?;
    if lower.is_nan() || upper.is_nan() || lower.is_infinite() {
        return Err(Error::InvalidParameter(format!(
            "invalid integration bounds [{lower}, {upper}]"
        )));
    }
    if upper.is_infinite() {
        let mapped = |u: f64| {
            let one_minus = 1.0 - u;
            f(lower + u / one_minus) / (one_minus * one_minus)
        };
        let seeds: Vec<f64> = breakpoints
            .iter()
            .filter(|&&x| x > lower && x.is_finite())
            .map(|&x| {
                let d = x - lower;
                d / (1.0 + d)
            })
            .collect();
        adaptive_core(&mapped, 0.0, 1.0, &seeds, cfg)
    } else {
        if upper <= lower {
            return Err(Error::InvalidParameter(format!(
                "upper bound {upper} must exceed lower bound {lower}"
            )));
        }
        let seeds: Vec<f64> = breakpoints
            .iter()
            .copied()
            .filter(|&x| x > lower && x < upper)
            .collect();
        adaptive_core(&f, lower, upper, &seeds, cfg)
    }
}

struct Segment {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

impl PartialEq for Segment {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}
impl Eq for Segment {}
impl PartialOrd for Segment {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Segment {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

fn adaptive_core<F>(
    f: &F,
    a: f64,
    b: f64,
    seeds: &[f64],
    cfg: &QuadratureConfig,
) -> Result<IntegralResult>
where
    F: Fn(f64) -> f64,
{
    let mut cuts: Vec<f64> = Vec::with_capacity(seeds.len() + 2);
    cuts.push(a);
    cuts.extend_from_slice(seeds);
    cuts.push(b);
    cuts.sort_unstable_by(f64::total_cmp);
    cuts.dedup();

    let mut heap = BinaryHeap::new();
    let (mut total_value, mut total_error) = (0.0f64, 0.0f64);
    for pair in cuts.windows(2) {
        let (value, error) = gauss_kronrod_21(f, pair[0], pair[1]);
        total_value += value;
        total_error += error;
        heap.push(Segment {
            a: pair[0],
            b: pair[1],
            value,
            error,
        });
    }

    let mut subdivisions = 0usize;
    loop {
        let tolerance = cfg.abs_tol.max(cfg.rel_tol * total_value.abs());
        if total_error <= tolerance {
            return Ok(IntegralResult {
                value: total_value,
                error_estimate: total_error,
                subdivisions_used: subdivisions,
            });
        }
        if subdivisions >= cfg.max_subdivisions {
            return Err(Error::QuadratureDidNotConverge {
                error_estimate: total_error,
                subdivisions,
            });
        }
        let worst = heap.pop().expect("heap holds at least one segment");
        let mid = 0.5 * (worst.a + worst.b);
        if mid <= worst.a || mid >= worst.b {
            // interval is a single ulp wide; refining further is pointless
            return Err(Error::QuadratureDidNotConverge {
                error_estimate: total_error,
                subdivisions,
            });
        }
        total_value -= worst.value;
        total_error -= worst.error;
        for (lo, hi) in [(worst.a, mid), (mid, worst.b)] {
            let (value, error) = gauss_kronrod_21(f, lo, hi);
            total_value += value;
            total_error += error;
            heap.push(Segment {
                a: lo,
                b: hi,
                value,
                error,
            });
        }
        subdivisions += 1;
    }
}

// Nodes and weights of the 21-point Kronrod rule with embedded 10-point
// Gauss rule (QUADPACK dqk21 constants).
#[allow(clippy::excessive_precision)]
const XGK: [f64; 11] = [
    0.995_657_163_025_808_080_735_527_280_689_003,
    0.973_906_528_517_171_720_077_964_012_084_452,
    0.930_157_491_355_708_226_001_207_180_059_508,
    0.865_063_366_688_984_510_732_096_688_423_493,
    0.780_817_726_586_416_897_063_717_578_345_042,
    0.679_409_568_299_024_406_234_327_365_114_874,
    0.562_757_134_668_604_683_339_000_099_272_694,
    0.433_395_394_129_247_190_799_265_943_165_784,
    0.294_392_862_701_460_198_131_126_603_103_866,
    0.148_874_338_981_631_210_884_826_001_129_720,
    0.000_000_000_000_000_000_000_000_000_000_000,
];
#[allow(clippy::excessive_precision)]
const WG: [f64; 5] = [
    0.066_671_344_308_688_137_593_568_809_893_332,
    0.149_451_349_150_580_593_145_776_339_657_697,
    0.219_086_362_515_982_043_995_534_934_228_163,
    0.269_266_719_309_996_355_091_226_921_569_469,
    0.295_524_224_714_752_870_173_892_994_651_338,
];
#[allow(clippy::excessive_precision)]
const WGK: [f64; 11] = [
    0.011_694_638_867_371_874_278_064_396_062_192,
    0.032_558_162_307_964_727_478_818_972_459_390,
    0.054_755_896_574_351_996_031_381_300_244_580,
    0.075_039_674_810_919_952_767_043_140_916_190,
    0.093_125_454_583_697_605_535_065_465_083_366,
    0.109_387_158_802_297_641_899_210_590_325_805,
    0.123_491_976_262_065_851_077_958_109_831_074,
    0.134_709_217_311_473_325_928_054_001_771_707,
    0.142_775_938_577_060_080_797_094_273_138_717,
    0.147_739_104_901_338_491_374_841_515_972_068,
    0.149_445_554_002_916_905_664_936_468_389_821,
];

/// One 21-point Kronrod evaluation on `[a, b]`; returns the Kronrod value
/// and the QUADPACK-rescaled error estimate.
fn gauss_kronrod_21<F>(f: &F, a: f64, b: f64) -> (f64, f64)
where
    F: Fn(f64) -> f64,
{
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let f_center = f(center);

    let mut fv1 = [0.0f64; 10];
    let mut fv2 = [0.0f64; 10];
    let mut res_gauss = 0.0;
    let mut res_kronrod = f_center * WGK[10];
    let mut res_abs = res_kronrod.abs();

    for j in 0..10 {
        let x = half * XGK[j];
        let f1 = f(center - x);
        let f2 = f(center + x);
        fv1[j] = f1;
        fv2[j] = f2;
        let sum = f1 + f2;
        if j % 2 == 1 {
            res_gauss += WG[j / 2] * sum;
        }
        res_kronrod += WGK[j] * sum;
        res_abs += WGK[j] * (f1.abs() + f2.abs());
    }

    let mean = 0.5 * res_kronrod;
    let mut res_asc = WGK[10] * (f_center - mean).abs();
    for j in 0..10 {
        res_asc += WGK[j] * ((fv1[j] - mean).abs() + (fv2[j] - mean).abs());
    }

    let value = res_kronrod * half;
    let raw_err = ((res_kronrod - res_gauss) * half).abs();
    res_abs *= half.abs();
    res_asc *= half.abs();

    let mut error = raw_err;
    if res_asc != 0.0 && error != 0.0 {
        error = res_asc * 1.0f64.min((200.0 * error / res_asc).powf(1.5));
    }
    if res_abs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        error = error.max(50.0 * f64::EPSILON * res_abs);
    }
    (value, error)
}
