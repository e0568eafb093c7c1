//! The built-in verification suite: ten numbered criteria covering the
//! density identity, sampler laws, derivative values, tail limits,
//! normalization and the multivariate Cauchy special cases.
//!
//! Every statistical check runs with a pinned seed so the suite is
//! deterministic; the significance levels govern how seeds were chosen, not
//! run-to-run behavior. The quick suite skips only the 1e7-draw
//! histogram-versus-quadrature comparison.

use std::f64::consts::FRAC_1_PI;

use serde::Serialize;

use crate::cauchy::{
    cauchy_cdf, cauchy_pdf, cauchy_pdf_selfref, mv_cauchy_charfn, sample_mv_cauchy, CauchyScale,
    SpectralAtom, SpectralMeasure,
};
use crate::density::{
    dgv0_dtheta_at_zero, finite_difference_derivative, gv_abs, gv_bm, gv_zero, normalization_check,
    tail_functional, DensityKind, DensityModel, QuadratureConfig,
};
use crate::error::Result;
use crate::gauss::{theta_to_covariance, ThetaCovariance};
use crate::stats::{histogram_density, ks_one_sample, ks_two_sample, EmpiricalSample};
use crate::transforms::{
    sample_abs_ratio, sample_ratio_pm, sample_stopped_bm_mixture, sample_stopped_bm_path, Weights,
};

/// Which subset of criteria to run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Suite {
    Quick,
    Full,
}

/// Outcome of one criterion.
#[derive(Debug, Clone, Serialize)]
pub struct CriterionReport {
    pub id: usize,
    pub name: &'static str,
    pub passed: bool,
    pub details: String,
}

struct Check {
    checks: usize,
    failures: Vec<String>,
}

impl Check {
    fn new() -> Self {
        Self {
            checks: 0,
            failures: Vec::new(),
        }
    }

    fn require(&mut self, ok: bool, what: impl FnOnce() -> String) {
        self.checks += 1;
        if !ok {
            self.failures.push(what());
        }
    }
}

fn run_criterion(
    id: usize,
    name: &'static str,
    body: impl FnOnce(&mut Check) -> Result<()>,
) -> CriterionReport {
    let mut check = Check::new();
    let (passed, details) = match body(&mut check) {
        Ok(()) if check.failures.is_empty() => (true, format!("{} checks passed", check.checks)),
        Ok(()) => (false, check.failures.join("; ")),
        Err(e) => (false, format!("error: {e}")),
    };
    CriterionReport {
        id,
        name,
        passed,
        details,
    }
}

fn cfg() -> QuadratureConfig {
    QuadratureConfig::default()
}

fn standard_cauchy_ks(values: Vec<f64>) -> Result<(bool, f64, f64)> {
    let sample = EmpiricalSample::new(values)?;
    let res = ks_one_sample(&sample, |x| cauchy_cdf(x, CauchyScale::STANDARD), 0.01)?;
    Ok((res.passes, res.statistic, res.critical_value))
}

/// Criterion 1: the self-referential form of the Cauchy density agrees with
/// the direct form to 1e-12 across a 1e4-point grid per scale.
pub fn cauchy_density_identity() -> CriterionReport {
    run_criterion(1, "cauchy-density-identity", |check| {
        for &s in &[0.1, 1.0, 10.0] {
            let scale = CauchyScale::new(s)?;
            let mut max_dev = 0.0f64;
            for i in 0..10_000 {
                let x = -100.0 + 200.0 * (i as f64) / 9_999.0;
                max_dev = max_dev.max((cauchy_pdf(x, scale) - cauchy_pdf_selfref(x, scale)).abs());
            }
            check.require(max_dev < 1e-12, || {
                format!("scale {s}: max |pdf - selfref| = {max_dev:e}")
            });
        }
        Ok(())
    })
}

const PM_THETAS: [f64; 6] = [-0.9, -0.5, -0.1, 0.1, 0.5, 0.9];
const WEIGHT_GRID: [f64; 3] = [0.5, 0.3, 0.9];

/// Criterion 2: the ratio combination is standard Cauchy for every
/// covariance; KS at the 0.01 level over an 18-point (theta, w) grid with
/// 1e6 draws each.
pub fn ratio_universality() -> CriterionReport {
    run_criterion(2, "ratio-universality", |check| {
        let mut seed = 2100u64;
        for &theta in &PM_THETAS {
            let sigma = theta_to_covariance(theta)?;
            for &w1 in &WEIGHT_GRID {
                let weights = Weights::pair(w1)?;
                let batch = sample_ratio_pm(&sigma, &weights, 1_000_000, seed)?;
                let (passes, stat, crit) = standard_cauchy_ks(batch.values)?;
                check.require(passes, || {
                    format!("theta={theta} w1={w1}: KS {stat:.5} >= {crit:.5}")
                });
                seed += 1;
            }
        }
        Ok(())
    })
}

/// Criterion 3: with a diagonal covariance every transform is standard
/// Cauchy; the quadrature densities coincide with the Cauchy density on a
/// grid and sampled batches pass KS.
pub fn diagonal_case() -> CriterionReport {
    run_criterion(3, "diagonal-case", |check| {
        let weights = Weights::pair(0.3)?;
        for i in 0..101 {
            let v = -5.0 + 0.1 * i as f64;
            let expected = cauchy_pdf(v, CauchyScale::STANDARD);
            let a = gv_abs(v, 0.0, &weights, &cfg())?;
            let b = gv_bm(v, 0.0, &weights, &cfg())?;
            check.require((a - expected).abs() < 1e-8, || {
                format!("abs density at v={v}: {a} vs {expected}")
            });
            check.require((b - expected).abs() < 1e-8, || {
                format!("bm density at v={v}: {b} vs {expected}")
            });
        }
        let sigma = theta_to_covariance(0.0)?;
        let batches = [
            ("pm", sample_ratio_pm(&sigma, &weights, 1_000_000, 2301)?),
            ("abs", sample_abs_ratio(&sigma, &weights, 1_000_000, 2302)?),
            (
                "bm",
                sample_stopped_bm_path(&sigma, &weights, 1_000_000, 2303)?,
            ),
        ];
        for (name, batch) in batches {
            let (passes, stat, crit) = standard_cauchy_ks(batch.values)?;
            check.require(passes, || format!("{name}: KS {stat:.5} >= {crit:.5}"));
        }
        Ok(())
    })
}

/// Criterion 4: for small positive theta the central density strictly
/// exceeds 1/pi, ruling out a Cauchy law.
pub fn non_cauchy_detection() -> CriterionReport {
    run_criterion(4, "non-cauchy-detection", |check| {
        let weights = Weights::pair(0.5)?;
        for kind in [DensityKind::AbsRatio, DensityKind::StoppedBm] {
            for &theta in &[0.05, 0.1, 0.2] {
                let model = DensityModel::new(kind, theta, weights.clone())?;
                let deviation = gv_zero(&model, &cfg())? - FRAC_1_PI;
                check.require(deviation > 1e-4, || {
                    format!("{kind} theta={theta}: g(0) - 1/pi = {deviation:e}")
                });
            }
        }
        Ok(())
    })
}

/// Criterion 5: the displayed theta-derivatives of g_V(0) at theta = 0
/// evaluate to 1/8 (abs) and 1/(4 pi) (bm) for equal weights, and central
/// finite differences confirm the differentiation step.
pub fn derivative_at_zero() -> CriterionReport {
    run_criterion(5, "derivative-at-zero", |check| {
        let weights = Weights::pair(0.5)?;
        let expected = [
            (DensityKind::AbsRatio, 0.125),
            (DensityKind::StoppedBm, FRAC_1_PI / 4.0),
        ];
        for (kind, reference) in expected {
            let quadrature = dgv0_dtheta_at_zero(kind, &weights, &cfg())?;
            check.require((quadrature - reference).abs() < 1e-8, || {
                format!("{kind}: derivative {quadrature} vs {reference}")
            });
            let fd = finite_difference_derivative(kind, &weights, 1e-4, &cfg())?;
            check.require((quadrature - fd).abs() < 1e-5, || {
                format!("{kind}: finite difference {fd} vs quadrature {quadrature}")
            });
        }
        Ok(())
    })
}

/// Criterion 6: `v^2 g_V(v)` approaches `1/pi`, within 1e-3 at v = 1e4 and
/// 1e-4 at v = 1e5, for both kinds across a theta grid.
pub fn tail_limit() -> CriterionReport {
    run_criterion(6, "tail-limit", |check| {
        let weights = Weights::pair(0.3)?;
        for kind in [DensityKind::AbsRatio, DensityKind::StoppedBm] {
            for &theta in &[0.0, 0.25, 0.5, 0.75] {
                let model = DensityModel::new(kind, theta, weights.clone())?;
                for (v, tol) in [(1e4, 1e-3), (1e5, 1e-4)] {
                    let value = tail_functional(&model, v, &cfg())?;
                    check.require((value - FRAC_1_PI).abs() < tol, || {
                        format!(
                            "{kind} theta={theta} v={v:e}: |{value} - 1/pi| = {:e}",
                            (value - FRAC_1_PI).abs()
                        )
                    });
                }
            }
        }
        Ok(())
    })
}

/// Criterion 7: the quadrature densities integrate to one within 1e-6 over
/// a six-point (kind, theta, w) grid.
pub fn normalization() -> CriterionReport {
    run_criterion(7, "normalization", |check| {
        let grid = [
            (DensityKind::AbsRatio, 0.5, 0.3),
            (DensityKind::AbsRatio, -0.5, 0.5),
            (DensityKind::AbsRatio, 0.9, 0.9),
            (DensityKind::StoppedBm, 0.5, 0.5),
            (DensityKind::StoppedBm, -0.5, 0.3),
            (DensityKind::StoppedBm, 0.8, 0.6),
        ];
        for (kind, theta, w1) in grid {
            let model = DensityModel::new(kind, theta, Weights::pair(w1)?)?;
            let total = normalization_check(&model, &cfg())?;
            check.require((total - 1.0).abs() < 1e-6, || {
                format!("{kind} theta={theta} w1={w1}: integral {total}")
            });
        }
        Ok(())
    })
}

/// Criterion 8 (full suite): 1e7-draw histograms agree with the quadrature
/// densities bin by bin within four binomial standard errors.
pub fn sampler_density_agreement() -> CriterionReport {
    run_criterion(8, "sampler-density-agreement", |check| {
        let cases = [
            (DensityKind::AbsRatio, 0.5, 0.3, 2801u64),
            (DensityKind::StoppedBm, 0.5, 0.5, 2802u64),
        ];
        for (kind, theta, w1, seed) in cases {
            let weights = Weights::pair(w1)?;
            let sigma = theta_to_covariance(theta)?;
            let batch = match kind {
                DensityKind::AbsRatio => sample_abs_ratio(&sigma, &weights, 10_000_000, seed)?,
                DensityKind::StoppedBm => {
                    sample_stopped_bm_path(&sigma, &weights, 10_000_000, seed)?
                }
            };
            let sample = EmpiricalSample::new(batch.values)?;
            let bins = histogram_density(&sample, 0.05, (-5.025, 5.025))?;
            for bin in bins {
                let density = match kind {
                    DensityKind::AbsRatio => gv_abs(bin.center, theta, &weights, &cfg())?,
                    DensityKind::StoppedBm => gv_bm(bin.center, theta, &weights, &cfg())?,
                };
                check.require((bin.density - density).abs() < 4.0 * bin.std_error, || {
                    format!(
                        "{kind} bin at {:.2}: histogram {} vs density {} (se {})",
                        bin.center, bin.density, density, bin.std_error
                    )
                });
            }
        }
        Ok(())
    })
}

/// Criterion 9: the path construction and the scale-mixture construction of
/// the stopped-BM combination agree in law across a nine-point grid.
pub fn stopped_bm_cross_oracle() -> CriterionReport {
    run_criterion(9, "stopped-bm-cross-oracle", |check| {
        let mut seed = 2900u64;
        for &theta in &[-0.5, 0.25, 0.75] {
            let tc = ThetaCovariance::new(theta)?;
            for &w1 in &WEIGHT_GRID {
                let weights = Weights::pair(w1)?;
                let path = sample_stopped_bm_path(&tc.covariance(), &weights, 1_000_000, seed)?;
                let mixture = sample_stopped_bm_mixture(&tc, &weights, 1_000_000, seed)?;
                let a = EmpiricalSample::new(path.values)?;
                let b = EmpiricalSample::new(mixture.values)?;
                let res = ks_two_sample(&a, &b, 0.01)?;
                check.require(res.passes, || {
                    format!(
                        "theta={theta} w1={w1}: KS {:.5} >= {:.5}",
                        res.statistic, res.critical_value
                    )
                });
                seed += 1;
            }
        }
        Ok(())
    })
}

/// Criterion 10: the spectral-measure sampler reproduces the multivariate
/// Cauchy special cases — independent axis atoms, almost-surely equal
/// coordinates on the diagonal, and the characteristic function on a grid.
pub fn multivariate_cauchy() -> CriterionReport {
    run_criterion(10, "multivariate-cauchy", |check| {
        let axes = SpectralMeasure::axes(2);
        let batch = sample_mv_cauchy(&axes, 1_000_000, 2951)?;
        for j in 0..2 {
            let (passes, stat, crit) = standard_cauchy_ks(batch.coordinate(j))?;
            check.require(passes, || {
                format!("axis coordinate {j}: KS {stat:.5} >= {crit:.5}")
            });
        }

        let diagonal = SpectralMeasure::diagonal(2);
        let batch = sample_mv_cauchy(&diagonal, 100_000, 2952)?;
        let identical = batch.values.chunks_exact(2).all(|row| row[0] == row[1]);
        check.require(identical, || "diagonal atom: coordinates differ".into());

        // mixed measure with standardized marginals
        let mixed = SpectralMeasure::new(
            2,
            vec![
                SpectralAtom::new(vec![1.0, 0.0], 0.5),
                SpectralAtom::new(vec![0.0, 1.0], 0.5),
                SpectralAtom::new(vec![0.5f64.sqrt(), 0.5f64.sqrt()], 0.5f64.sqrt()),
            ],
        )?;
        let m = 1_000_000usize;
        let batch = sample_mv_cauchy(&mixed, m, 2953)?;
        for i in 0..20 {
            let radius = [0.25, 0.5, 1.0, 2.0][i % 4];
            let angle = std::f64::consts::PI * (i / 4) as f64 / 5.0;
            let t = [radius * angle.cos(), radius * angle.sin()];
            let expected = mv_cauchy_charfn(&t, &mixed)?;
            let mut sum = 0.0;
            let mut sum_sq = 0.0;
            for row in batch.values.chunks_exact(2) {
                let c = (t[0] * row[0] + t[1] * row[1]).cos();
                sum += c;
                sum_sq += c * c;
            }
            let mean = sum / m as f64;
            let variance = (sum_sq / m as f64 - mean * mean).max(0.0);
            let se = (variance / m as f64).sqrt();
            check.require((mean - expected).abs() <= 5.0 * se, || {
                format!(
                    "charfn at t=({:.3},{:.3}): empirical {mean} vs {expected} (se {se:e})",
                    t[0], t[1]
                )
            });
        }
        Ok(())
    })
}

/// Runs the requested suite and returns one report per criterion.
pub fn run_suite(suite: Suite) -> Vec<CriterionReport> {
    let mut reports = vec![
        cauchy_density_identity(),
        ratio_universality(),
        diagonal_case(),
        non_cauchy_detection(),
        derivative_at_zero(),
        tail_limit(),
        normalization(),
    ];
    if suite == Suite::Full {
        reports.push(sampler_density_agreement());
    }
    reports.push(stopped_bm_cross_oracle());
    reports.push(multivariate_cauchy());
    reports
}
