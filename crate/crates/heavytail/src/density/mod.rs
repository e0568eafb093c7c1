//! Exact evaluation of the closed-form densities of the absolute-value and
//! stopped-Brownian-motion combinations under the 2x2 equal-variance
//! parametrization, plus the quantities that decide "Cauchy or not Cauchy":
//! the central value `g_V(0)`, its theta-derivative at zero, the tail
//! functional `v^2 g_V(v)` and the normalization integral.
//!
//! The `pm` transform has no model here: its law is exactly standard Cauchy
//! for every covariance, so there is nothing to integrate.

mod quad;

pub use quad::{integrate_adaptive, integrate_adaptive_seeded, IntegralResult, QuadratureConfig};

use std::f64::consts::{FRAC_1_PI, PI};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::transforms::{TransformKind, Weights};

/// Tolerance on `|integral of g_V - 1|` accepted by verdicts.
pub const NORMALIZATION_TOL: f64 = 1e-6;
/// Default half-width of the "is Cauchy" decision band around `1/pi`.
pub const DEFAULT_DECISION_TOL: f64 = 1e-6;
/// Probe point used for tail corroboration in verdicts.
pub const TAIL_PROBE_V: f64 = 1e4;

/// The two transformations whose densities require quadrature.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum DensityKind {
    #[serde(rename = "abs")]
    AbsRatio,
    #[serde(rename = "bm")]
    StoppedBm,
}

impl std::fmt::Display for DensityKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            DensityKind::AbsRatio => "abs",
            DensityKind::StoppedBm => "bm",
        })
    }
}

impl TryFrom<TransformKind> for DensityKind {
    type Error = Error;

    fn try_from(kind: TransformKind) -> Result<Self> {
        match kind {
            TransformKind::AbsRatio => Ok(DensityKind::AbsRatio),
            TransformKind::StoppedBm => Ok(DensityKind::StoppedBm),
            TransformKind::RatioPm => Err(Error::InvalidParameter(
                "the pm transform is exactly standard Cauchy; no density model exists".into(),
            )),
        }
    }
}

/// Selects one integrand family: transform kind, correlation parameter and
/// the two convex weights.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DensityModel {
    kind: DensityKind,
    theta: f64,
    weights: Weights,
}

impl DensityModel {
    pub fn new(kind: DensityKind, theta: f64, weights: Weights) -> Result<Self> {
        if !theta.is_finite() || theta.abs() >= 1.0 {
            return Err(Error::InvalidParameter(format!(
                "theta must lie in (-1, 1), got {theta}"
            )));
        }
        if weights.len() != 2 {
            return Err(Error::DimensionMismatch {
                expected: 2,
                actual: weights.len(),
            });
        }
        Ok(Self {
            kind,
            theta,
            weights,
        })
    }

    pub fn kind(&self) -> DensityKind {
        self.kind
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn weights(&self) -> &Weights {
        &self.weights
    }

    /// Density `g_V(v)` for this model.
    pub fn density(&self, v: f64, cfg: &QuadratureConfig) -> Result<f64> {
        self.density_quad(v, cfg).map(|r| r.value)
    }

    /// Density with error estimate and subdivision count.
    pub fn density_quad(&self, v: f64, cfg: &QuadratureConfig) -> Result<IntegralResult> {
        gv_quad(self.kind, v, self.theta, &self.weights, 1.0, cfg)
    }
}

fn check_pair(theta: f64, weights: &Weights) -> Result<(f64, f64)> {
    if !theta.is_finite() || theta.abs() >= 1.0 {
        return Err(Error::InvalidParameter(format!(
            "theta must lie in (-1, 1), got {theta}"
        )));
    }
    if weights.len() != 2 {
        return Err(Error::DimensionMismatch {
            expected: 2,
            actual: weights.len(),
        });
    }
    Ok((weights.get(0), weights.get(1)))
}

/// Shared evaluator for the general-v densities. `scale` multiplies the
/// integrand; the tail functional passes `v^2` so the quadrature tolerances
/// apply to `v^2 g_V(v)` instead of the vanishing density itself.
fn gv_quad(
    kind: DensityKind,
    v: f64,
    theta: f64,
    weights: &Weights,
    scale: f64,
    cfg: &QuadratureConfig,
) -> Result<IntegralResult> {
    let (w1, w2) = check_pair(theta, weights)?;
    let v_sq = v * v;
    let one_minus_theta_sq = 1.0 - theta * theta;
    let prefactor = scale * one_minus_theta_sq / (2.0 * PI);

    match kind {
        DensityKind::AbsRatio => {
            // mass concentrates near x ~ 1/|v| and x ~ |v| for large |v|
            let mut breaks = vec![1.0];
            if v_sq > 1.0 {
                let av = v_sq.sqrt();
                breaks.push(1.0 / av);
                breaks.push(av);
            }
            let mut parts = Vec::with_capacity(2);
            for sign in [1.0, -1.0] {
                let f = |x: f64| {
                    let q = (w2 * x - 2.0 * theta * w1) * w2 * x + w1 * w1;
                    let a = x * x + sign * 2.0 * theta * x + 1.0;
                    prefactor * q * x / (q * a + one_minus_theta_sq * v_sq * x * x).powf(1.5)
                };
                parts.push(integrate_adaptive_seeded(
                    f,
                    0.0,
                    f64::INFINITY,
                    &breaks,
                    cfg,
                )?);
            }
            Ok(IntegralResult::combine(&parts))
        }
        DensityKind::StoppedBm => {
            let mut breaks = Vec::new();
            if v_sq > 1.0 {
                breaks.push(1.0 / v_sq.sqrt());
            }
            let mut parts = Vec::with_capacity(4);
            for (a_w, b_w) in [(w1, w2), (w2, w1)] {
                for sign in [1.0, -1.0] {
                    let f = |x: f64| {
                        let x_sq = x * x;
                        let q = a_w * a_w + (b_w * b_w - 2.0 * w1 * w2 * theta) * x_sq;
                        let a = x_sq + sign * 2.0 * theta * x + 1.0;
                        prefactor * q * x / (q * a + one_minus_theta_sq * v_sq * x_sq).powf(1.5)
                    };
                    parts.push(integrate_adaptive_seeded(f, 0.0, 1.0, &breaks, cfg)?);
                }
            }
            Ok(IntegralResult::combine(&parts))
        }
    }
}

/// Density of `w1 X_1/|Y_1| + w2 X_2/|Y_2|`: the sum of two semi-infinite
/// integrals with integrands
/// `(1-t^2) Q(x) x / (2 pi [Q(x)(x^2 +- 2 t x + 1) + (1-t^2) v^2 x^2]^{3/2})`
/// where `Q(x) = w2^2 x^2 - 2 t w1 w2 x + w1^2`.
pub fn gv_abs(v: f64, theta: f64, weights: &Weights, cfg: &QuadratureConfig) -> Result<f64> {
    gv_abs_quad(v, theta, weights, cfg).map(|r| r.value)
}

/// As [`gv_abs`], returning the combined quadrature diagnostics.
pub fn gv_abs_quad(
    v: f64,
    theta: f64,
    weights: &Weights,
    cfg: &QuadratureConfig,
) -> Result<IntegralResult> {
    gv_quad(DensityKind::AbsRatio, v, theta, weights, 1.0, cfg)
}

/// Density of `w1 X_1(Y_1^{-2}) + w2 X_2(Y_2^{-2})`: four finite integrals
/// over `[0, 1]`, one per sign of the cross term and per weight ordering,
/// with `Q(x) = a^2 - 2 w1 w2 t x^2 + b^2 x^2` for `(a, b)` in
/// `{(w1, w2), (w2, w1)}`.
pub fn gv_bm(v: f64, theta: f64, weights: &Weights, cfg: &QuadratureConfig) -> Result<f64> {
    gv_bm_quad(v, theta, weights, cfg).map(|r| r.value)
}

/// As [`gv_bm`], returning the combined quadrature diagnostics.
pub fn gv_bm_quad(
    v: f64,
    theta: f64,
    weights: &Weights,
    cfg: &QuadratureConfig,
) -> Result<IntegralResult> {
    gv_quad(DensityKind::StoppedBm, v, theta, weights, 1.0, cfg)
}

/// `g_V(0)` from the specialized v = 0 integrands, in which the bracket
/// factors into `Q(x)^{3/2} (x^2 +- 2 t x + 1)^{3/2}`. This is a coding of
/// the density independent of the general-v routines and cross-checks them.
pub fn gv_zero(model: &DensityModel, cfg: &QuadratureConfig) -> Result<f64> {
    let (w1, w2) = (model.weights.get(0), model.weights.get(1));
    let theta = model.theta;
    let one_minus_theta_sq = 1.0 - theta * theta;
    let prefactor = one_minus_theta_sq / (2.0 * PI);

    match model.kind {
        DensityKind::AbsRatio => {
            let mut parts = Vec::with_capacity(2);
            for sign in [1.0, -1.0] {
                let f = |x: f64| {
                    let q = (w2 * x - 2.0 * theta * w1) * w2 * x + w1 * w1;
                    let a = x * x + sign * 2.0 * theta * x + 1.0;
                    prefactor * q * x / (q.powf(1.5) * a.powf(1.5))
                };
                parts.push(integrate_adaptive_seeded(
                    f,
                    0.0,
                    f64::INFINITY,
                    &[1.0],
                    cfg,
                )?);
            }
            Ok(IntegralResult::combine(&parts).value)
        }
        DensityKind::StoppedBm => {
            let mut parts = Vec::with_capacity(4);
            for (a_w, b_w) in [(w1, w2), (w2, w1)] {
                for sign in [1.0, -1.0] {
                    let f = |x: f64| {
                        let x_sq = x * x;
                        let q = a_w * a_w + (b_w * b_w - 2.0 * w1 * w2 * theta) * x_sq;
                        let a = x_sq + sign * 2.0 * theta * x + 1.0;
                        prefactor * q * x / (q.powf(1.5) * a.powf(1.5))
                    };
                    parts.push(integrate_adaptive(f, 0.0, 1.0, cfg)?);
                }
            }
            Ok(IntegralResult::combine(&parts).value)
        }
    }
}

/// The derivative of `g_V(0)` with respect to theta at theta = 0, as a
/// single displayed integral per kind. Nonnegative, and zero exactly when
/// one of the weights vanishes.
pub fn dgv0_dtheta_at_zero(
    kind: DensityKind,
    weights: &Weights,
    cfg: &QuadratureConfig,
) -> Result<f64> {
    let (w1, w2) = check_pair(0.0, weights)?;
    match kind {
        DensityKind::AbsRatio => {
            let f = |x: f64| {
                let x_sq = x * x;
                w1 * w2 * x_sq
                    / (PI * (w1 * w1 + w2 * w2 * x_sq).powf(1.5) * (x_sq + 1.0).powf(1.5))
            };
            Ok(integrate_adaptive_seeded(f, 0.0, f64::INFINITY, &[1.0], cfg)?.value)
        }
        DensityKind::StoppedBm => {
            let mut total = 0.0;
            for (a_w, b_w) in [(w1, w2), (w2, w1)] {
                let f = |x: f64| {
                    let x_sq = x * x;
                    w1 * w2 * x_sq * x
                        / (PI * (a_w * a_w + b_w * b_w * x_sq).powf(1.5) * (x_sq + 1.0).powf(1.5))
                };
                total += integrate_adaptive(f, 0.0, 1.0, cfg)?.value;
            }
            Ok(total)
        }
    }
}

/// Central finite difference `(g_V(0; +h) - g_V(0; -h)) / 2h`, validating
/// the differentiation-under-the-integral step.
pub fn finite_difference_derivative(
    kind: DensityKind,
    weights: &Weights,
    h: f64,
    cfg: &QuadratureConfig,
) -> Result<f64> {
    if !(h > 0.0 && h <= 1e-3) {
        return Err(Error::InvalidParameter(format!(
            "step must lie in (0, 1e-3], got {h}"
        )));
    }
    let plus = gv_zero(&DensityModel::new(kind, h, weights.clone())?, cfg)?;
    let minus = gv_zero(&DensityModel::new(kind, -h, weights.clone())?, cfg)?;
    Ok((plus - minus) / (2.0 * h))
}

/// The tail functional `v^2 g_V(v)`, which tends to `1/pi` as `v` grows and
/// pins the scale of a would-be Cauchy limit. Evaluated with the `v^2`
/// factor inside the integrand so that the requested tolerances apply at the
/// `O(1)` scale even at `v = 1e5`.
pub fn tail_functional(model: &DensityModel, v: f64, cfg: &QuadratureConfig) -> Result<f64> {
    if v.is_nan() || v <= 0.0 || v.is_infinite() {
        return Err(Error::InvalidParameter(format!(
            "tail probe must be positive and finite, got {v}"
        )));
    }
    Ok(gv_quad(model.kind, v, model.theta, &model.weights, v * v, cfg)?.value)
}

/// Integrates `g_V` over the whole line (by evenness, twice the integral
/// over the positive half-line) as a quadrature sanity check; the result
/// must come out within [`NORMALIZATION_TOL`] of one.
pub fn normalization_check(model: &DensityModel, cfg: &QuadratureConfig) -> Result<f64> {
    // the inner density evaluations must be quieter than the outer
    // tolerance, or their noise stalls the outer refinement
    let inner = QuadratureConfig {
        abs_tol: cfg.abs_tol.min(1e-12),
        rel_tol: cfg.rel_tol.min(1e-10),
        max_subdivisions: cfg.max_subdivisions,
    };
    let outer_cfg = QuadratureConfig {
        abs_tol: cfg.abs_tol.max(1e-9),
        rel_tol: cfg.rel_tol.max(1e-9),
        max_subdivisions: cfg.max_subdivisions,
    };
    let inner_failure = std::cell::Cell::new(None);
    // evaluate v^2 g(v) and divide back for large v: the substitution
    // multiplies inner absolute error by (1 - u)^-2 ~ v^2, so the density
    // itself must be resolved that much below the outer tolerance
    let f = |v: f64| {
        let scale = if v > 1.0 { v * v } else { 1.0 };
        match gv_quad(model.kind, v, model.theta, &model.weights, scale, &inner) {
            Ok(r) => r.value / scale,
            Err(e) => {
                inner_failure.set(Some(e));
                f64::NAN
            }
        }
    };
    let outer = integrate_adaptive_seeded(f, 0.0, f64::INFINITY, &[1.0], &outer_cfg);
    if let Some(e) = inner_failure.take() {
        return Err(e);
    }
    Ok(2.0 * outer?.value)
}

/// Tail probe bundled with the point it was evaluated at.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TailValue {
    pub v: f64,
    pub value: f64,
}

/// The computed decision for one model: Cauchy exactly when `g_V(0)` sits
/// within `decision_tol` of `1/pi` and the normalization integral checks
/// out; the tail functional is recorded as corroboration.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CauchyVerdict {
    pub model: DensityModel,
    pub gv0: f64,
    pub gv0_minus_inv_pi: f64,
    pub tail_value_at_v: TailValue,
    pub normalization: f64,
    pub is_cauchy: bool,
    pub decision_tol: f64,
}

/// Decides "Cauchy or not Cauchy" for one model.
///
/// The tail limit forces the scale of any Cauchy limit to one, and a
/// standard Cauchy has `g(0) = 1/pi`; a deviation of `g_V(0)` from `1/pi`
/// therefore rules the law out.
pub fn cauchy_verdict(
    model: &DensityModel,
    cfg: &QuadratureConfig,
    decision_tol: f64,
) -> Result<CauchyVerdict> {
    if decision_tol.is_nan() || decision_tol <= 0.0 {
        return Err(Error::InvalidParameter(format!(
            "decision tolerance must be positive, got {decision_tol}"
        )));
    }
    let gv0 = gv_zero(model, cfg)?;
    let gv0_minus_inv_pi = gv0 - FRAC_1_PI;
    let tail = tail_functional(model, TAIL_PROBE_V, cfg)?;
    let normalization = normalization_check(model, cfg)?;
    let is_cauchy =
        gv0_minus_inv_pi.abs() <= decision_tol && (normalization - 1.0).abs() <= NORMALIZATION_TOL;
    Ok(CauchyVerdict {
        model: model.clone(),
        gv0,
        gv0_minus_inv_pi,
        tail_value_at_v: TailValue {
            v: TAIL_PROBE_V,
            value: tail,
        },
        normalization,
        is_cauchy,
        decision_tol,
    })
}
