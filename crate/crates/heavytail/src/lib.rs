//! Three transformations carry correlated centered Gaussian vectors into
//! heavy-tailed territory: the convex combination of coordinatewise ratios
//! `sum w_j X_j / Y_j`, its absolute-value variant `sum w_j X_j / |Y_j|`,
//! and the randomly stopped Brownian motion `sum w_j X_j(Y_j^{-2})`. The
//! first is standard Cauchy for every covariance; the other two are Cauchy
//! only in special cases. This crate samples all three, evaluates the exact
//! densities of the latter two by adaptive quadrature, and decides
//! "Cauchy or not Cauchy" per parameter point.
//!
//! Everything is deterministic given a seed: samplers draw from splittable
//! substreams keyed by `(sampler, seed, batch)`, so results do not depend on
//! thread count.

pub mod cauchy;
pub mod density;
mod error;
pub mod gauss;
mod rng;
pub mod stats;
pub mod transforms;
pub mod verify;

pub use cauchy::{
    cauchy_cdf, cauchy_pdf, cauchy_pdf_selfref, cauchy_quantile, mv_cauchy_charfn, sample_cauchy,
    sample_mv_cauchy, CauchyScale, SpectralAtom, SpectralMeasure,
};
pub use density::{
    cauchy_verdict, dgv0_dtheta_at_zero, finite_difference_derivative, gv_abs, gv_abs_quad, gv_bm,
    gv_bm_quad, gv_zero, integrate_adaptive, integrate_adaptive_seeded, normalization_check,
    tail_functional, CauchyVerdict, DensityKind, DensityModel, IntegralResult, QuadratureConfig,
    TailValue, DEFAULT_DECISION_TOL,
};
pub use error::{Error, Result};
pub use gauss::{
    cholesky, sample_mvn, theta_to_covariance, BatchMeta, CholeskyFactor, CovarianceMatrix,
    SampleBatch, ThetaCovariance, VectorBatch,
};
pub use stats::{
    histogram_density, ks_one_sample, ks_two_sample, EmpiricalSample, HistogramBin, KsResult,
};
pub use transforms::{
    bm_selfsimilarity_check, sample_abs_ratio, sample_ratio_pm, sample_stopped_bm_mixture,
    sample_stopped_bm_path, TransformKind, Weights,
};
