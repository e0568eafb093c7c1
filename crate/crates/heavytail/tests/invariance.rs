//! Weighted-sum invariance of the normal and Cauchy families, and the
//! spectral-measure cases in which convex combinations of dependent Cauchy
//! coordinates stay standard Cauchy.

use heavytail::{
    cauchy_cdf, cholesky, ks_one_sample, ks_two_sample, mv_cauchy_charfn, sample_cauchy,
    sample_mv_cauchy, sample_mvn, CauchyScale, CovarianceMatrix, EmpiricalSample, SpectralAtom,
    SpectralMeasure,
};

fn standard_normal_cdf(x: f64) -> f64 {
    0.5 * statrs::function::erf::erfc(-x / std::f64::consts::SQRT_2)
}

#[test]
fn normal_weighted_sum_with_unit_square_norm_is_standard_normal() {
    // weights (0.6, 0.8): sum of squares is exactly one
    let batch = sample_mvn(
        &cholesky(&CovarianceMatrix::identity(2)).unwrap(),
        1_000_000,
        501,
    )
    .unwrap();
    let combined: Vec<f64> = batch
        .values
        .chunks_exact(2)
        .map(|row| 0.6 * row[0] + 0.8 * row[1])
        .collect();
    let sample = EmpiricalSample::new(combined).unwrap();
    let res = ks_one_sample(&sample, standard_normal_cdf, 0.01).unwrap();
    assert!(
        res.passes,
        "KS {:.5} >= {:.5}",
        res.statistic, res.critical_value
    );
}

#[test]
fn cauchy_weighted_sum_with_unit_abs_norm_is_standard_cauchy() {
    // independent coordinates via axis atoms; weights sum to one in absolute value
    let batch = sample_mv_cauchy(&SpectralMeasure::axes(3), 1_000_000, 502).unwrap();
    let weights = [0.2, 0.3, 0.5];
    let combined: Vec<f64> = batch
        .values
        .chunks_exact(3)
        .map(|row| row.iter().zip(weights).map(|(x, w)| w * x).sum())
        .collect();
    let sample = EmpiricalSample::new(combined).unwrap();
    let res = ks_one_sample(&sample, |x| cauchy_cdf(x, CauchyScale::STANDARD), 0.01).unwrap();
    assert!(
        res.passes,
        "KS {:.5} >= {:.5}",
        res.statistic, res.critical_value
    );
}

#[test]
fn cauchy_sampler_matches_cdf_and_scale_family() {
    let batch = sample_cauchy(1_000_000, CauchyScale::STANDARD, 503).unwrap();
    let sample = EmpiricalSample::new(batch.values).unwrap();
    let res = ks_one_sample(&sample, |x| cauchy_cdf(x, CauchyScale::STANDARD), 0.01).unwrap();
    assert!(res.passes);

    // draws at scale 2 are distributionally twice draws at scale 1
    let wide = sample_cauchy(1_000_000, CauchyScale::new(2.0).unwrap(), 504).unwrap();
    let narrow = sample_cauchy(1_000_000, CauchyScale::STANDARD, 505).unwrap();
    let doubled = EmpiricalSample::new(narrow.values.iter().map(|x| 2.0 * x).collect()).unwrap();
    let wide = EmpiricalSample::new(wide.values).unwrap();
    let res = ks_two_sample(&wide, &doubled, 0.01).unwrap();
    assert!(
        res.passes,
        "KS {:.5} >= {:.5}",
        res.statistic, res.critical_value
    );
}

/// A positive-quadrant measure with standardized marginals mixing an
/// independent part and an almost-surely-equal part.
fn standardized_mixed_measure() -> SpectralMeasure {
    SpectralMeasure::new(
        2,
        vec![
            SpectralAtom::new(vec![1.0, 0.0], 0.5),
            SpectralAtom::new(vec![0.0, 1.0], 0.5),
            SpectralAtom::new(vec![0.5f64.sqrt(), 0.5f64.sqrt()], 0.5f64.sqrt()),
        ],
    )
    .unwrap()
}

#[test]
fn convex_combination_under_quadrant_measure_is_standard_cauchy() {
    let measures = [
        ("axes", SpectralMeasure::axes(2)),
        ("diagonal", SpectralMeasure::diagonal(2)),
        ("mixed", standardized_mixed_measure()),
    ];
    for (name, measure) in measures {
        assert!((measure.marginal_scale(0) - 1.0).abs() < 1e-12);
        assert!((measure.marginal_scale(1) - 1.0).abs() < 1e-12);
        let batch = sample_mv_cauchy(&measure, 1_000_000, 506).unwrap();
        let combined: Vec<f64> = batch
            .values
            .chunks_exact(2)
            .map(|row| 0.25 * row[0] + 0.75 * row[1])
            .collect();
        let sample = EmpiricalSample::new(combined).unwrap();
        let res = ks_one_sample(&sample, |x| cauchy_cdf(x, CauchyScale::STANDARD), 0.01).unwrap();
        assert!(
            res.passes,
            "{name}: KS {:.5} >= {:.5}",
            res.statistic, res.critical_value
        );
    }
}

#[test]
fn coordinates_have_cauchy_marginals_with_spectral_scale() {
    let measure = SpectralMeasure::new(
        2,
        vec![
            SpectralAtom::new(vec![1.0, 0.0], 0.7),
            SpectralAtom::new(vec![0.6, 0.8], 1.5),
        ],
    )
    .unwrap();
    let batch = sample_mv_cauchy(&measure, 1_000_000, 507).unwrap();
    for j in 0..2 {
        let scale = CauchyScale::new(measure.marginal_scale(j)).unwrap();
        let sample = EmpiricalSample::new(batch.coordinate(j)).unwrap();
        let res = ks_one_sample(&sample, |x| cauchy_cdf(x, scale), 0.01).unwrap();
        assert!(
            res.passes,
            "coordinate {j} (scale {}): KS {:.5} >= {:.5}",
            scale.get(),
            res.statistic,
            res.critical_value
        );
    }
}

#[test]
fn empirical_charfn_matches_spectral_form() {
    // the axis measure reduces to the product form exp(-|t1| - |t2|)
    let measures = [
        ("axes", SpectralMeasure::axes(2)),
        ("mixed", standardized_mixed_measure()),
    ];
    let m = 1_000_000usize;
    for (name, measure) in measures {
        let batch = sample_mv_cauchy(&measure, m, 508).unwrap();
        for t in [[0.5, 0.0], [0.0, 1.5], [1.0, 1.0], [-0.7, 0.3]] {
            let expected = mv_cauchy_charfn(&t, &measure).unwrap();
            let (mut sum, mut sum_sq) = (0.0, 0.0);
            for row in batch.values.chunks_exact(2) {
                let c = (t[0] * row[0] + t[1] * row[1]).cos();
                sum += c;
                sum_sq += c * c;
            }
            let mean = sum / m as f64;
            let se = ((sum_sq / m as f64 - mean * mean).max(0.0) / m as f64).sqrt();
            assert!(
                (mean - expected).abs() <= 5.0 * se,
                "{name} at t = {t:?}: empirical {mean} vs {expected} (se {se:e})"
            );
        }
    }
}
