//! Sampled evidence of the non-Cauchy cases: strongly correlated abs and bm
//! draws must be rejected against the standard Cauchy CDF.

use heavytail::{
    cauchy_cdf, ks_one_sample, sample_abs_ratio, sample_stopped_bm_path, theta_to_covariance,
    CauchyScale, EmpiricalSample, Weights,
};

#[test]
fn strongly_correlated_transforms_fail_cauchy_ks() {
    let sigma = theta_to_covariance(0.9).unwrap();
    let w = Weights::pair(0.5).unwrap();
    let cases = [
        sample_abs_ratio(&sigma, &w, 100_000, 9301).unwrap(),
        sample_stopped_bm_path(&sigma, &w, 100_000, 9302).unwrap(),
    ];
    for batch in cases {
        let kind = batch.meta.kind;
        let sample = EmpiricalSample::new(batch.values).unwrap();
        let res = ks_one_sample(&sample, |x| cauchy_cdf(x, CauchyScale::STANDARD), 0.01).unwrap();
        assert!(
            !res.passes,
            "{kind}: statistic {:.5} below critical {:.5}",
            res.statistic, res.critical_value
        );
        assert!(
            res.statistic > 5.0 * res.critical_value,
            "{kind}: rejection should be decisive"
        );
    }
}
