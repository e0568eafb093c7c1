use std::fs;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use heavytail::{
    cauchy_verdict, dgv0_dtheta_at_zero, finite_difference_derivative, gv_abs_quad, gv_bm_quad,
    sample_abs_ratio, sample_ratio_pm, sample_stopped_bm_path, tail_functional,
    theta_to_covariance, verify, CovarianceMatrix, DensityKind, DensityModel, QuadratureConfig,
    SampleBatch, Weights,
};
use rayon::prelude::*;

use crate::manifest::RunManifest;
use crate::{
    CliError, DensityArgs, DensityTransformArg, DerivativeArgs, SampleArgs, SuiteArg, SweepArgs,
    TailArgs, TransformArg, VerifyArgs,
};

/// 17 significant digits: enough to round-trip any f64.
fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

fn open_output(path: &Option<PathBuf>) -> Result<BufWriter<Box<dyn Write>>, CliError> {
    let raw: Box<dyn Write> = match path {
        Some(p) => Box::new(fs::File::create(p)?),
        None => Box::new(std::io::stdout()),
    };
    Ok(BufWriter::new(raw))
}

fn announce(manifest: &RunManifest) {
    eprintln!("manifest: {}", manifest.to_json());
}

fn weights_arg(raw: &[f64]) -> Result<Weights, CliError> {
    Ok(Weights::new(raw.to_vec())?)
}

fn density_kind(arg: DensityTransformArg) -> DensityKind {
    match arg {
        DensityTransformArg::Abs => DensityKind::AbsRatio,
        DensityTransformArg::Bm => DensityKind::StoppedBm,
    }
}

fn parse_covariance_file(path: &Path) -> Result<CovarianceMatrix, CliError> {
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::Usage(format!("cannot read {}: {e}", path.display())))?;
    let mut rows: Vec<Vec<f64>> = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let row: Result<Vec<f64>, _> = line.split_whitespace().map(str::parse::<f64>).collect();
        rows.push(
            row.map_err(|e| CliError::Usage(format!("{}:{}: {e}", path.display(), lineno + 1)))?,
        );
    }
    if rows.is_empty() {
        return Err(CliError::Usage(format!(
            "{}: no matrix rows found",
            path.display()
        )));
    }
    Ok(CovarianceMatrix::from_rows(&rows)?)
}

/// `vmin:vmax:steps` with an integer number of grid points.
fn parse_count_grid(spec: &str) -> Result<Vec<f64>, CliError> {
    let bad = || CliError::Usage(format!("malformed grid `{spec}`; expected vmin:vmax:steps"));
    let parts: Vec<&str> = spec.split(':').collect();
    if parts.len() != 3 {
        return Err(bad());
    }
    let vmin: f64 = parts[0].parse().map_err(|_| bad())?;
    let vmax: f64 = parts[1].parse().map_err(|_| bad())?;
    let steps: usize = parts[2].parse().map_err(|_| bad())?;
    if !vmin.is_finite() || !vmax.is_finite() || steps == 0 {
        return Err(bad());
    }
    if steps == 1 {
        if vmin != vmax {
            return Err(CliError::Usage(format!(
                "grid `{spec}` has one point but different endpoints"
            )));
        }
        return Ok(vec![vmin]);
    }
    if vmax <= vmin {
        return Err(bad());
    }
    let span = vmax - vmin;
    Ok((0..steps)
        .map(|i| vmin + span * i as f64 / (steps - 1) as f64)
        .collect())
}

/// `start:end:step` with a real step size.
fn parse_step_grid(spec: &str) -> Result<Vec<f64>, CliError> {
    let bad = || CliError::Usage(format!("malformed grid `{spec}`; expected start:end:step"));
    let parts: Vec<&str> = spec.split(':').collect();
    if parts.len() != 3 {
        return Err(bad());
    }
    let start: f64 = parts[0].parse().map_err(|_| bad())?;
    let end: f64 = parts[1].parse().map_err(|_| bad())?;
    let step: f64 = parts[2].parse().map_err(|_| bad())?;
    if !start.is_finite() || !end.is_finite() || step.is_nan() || step <= 0.0 || end < start {
        return Err(bad());
    }
    let mut points = Vec::new();
    let mut k = 0u32;
    loop {
        let x = start + step * k as f64;
        if x > end + 0.5 * step {
            break;
        }
        points.push(x.min(end));
        k += 1;
    }
    Ok(points)
}

pub fn sample(args: SampleArgs) -> Result<u8, CliError> {
    let weights = weights_arg(&args.weights)?;
    let sigma = match (&args.theta, &args.cov) {
        (Some(theta), None) => theta_to_covariance(*theta)?,
        (None, Some(path)) => parse_covariance_file(path)?,
        _ => unreachable!("clap enforces exactly one covariance source"),
    };
    let transform = match args.transform {
        TransformArg::Pm => "pm",
        TransformArg::Abs => "abs",
        TransformArg::Bm => "bm",
    };
    let manifest = RunManifest::new("sample")
        .param("transform", transform)
        .param("theta", args.theta)
        .param("covariance", sigma.entries())
        .param("dim", sigma.dim())
        .param("weights", weights.as_slice())
        .param("n", args.n)
        .seed(args.seed);
    announce(&manifest);

    let batch: SampleBatch = match args.transform {
        TransformArg::Pm => sample_ratio_pm(&sigma, &weights, args.n, args.seed)?,
        TransformArg::Abs => sample_abs_ratio(&sigma, &weights, args.n, args.seed)?,
        TransformArg::Bm => sample_stopped_bm_path(&sigma, &weights, args.n, args.seed)?,
    };

    let mut out = open_output(&args.out)?;
    writeln!(out, "# manifest: {}", manifest.to_json())?;
    writeln!(out, "index,value")?;
    for (i, v) in batch.values.iter().enumerate() {
        writeln!(out, "{i},{}", fmt_f64(*v))?;
    }
    out.flush()?;
    Ok(0)
}

pub fn density(args: DensityArgs) -> Result<u8, CliError> {
    let weights = weights_arg(&args.weights)?;
    let kind = density_kind(args.transform);
    // validates theta and the weight count before any quadrature runs
    DensityModel::new(kind, args.theta, weights.clone())?;
    let grid = parse_count_grid(&args.grid)?;
    let manifest = RunManifest::new("density")
        .param("transform", kind.to_string())
        .param("theta", args.theta)
        .param("weights", weights.as_slice())
        .param("grid", &args.grid);
    announce(&manifest);

    let cfg = QuadratureConfig::default();
    let rows: Vec<(f64, heavytail::IntegralResult)> = grid
        .par_iter()
        .map(|&v| {
            let quad = match kind {
                DensityKind::AbsRatio => gv_abs_quad(v, args.theta, &weights, &cfg),
                DensityKind::StoppedBm => gv_bm_quad(v, args.theta, &weights, &cfg),
            };
            quad.map(|r| (v, r))
                .map_err(|e| CliError::Numerical(format!("density at v = {v}: {e}")))
        })
        .collect::<Result<_, _>>()?;

    let mut out = open_output(&args.out)?;
    writeln!(out, "# manifest: {}", manifest.to_json())?;
    writeln!(out, "v,g_v,err_est")?;
    for (v, r) in rows {
        writeln!(
            out,
            "{},{},{}",
            fmt_f64(v),
            fmt_f64(r.value),
            fmt_f64(r.error_estimate)
        )?;
    }
    out.flush()?;
    Ok(0)
}

pub fn tail(args: TailArgs) -> Result<u8, CliError> {
    let weights = weights_arg(&args.weights)?;
    let kind = density_kind(args.transform);
    let model = DensityModel::new(kind, args.theta, weights.clone())?;
    let manifest = RunManifest::new("tail")
        .param("transform", kind.to_string())
        .param("theta", args.theta)
        .param("weights", weights.as_slice())
        .param("v_values", &args.v_values);
    announce(&manifest);

    let cfg = QuadratureConfig::default();
    let rows: Vec<(f64, f64)> = args
        .v_values
        .par_iter()
        .map(|&v| {
            tail_functional(&model, v, &cfg)
                .map(|t| (v, t))
                .map_err(CliError::from)
        })
        .collect::<Result<_, _>>()?;

    let mut out = open_output(&args.out)?;
    writeln!(out, "# manifest: {}", manifest.to_json())?;
    writeln!(out, "v,v2_gv")?;
    for (v, t) in rows {
        writeln!(out, "{},{}", fmt_f64(v), fmt_f64(t))?;
    }
    out.flush()?;
    Ok(0)
}

pub fn derivative(args: DerivativeArgs) -> Result<u8, CliError> {
    let weights = weights_arg(&args.weights)?;
    let kind = density_kind(args.transform);
    let manifest = RunManifest::new("derivative")
        .param("transform", kind.to_string())
        .param("weights", weights.as_slice())
        .param("h", args.h);
    announce(&manifest);

    let cfg = QuadratureConfig::default();
    let quadrature_value = dgv0_dtheta_at_zero(kind, &weights, &cfg)?;
    let finite_difference_value = finite_difference_derivative(kind, &weights, args.h, &cfg)?;
    let report = serde_json::json!({
        "manifest": manifest,
        "quadrature_value": quadrature_value,
        "finite_difference_value": finite_difference_value,
        "h": args.h,
    });

    let mut out = open_output(&args.out)?;
    writeln!(
        out,
        "{}",
        serde_json::to_string_pretty(&report).expect("report serializes")
    )?;
    out.flush()?;
    Ok(0)
}

pub fn sweep(args: SweepArgs) -> Result<u8, CliError> {
    let kind = match args.transform {
        TransformArg::Abs => DensityKind::AbsRatio,
        TransformArg::Bm => DensityKind::StoppedBm,
        TransformArg::Pm => {
            return Err(CliError::Usage(
                "the pm transform is standard Cauchy for every covariance; \
                 there is no density to sweep — use `heavytail sample --transform pm`"
                    .into(),
            ))
        }
    };
    let weights = weights_arg(&args.weights)?;
    let thetas = parse_step_grid(&args.theta_grid)?;
    for &theta in &thetas {
        DensityModel::new(kind, theta, weights.clone())?;
    }
    let manifest = RunManifest::new("sweep")
        .param("transform", kind.to_string())
        .param("theta_grid", &args.theta_grid)
        .param("weights", weights.as_slice())
        .param("decision_tol", args.decision_tol);
    announce(&manifest);

    let cfg = QuadratureConfig::default();
    let verdicts: Vec<heavytail::CauchyVerdict> = thetas
        .par_iter()
        .map(|&theta| {
            let model = DensityModel::new(kind, theta, weights.clone())?;
            cauchy_verdict(&model, &cfg, args.decision_tol)
        })
        .collect::<Result<_, _>>()
        .map_err(|e: heavytail::Error| CliError::from(e))?;

    let report = serde_json::json!({
        "manifest": manifest,
        "verdicts": verdicts,
    });
    let mut out = open_output(&args.out)?;
    writeln!(
        out,
        "{}",
        serde_json::to_string_pretty(&report).expect("report serializes")
    )?;
    out.flush()?;
    Ok(0)
}

pub fn verify(args: VerifyArgs) -> Result<u8, CliError> {
    let suite = match args.suite {
        SuiteArg::Quick => verify::Suite::Quick,
        SuiteArg::Full => verify::Suite::Full,
    };
    let manifest = RunManifest::new("verify").param("suite", suite);
    announce(&manifest);

    let reports = verify::run_suite(suite);
    for r in &reports {
        eprintln!(
            "criterion {:>2} {:<28} {}",
            r.id,
            r.name,
            if r.passed { "PASS" } else { "FAIL" }
        );
    }
    let all_passed = reports.iter().all(|r| r.passed);
    let report = serde_json::json!({
        "manifest": manifest,
        "suite": suite,
        "all_passed": all_passed,
        "criteria": reports,
    });
    let mut out = open_output(&args.out)?;
    writeln!(
        out,
        "{}",
        serde_json::to_string_pretty(&report).expect("report serializes")
    )?;
    out.flush()?;
    Ok(if all_passed { 0 } else { 3 })
}
