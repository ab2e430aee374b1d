use std::fmt::Write as _;
use std::path::PathBuf;

use rayon::prelude::*;
use serde::Serialize;
use speckle_core::frame::{load_frame, Frame};
use speckle_core::metrics::{format_metric, MetricReport};
use speckle_core::noise::{noise_sequence, NoiseKind, SpeckleParams};
use speckle_core::pipeline::{run_pipeline_gated, Gate, PipelineConfig};

use crate::args::{BenchArgs, GlobalArgs};
use crate::config;
use crate::error::CliError;
use crate::report::{write_json, RunManifest};

pub const CSV_HEADER: &str =
    "variance,seed,mse1,mse2,psnr1,psnr2,psnr_clean_denoised,ief,activity_index";

#[derive(Serialize)]
struct BenchManifest {
    manifest: RunManifest,
    variances: Vec<f64>,
    seeds: usize,
    frames: usize,
    kind: NoiseKind,
}

struct Row {
    variance: f64,
    seed: u64,
    metrics: MetricReport,
    activity_index: f64,
}

fn grid(args: &BenchArgs) -> Result<Vec<f64>, CliError> {
    if let Some(v) = &args.variances {
        if v.is_empty() {
            return Err(CliError::Usage("empty variance list".into()));
        }
        return Ok(v.clone());
    }
    let (lo, hi) = (args.var_min, args.var_max);
    if !(lo > 0.0 && hi >= lo && hi.is_finite()) {
        return Err(CliError::Usage(format!(
            "log grid needs 0 < var-min <= var-max, got {lo}..{hi}"
        )));
    }
    Ok(match args.points {
        0 => return Err(CliError::Usage("points must be at least 1".into())),
        1 => vec![lo],
        n => (0..n)
            .map(|i| lo * (hi / lo).powf(i as f64 / (n - 1) as f64))
            .collect(),
    })
}

fn run_cell(
    clean: &Frame,
    cfg: &PipelineConfig,
    params: SpeckleParams,
    frames: usize,
) -> Result<Row, CliError> {
    let seq = noise_sequence(clean, &params, frames)?;
    let result = run_pipeline_gated(&seq, cfg, Some(clean), Gate::Force)?;
    let metrics = result
        .metrics
        .ok_or_else(|| CliError::Internal("pipeline returned no metrics".into()))?;
    Ok(Row {
        variance: params.variance,
        seed: params.seed,
        metrics,
        activity_index: result.report.activity_index.as_f64(),
    })
}

fn push_row(out: &mut String, variance: f64, seed: &str, m: &MetricReport, ai: f64) {
    let cols = [
        m.mse1,
        m.mse2,
        m.psnr1,
        m.psnr2,
        m.psnr_clean_denoised,
        m.ief,
        ai,
    ];
    let _ = write!(out, "{},{seed}", format_metric(variance));
    for c in cols {
        let _ = write!(out, ",{}", format_metric(c));
    }
    out.push('\n');
}

fn mean(rows: &[Row], f: impl Fn(&Row) -> f64) -> f64 {
    rows.iter().map(f).sum::<f64>() / rows.len() as f64
}

/// CSV for the whole grid. Output depends only on the inputs, never on scheduling.
pub fn render(
    clean: &Frame,
    cfg: &PipelineConfig,
    variances: &[f64],
    seeds: usize,
    frames: usize,
    base_seed: u64,
    kind: NoiseKind,
) -> Result<String, CliError> {
    let cells: Vec<(f64, u64)> = variances
        .iter()
        .flat_map(|&v| {
            (0..seeds as u64).map(move |s| (v, base_seed.wrapping_add(s * frames as u64)))
        })
        .collect();
    let rows = cells
        .par_iter()
        .map(|&(v, seed)| {
            let params = SpeckleParams::new(v, seed)?.with_kind(kind);
            run_cell(clean, cfg, params, frames)
        })
        .collect::<Result<Vec<_>, _>>()?;

    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for chunk in rows.chunks(seeds) {
        for r in chunk {
            push_row(
                &mut out,
                r.variance,
                &r.seed.to_string(),
                &r.metrics,
                r.activity_index,
            );
        }
        let m = MetricReport {
            mse1: mean(chunk, |r| r.metrics.mse1),
            mse2: mean(chunk, |r| r.metrics.mse2),
            psnr1: mean(chunk, |r| r.metrics.psnr1),
            psnr2: mean(chunk, |r| r.metrics.psnr2),
            ief: mean(chunk, |r| r.metrics.ief),
            psnr_clean_denoised: mean(chunk, |r| r.metrics.psnr_clean_denoised),
        };
        push_row(
            &mut out,
            chunk[0].variance,
            "mean",
            &m,
            mean(chunk, |r| r.activity_index),
        );
    }
    Ok(out)
}

pub fn run(global: &GlobalArgs, args: &BenchArgs) -> Result<u8, CliError> {
    let settings = config::resolve(global)?;
    if args.seeds == 0 || args.frames == 0 {
        return Err(CliError::Usage(
            "seeds and frames must be at least 1".into(),
        ));
    }
    let variances = grid(args)?;
    let kind = if args.gaussian_speckle {
        NoiseKind::Gaussian
    } else {
        NoiseKind::Uniform
    };
    let clean = load_frame(&args.clean)?;
    let csv = render(
        &clean,
        &settings.pipeline,
        &variances,
        args.seeds,
        args.frames,
        settings.seed,
        kind,
    )?;

    match &args.out {
        Some(path) => {
            std::fs::write(path, &csv).map_err(|e| CliError::write(path, e))?;
            let manifest = BenchManifest {
                manifest: RunManifest::new("bench", &settings, std::slice::from_ref(&args.clean)),
                variances,
                seeds: args.seeds,
                frames: args.frames,
                kind,
            };
            let mut side = path.clone().into_os_string();
            side.push(".manifest.json");
            write_json(&manifest, &PathBuf::from(side))?;
        }
        None => print!("{csv}"),
    }
    Ok(0)
}
