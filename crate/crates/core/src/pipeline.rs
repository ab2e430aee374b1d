//! Detect activity, compare with the threshold, de-noise when it is exceeded.

use std::fmt;
use std::str::FromStr;
use std::time::{Duration, Instant};

use serde::Serialize;
use thiserror::Error;

use crate::activity::{
    compute_granular, compute_histogram_scoped, compute_region_boundaries, ActivityError,
    ActivityReport, GranuleCounters, HistScope, Histogram, RegionPartition, MAX_Z,
};
use crate::frame::{Frame, FrameSequence};
use crate::metrics::{metric_report, DimensionMismatch, MetricReport};
use crate::wavelet::{denoise, DenoiseOptions, WaveletError};

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error(transparent)]
    Activity(#[from] ActivityError),
    #[error(transparent)]
    Wavelet(#[from] WaveletError),
    #[error(transparent)]
    Dimensions(#[from] DimensionMismatch),
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
}

/// How the activity threshold is expressed.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", content = "value", rename_all = "snake_case")]
pub enum ActivityThreshold {
    /// Compared directly with the activity index.
    Absolute(f64),
    /// Scaled by `N_p / N_F` of the sequence under test.
    PerPixel(f64),
}

impl Default for ActivityThreshold {
    fn default() -> Self {
        Self::PerPixel(0.05)
    }
}

impl ActivityThreshold {
    pub fn resolve(&self, pixels: usize, frames: usize) -> f64 {
        match *self {
            Self::Absolute(t) => t,
            Self::PerPixel(f) => f * pixels as f64 / frames as f64,
        }
    }

    fn value(&self) -> f64 {
        match *self {
            Self::Absolute(v) | Self::PerPixel(v) => v,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PipelineConfig {
    pub z: u32,
    pub activity_threshold: ActivityThreshold,
    pub denoise: DenoiseOptions,
    pub hist_scope: HistScope,
    /// Frame of the sequence that stands for "the noisy image" in metrics.
    pub metrics_frame: usize,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        Self {
            z: 4,
            activity_threshold: ActivityThreshold::default(),
            denoise: DenoiseOptions::default(),
            hist_scope: HistScope::Sequence,
            metrics_frame: 0,
        }
    }
}

impl PipelineConfig {
    pub fn validate(&self) -> Result<(), PipelineError> {
        if !(1..=MAX_Z).contains(&self.z) {
            return Err(ActivityError::InvalidZ(self.z).into());
        }
        let t = self.activity_threshold.value();
        if t.is_nan() || t < 0.0 {
            return Err(PipelineError::InvalidConfig(format!(
                "activity threshold must be non-negative, got {t}"
            )));
        }
        if self.denoise.levels == 0 {
            return Err(PipelineError::InvalidConfig(
                "wavelet levels must be at least 1".into(),
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    SpeckleFree,
    Denoised,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::SpeckleFree => "speckle_free",
            Verdict::Denoised => "denoised",
        })
    }
}

impl FromStr for Verdict {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "speckle_free" => Ok(Self::SpeckleFree),
            "denoised" => Ok(Self::Denoised),
            other => Err(format!("unknown verdict {other:?}")),
        }
    }
}

/// Denoise iff the activity index is strictly above `threshold`.
pub fn decide_denoise(report: &ActivityReport, threshold: f64) -> Verdict {
    if report.activity_index.exceeds(threshold) {
        Verdict::Denoised
    } else {
        Verdict::SpeckleFree
    }
}

/// Whether the threshold gate is honoured or bypassed.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub enum Gate {
    #[default]
    Threshold,
    Force,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize)]
pub struct StageTimings {
    pub histogram: Duration,
    pub regions: Duration,
    pub granular: Duration,
    pub denoise: Duration,
    pub metrics: Duration,
}

/// Everything the detection half of the pipeline produces.
#[derive(Debug, Clone)]
pub struct ActivityAnalysis {
    pub histogram: Histogram,
    pub partition: RegionPartition,
    pub counters: GranuleCounters,
    pub report: ActivityReport,
}

pub fn analyze_activity(
    seq: &FrameSequence,
    z: u32,
    scope: HistScope,
) -> Result<ActivityAnalysis, ActivityError> {
    analyze_timed(seq, z, scope, &mut StageTimings::default())
}

fn analyze_timed(
    seq: &FrameSequence,
    z: u32,
    scope: HistScope,
    timing: &mut StageTimings,
) -> Result<ActivityAnalysis, ActivityError> {
    let t = Instant::now();
    let histogram = compute_histogram_scoped(seq, scope);
    timing.histogram = t.elapsed();

    let t = Instant::now();
    let partition = compute_region_boundaries(&histogram, z)?;
    timing.regions = t.elapsed();

    let t = Instant::now();
    let (counters, report) = compute_granular(seq, &partition);
    timing.granular = t.elapsed();

    Ok(ActivityAnalysis {
        histogram,
        partition,
        counters,
        report,
    })
}

#[derive(Debug, Clone)]
pub struct PipelineResult {
    pub partition: RegionPartition,
    pub report: ActivityReport,
    /// Threshold after resolving against the sequence size.
    pub threshold: f64,
    /// Outcome of the threshold gate, even when it was bypassed.
    pub verdict: Verdict,
    pub forced: bool,
    pub denoised_frames: Option<FrameSequence>,
    pub metrics: Option<MetricReport>,
    pub timing: StageTimings,
}

impl PipelineResult {
    /// The frame sequence leaving the pipeline.
    pub fn output<'a>(&'a self, input: &'a FrameSequence) -> &'a FrameSequence {
        self.denoised_frames.as_ref().unwrap_or(input)
    }
}

pub fn run_pipeline(
    seq: &FrameSequence,
    cfg: &PipelineConfig,
    clean_ref: Option<&Frame>,
) -> Result<PipelineResult, PipelineError> {
    run_pipeline_gated(seq, cfg, clean_ref, Gate::Threshold)
}

pub fn run_pipeline_gated(
    seq: &FrameSequence,
    cfg: &PipelineConfig,
    clean_ref: Option<&Frame>,
    gate: Gate,
) -> Result<PipelineResult, PipelineError> {
    cfg.validate()?;
    if cfg.metrics_frame >= seq.count() {
        return Err(PipelineError::InvalidConfig(format!(
            "metrics frame {} out of range for {} frames",
            cfg.metrics_frame,
            seq.count()
        )));
    }
    if let Some(clean) = clean_ref {
        if clean.dims() != seq.dims() {
            return Err(DimensionMismatch {
                a: clean.dims(),
                b: seq.dims(),
            }
            .into());
        }
    }

    let mut timing = StageTimings::default();
    let analysis = analyze_timed(seq, cfg.z, cfg.hist_scope, &mut timing)?;
    let threshold = cfg
        .activity_threshold
        .resolve(seq.pixel_count(), seq.count());
    let verdict = decide_denoise(&analysis.report, threshold);

    let denoised_frames = if verdict == Verdict::Denoised || gate == Gate::Force {
        let t = Instant::now();
        let frames = seq
            .iter()
            .map(|f| denoise(f, &cfg.denoise))
            .collect::<Result<Vec<_>, _>>()?;
        timing.denoise = t.elapsed();
        Some(FrameSequence::new(frames).expect("denoising keeps dimensions"))
    } else {
        None
    };

    let metrics = clean_ref
        .map(|clean| {
            let t = Instant::now();
            let noisy = &seq.frames()[cfg.metrics_frame];
            let out = denoised_frames
                .as_ref()
                .map_or(noisy, |d| &d.frames()[cfg.metrics_frame]);
            let r = metric_report(clean, noisy, out);
            timing.metrics = t.elapsed();
            r
        })
        .transpose()?;

    Ok(PipelineResult {
        partition: analysis.partition,
        report: analysis.report,
        threshold,
        verdict,
        forced: gate == Gate::Force,
        denoised_frames,
        metrics,
        timing,
    })
}
