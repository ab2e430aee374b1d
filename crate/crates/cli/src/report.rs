//! JSON report layout shared by the subcommands.

use std::path::{Path, PathBuf};

use serde::Serialize;
use speckle_core::activity::{ActivityReport, RegionPartition};
use speckle_core::hwsim::HwReport;
use speckle_core::metrics::{serialize_metric, MetricReport};
use speckle_core::pipeline::{PipelineConfig, Verdict};

use crate::config::Settings;
use crate::error::CliError;

#[derive(Debug, Clone, Serialize)]
pub struct RunManifest {
    pub tool: &'static str,
    pub tool_version: &'static str,
    pub command: &'static str,
    pub started_at: String,
    pub seed: u64,
    pub inputs: Vec<String>,
    pub config: PipelineConfig,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub counter_width: Option<u32>,
}

impl RunManifest {
    pub fn new(command: &'static str, settings: &Settings, inputs: &[PathBuf]) -> Self {
        Self {
            tool: env!("CARGO_PKG_NAME"),
            tool_version: env!("CARGO_PKG_VERSION"),
            command,
            started_at: chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Secs, true),
            seed: settings.seed,
            inputs: inputs.iter().map(|p| p.display().to_string()).collect(),
            config: settings.pipeline,
            counter_width: settings.counter_width,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ActivitySection {
    pub granular_count: u64,
    #[serde(serialize_with = "serialize_metric")]
    pub activity_index: f64,
    pub per_region_granules: Vec<u64>,
    pub frames_used: u64,
    pub z: u32,
    pub regions: Vec<[u8; 2]>,
    #[serde(serialize_with = "serialize_metric")]
    pub threshold: f64,
}

impl ActivitySection {
    pub fn new(report: &ActivityReport, partition: &RegionPartition, threshold: f64) -> Self {
        Self {
            granular_count: report.granular_count,
            activity_index: report.activity_index.as_f64(),
            per_region_granules: report.per_region_granules.clone(),
            frames_used: report.frames_used,
            z: partition.z(),
            regions: partition
                .regions()
                .iter()
                .map(|r| [r.lower, r.upper])
                .collect(),
            threshold,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub manifest: RunManifest,
    pub activity: ActivitySection,
    pub verdict: Verdict,
    #[serde(skip_serializing_if = "std::ops::Not::not")]
    pub forced: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub metrics: Option<MetricReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub hw: Option<HwReport>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub outputs: Vec<String>,
}

pub fn to_json<T: Serialize>(value: &T) -> String {
    serde_json::to_string_pretty(value).expect("report types serialize")
}

pub fn write_json<T: Serialize>(value: &T, path: &Path) -> Result<(), CliError> {
    let mut text = to_json(value);
    text.push('\n');
    std::fs::write(path, text).map_err(|e| CliError::write(path, e))
}
