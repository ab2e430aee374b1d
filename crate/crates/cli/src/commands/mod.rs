pub mod bench;
pub mod denoise;
pub mod detect;
pub mod metrics;
pub mod synth;

use std::fs;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use speckle_core::activity::{ActivityReport, RegionPartition};
use speckle_core::frame::FrameSequence;
use speckle_core::hwsim::{stream_run_with_partition, HwConfig, HwReport, TRACE_HEADER};

use crate::args::GlobalArgs;
use crate::config::Settings;
use crate::error::CliError;

pub fn wants_hw(global: &GlobalArgs) -> bool {
    global.hw || global.trace.is_some()
}

/// Runs the streaming model and checks it reproduces the batch result.
pub fn hw_check(
    seq: &FrameSequence,
    settings: &Settings,
    trace: Option<&Path>,
    batch: (&ActivityReport, &RegionPartition),
) -> Result<HwReport, CliError> {
    let cfg = HwConfig {
        z: settings.pipeline.z,
        hist_scope: settings.pipeline.hist_scope,
        counter_width: settings.counter_width,
    };
    let (report, hw, partition) = match trace {
        Some(path) => {
            let file = fs::File::create(path).map_err(|e| CliError::write(path, e))?;
            let mut out = BufWriter::new(file);
            writeln!(out, "{TRACE_HEADER}").map_err(|e| CliError::write(path, e))?;
            let r = stream_run_with_partition(seq, &cfg, Some(&mut out))?;
            out.flush().map_err(|e| CliError::write(path, e))?;
            r
        }
        None => stream_run_with_partition(seq, &cfg, None)?,
    };
    if &report != batch.0 || &partition != batch.1 {
        return Err(CliError::Internal(format!(
            "hardware model disagrees with batch path: stream granular_count {} vs batch {}",
            report.granular_count, batch.0.granular_count
        )));
    }
    Ok(hw)
}

pub fn out_dir(global: &GlobalArgs) -> Result<PathBuf, CliError> {
    let dir = global.out_dir.clone().unwrap_or_else(|| PathBuf::from("."));
    fs::create_dir_all(&dir).map_err(|e| CliError::write(&dir, e))?;
    Ok(dir)
}

pub fn file_stem(path: &Path) -> String {
    path.file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "frame".into())
}
