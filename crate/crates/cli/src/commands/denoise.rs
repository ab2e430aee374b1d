use speckle_core::frame::{load_frame, load_sequence, save_frame};
use speckle_core::pipeline::{run_pipeline_gated, Gate, Verdict};

use super::{file_stem, hw_check, out_dir, wants_hw};
use crate::args::{DenoiseArgs, GlobalArgs};
use crate::config;
use crate::error::CliError;
use crate::inputs;
use crate::report::{to_json, write_json, ActivitySection, Report, RunManifest};

pub const REPORT_NAME: &str = "denoise-report.json";

pub fn run(global: &GlobalArgs, args: &DenoiseArgs) -> Result<u8, CliError> {
    let mut settings = config::resolve(global)?;
    if let Some(k) = args.metrics_frame {
        settings.pipeline.metrics_frame = k;
    }
    let paths = inputs::expand(&args.inputs)?;
    let seq = load_sequence(&paths)?;
    let clean = args.clean.as_deref().map(load_frame).transpose()?;
    let gate = if args.force {
        Gate::Force
    } else {
        Gate::Threshold
    };

    let result = run_pipeline_gated(&seq, &settings.pipeline, clean.as_ref(), gate)?;
    let hw = if wants_hw(global) {
        Some(hw_check(
            &seq,
            &settings,
            global.trace.as_deref(),
            (&result.report, &result.partition),
        )?)
    } else {
        None
    };

    let dir = out_dir(global)?;
    let mut outputs = Vec::new();
    if let Some(frames) = &result.denoised_frames {
        for (path, frame) in paths.iter().zip(frames) {
            let target = dir.join(format!("{}.denoised.pgm", file_stem(path)));
            save_frame(frame, &target).map_err(|e| CliError::write(&target, e))?;
            outputs.push(target.display().to_string());
        }
    }

    let mut inputs = paths.clone();
    if let Some(c) = &args.clean {
        inputs.push(c.clone());
    }
    let report = Report {
        manifest: RunManifest::new("denoise", &settings, &inputs),
        activity: ActivitySection::new(&result.report, &result.partition, result.threshold),
        verdict: result.verdict,
        forced: result.forced,
        metrics: result.metrics,
        hw,
        outputs,
    };
    write_json(&report, &dir.join(REPORT_NAME))?;

    if global.json {
        println!("{}", to_json(&report));
    } else {
        println!("granular_count = {}", result.report.granular_count);
        println!("activity_index = {}", result.report.activity_index);
        match (result.verdict, result.forced) {
            (Verdict::SpeckleFree, false) => {
                println!("image is speckle free; no de-noising performed")
            }
            (Verdict::SpeckleFree, true) => println!(
                "image is speckle free; de-noised anyway (--force), {} frames written",
                report.outputs.len()
            ),
            (Verdict::Denoised, _) => {
                println!(
                    "speckle detected; {} frames de-noised",
                    report.outputs.len()
                )
            }
        }
    }
    Ok(0)
}
