use serde::Serialize;
use speckle_core::frame::{load_frame, save_frame};
use speckle_core::noise::{noise_sequence, NoiseKind, SpeckleParams};

use super::{file_stem, out_dir};
use crate::args::{GlobalArgs, SynthArgs};
use crate::config;
use crate::error::CliError;
use crate::report::{write_json, RunManifest};

#[derive(Serialize)]
struct SynthManifest {
    manifest: RunManifest,
    noise: SpeckleParams,
    frames: usize,
    outputs: Vec<String>,
}

pub fn run(global: &GlobalArgs, args: &SynthArgs) -> Result<u8, CliError> {
    let settings = config::resolve(global)?;
    let kind = if args.gaussian_speckle {
        NoiseKind::Gaussian
    } else {
        NoiseKind::Uniform
    };
    let params = SpeckleParams::new(args.variance, settings.seed)?.with_kind(kind);
    let clean = load_frame(&args.clean)?;
    let seq = noise_sequence(&clean, &params, args.frames)?;

    let dir = out_dir(global)?;
    let stem = file_stem(&args.clean);
    let mut outputs = Vec::new();
    for (k, frame) in seq.iter().enumerate() {
        let target = dir.join(format!("{stem}_{k:03}.pgm"));
        save_frame(frame, &target).map_err(|e| CliError::write(&target, e))?;
        outputs.push(target.display().to_string());
    }
    let manifest = SynthManifest {
        manifest: RunManifest::new("synth", &settings, std::slice::from_ref(&args.clean)),
        noise: params,
        frames: args.frames,
        outputs,
    };
    write_json(&manifest, &dir.join(format!("{stem}.synth.json")))?;
    for o in &manifest.outputs {
        println!("{o}");
    }
    Ok(0)
}
