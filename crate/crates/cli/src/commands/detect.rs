use speckle_core::activity::HistScope;
use speckle_core::frame::load_sequence;
use speckle_core::metrics::format_metric;
use speckle_core::pipeline::{analyze_activity, decide_denoise, Verdict};

use super::{hw_check, out_dir, wants_hw};
use crate::args::{DetectArgs, GlobalArgs};
use crate::config;
use crate::error::{exit, CliError};
use crate::inputs;
use crate::report::{to_json, write_json, ActivitySection, Report, RunManifest};

pub fn run(global: &GlobalArgs, args: &DetectArgs) -> Result<u8, CliError> {
    let settings = config::resolve(global)?;
    let paths = inputs::expand(&args.inputs)?;
    let seq = load_sequence(&paths)?;
    let cfg = &settings.pipeline;

    let analysis =
        analyze_activity(&seq, cfg.z, cfg.hist_scope).map_err(|e| CliError::Data(e.to_string()))?;
    let threshold = cfg
        .activity_threshold
        .resolve(seq.pixel_count(), seq.count());
    let verdict = decide_denoise(&analysis.report, threshold);

    let hw = if wants_hw(global) {
        Some(hw_check(
            &seq,
            &settings,
            global.trace.as_deref(),
            (&analysis.report, &analysis.partition),
        )?)
    } else {
        None
    };

    let report = Report {
        manifest: RunManifest::new("detect", &settings, &paths),
        activity: ActivitySection::new(&analysis.report, &analysis.partition, threshold),
        verdict,
        forced: false,
        metrics: None,
        hw,
        outputs: Vec::new(),
    };
    if global.out_dir.is_some() {
        write_json(&report, &out_dir(global)?.join("detect-report.json"))?;
    }

    if global.json {
        println!("{}", to_json(&report));
    } else {
        println!("granular_count = {}", analysis.report.granular_count);
        println!("activity_index = {}", analysis.report.activity_index);
        println!("threshold = {threshold}");
        if cfg.hist_scope == HistScope::FirstFrame {
            println!("histogram scope = first-frame");
        }
        if let Some(hw) = &report.hw {
            println!(
                "hw: {} cycles, MEM_HIST {} bits, MEM_FLAGS {} bits, divider {} r {}",
                hw.cycles_total,
                hw.hist_mem_bits,
                hw.flag_mem_bits,
                hw.activity_index_fixed.quotient,
                hw.activity_index_fixed.remainder
            );
        }
        match verdict {
            Verdict::SpeckleFree => println!("image is speckle free"),
            Verdict::Denoised => println!("speckle detected: de-noising required"),
        }
    }

    if args.sweep_threshold {
        let steps = args.sweep_steps.max(1);
        // Largest possible activity index: every pixel changes region each frame.
        let max = (seq.pixel_count() * (seq.count() - 1)) as f64 / seq.count() as f64;
        println!("# activity_index\t{}", analysis.report.activity_index);
        println!("threshold\tverdict");
        for i in 0..=steps {
            let t = max * i as f64 / steps as f64;
            let v = decide_denoise(&analysis.report, t);
            println!("{}\t{v}", format_metric(t));
        }
    }

    Ok(match verdict {
        Verdict::SpeckleFree => exit::SPECKLE_FREE,
        Verdict::Denoised => exit::SPECKLE_DETECTED,
    })
}
