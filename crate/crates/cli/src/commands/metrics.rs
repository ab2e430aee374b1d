use speckle_core::frame::load_frame;
use speckle_core::metrics::metric_report;

use crate::args::{GlobalArgs, MetricsArgs};
use crate::error::CliError;
use crate::report::to_json;

pub fn run(_global: &GlobalArgs, args: &MetricsArgs) -> Result<u8, CliError> {
    let clean = load_frame(&args.clean)?;
    let noisy = load_frame(&args.noisy)?;
    let denoised = load_frame(&args.denoised)?;
    let report = metric_report(&clean, &noisy, &denoised)?;
    println!("{}", to_json(&report));
    Ok(0)
}
