//! Speckle detection in multi-frame grayscale sequences by granular activity
//! analysis, with Haar wavelet de-noising of sequences whose activity index
//! exceeds a threshold.
//!
//! The batch path lives in [`activity`] and [`pipeline`]; [`hwsim`] replays the
//! same detection as a one-pixel-per-cycle streaming datapath.

pub mod activity;
pub mod frame;
pub mod hwsim;
pub mod metrics;
pub mod noise;
pub mod pipeline;
pub mod testimage;
pub mod wavelet;

pub use activity::{ActivityIndex, ActivityReport, HistScope, RegionPartition};
pub use frame::{load_frame, load_sequence, save_frame, Frame, FrameError, FrameSequence};
pub use metrics::MetricReport;
pub use pipeline::{run_pipeline, PipelineConfig, PipelineError, PipelineResult, Verdict};
