//! Cycle-counting emulation of the streaming hardware datapath.
//!
//! Pixels enter one per cycle on `pxIn`. Four stages run strictly in order,
//! each raising its finish flag before the next starts:
//!
//! 1. histogram: every pixel increments one of 256 bin registers (MEM_HIST);
//! 2. regions: bins are scanned to latch `2Z-1` boundary register pairs;
//! 3. granular: frames stream again, a per-pixel previous-region memory is
//!    compared against the incoming pixel and MEM_FLAGS counters increment;
//! 4. activity: MEM_FLAGS is summed and a restoring divider produces the
//!    activity index as quotient and remainder.
//!
//! Registers have fixed widths and an increment past the width is reported as
//! [`HwError::OverflowDetected`], never wrapped. Port and stage names other than
//! pxIn, MEM_HIST, MEM_FLAGS and Finish are local naming.
//!
//! The code here shares nothing with [`crate::activity`] beyond the data types,
//! so the batch path can serve as its oracle.

use std::fmt;
use std::io::{self, Write};

use serde::Serialize;
use thiserror::Error;

use crate::activity::{
    ceil_log2, default_counter_width, region_count, ActivityError, ActivityIndex, ActivityReport,
    HistScope, RegionPartition, BINS, MAX_Z,
};
use crate::frame::FrameSequence;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Stage {
    Histogram,
    Regions,
    Granular,
    Activity,
}

impl Stage {
    const ALL: [Stage; 4] = [
        Stage::Histogram,
        Stage::Regions,
        Stage::Granular,
        Stage::Activity,
    ];

    fn name(self) -> &'static str {
        match self {
            Stage::Histogram => "histogram",
            Stage::Regions => "regions",
            Stage::Granular => "granular",
            Stage::Activity => "activity",
        }
    }
}

impl fmt::Display for Stage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Error)]
pub enum HwError {
    #[error("{stage} register {index} overflowed its {width}-bit width at cycle {cycle}")]
    OverflowDetected {
        stage: Stage,
        index: usize,
        cycle: u64,
        width: u32,
    },
    #[error(transparent)]
    Activity(#[from] ActivityError),
    #[error("divide by zero")]
    DivideByZero,
    #[error("trace output failed: {0}")]
    Trace(#[from] io::Error),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct HwConfig {
    pub z: u32,
    pub hist_scope: HistScope,
    /// MEM_FLAGS counter width `L`; defaults to `ceil(log2(N_F))`.
    pub counter_width: Option<u32>,
}

impl Default for HwConfig {
    fn default() -> Self {
        Self {
            z: 4,
            hist_scope: HistScope::Sequence,
            counter_width: None,
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct StageCycles {
    pub histogram: u64,
    pub regions: u64,
    pub granular: u64,
    pub activity: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct FixedQuotient {
    pub quotient: u64,
    pub remainder: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct HwReport {
    pub cycles_total: u64,
    pub stage_cycles: StageCycles,
    pub hist_register_width: u32,
    pub hist_mem_bits: u64,
    pub counter_width: u32,
    pub flag_mem_bits: u64,
    pub activity_index_fixed: FixedQuotient,
}

/// Register state of one streaming run.
#[derive(Debug, Clone)]
pub struct StreamState {
    pub mem_hist: Vec<u64>,
    pub hist_width: u32,
    pub mem_flags: Vec<u32>,
    pub flag_width: u32,
    /// Region index of every pixel in the previous frame.
    pub mem_prev: Vec<u8>,
    pub region_regs: Vec<(u8, u8)>,
    pub granule_tally: Vec<u64>,
    pub pixel_cursor: u64,
    finish: [bool; 4],
    pub cycles: u64,
    stage_cycles: StageCycles,
}

impl StreamState {
    fn new(n_p: usize, hist_width: u32, flag_width: u32) -> Self {
        Self {
            mem_hist: vec![0; BINS],
            hist_width,
            mem_flags: vec![0; n_p],
            flag_width,
            mem_prev: vec![0; n_p],
            region_regs: Vec::new(),
            granule_tally: Vec::new(),
            pixel_cursor: 0,
            finish: [false; 4],
            cycles: 0,
            stage_cycles: StageCycles::default(),
        }
    }

    pub fn finished(&self, stage: Stage) -> bool {
        self.finish[stage as usize]
    }

    fn raise_finish(&mut self, stage: Stage) {
        let k = stage as usize;
        assert!(
            Stage::ALL[..k].iter().all(|&s| self.finished(s)),
            "{stage} finished before its predecessors"
        );
        self.finish[k] = true;
    }

    fn tick(&mut self, stage: Stage) -> u64 {
        self.cycles += 1;
        let c = match stage {
            Stage::Histogram => &mut self.stage_cycles.histogram,
            Stage::Regions => &mut self.stage_cycles.regions,
            Stage::Granular => &mut self.stage_cycles.granular,
            Stage::Activity => &mut self.stage_cycles.activity,
        };
        *c += 1;
        self.cycles
    }
}

fn max_for_width(width: u32) -> u64 {
    if width >= 64 {
        u64::MAX
    } else {
        (1u64 << width) - 1
    }
}

/// Tab-separated `cycle, stage, index, value` lines.
struct Trace<'a> {
    out: Option<&'a mut dyn Write>,
}

impl Trace<'_> {
    fn record(&mut self, cycle: u64, stage: Stage, index: usize, value: u64) -> io::Result<()> {
        match self.out.as_mut() {
            Some(w) => writeln!(w, "{cycle}\t{stage}\t{index}\t{value}"),
            None => Ok(()),
        }
    }
}

pub const TRACE_HEADER: &str = "cycle\tstage\tindex\tvalue";

/// Euclidean division by restoring shift-subtract, one quotient bit per cycle.
/// Returns `(quotient, remainder, cycles)`.
pub fn restoring_divide(
    numerator: u64,
    denominator: u64,
    width: u32,
) -> Result<(u64, u64, u64), HwError> {
    if denominator == 0 {
        return Err(HwError::DivideByZero);
    }
    let width = width.clamp(1, 64);
    let mut rem: u128 = 0;
    let mut quot: u64 = 0;
    for bit in (0..width).rev() {
        rem = (rem << 1) | ((numerator >> bit) & 1) as u128;
        if rem >= denominator as u128 {
            rem -= denominator as u128;
            quot |= 1 << bit;
        }
    }
    Ok((quot, rem as u64, width as u64))
}

/// Euclidean `(quotient, remainder)` of the activity divider.
pub fn divider(numerator: u64, denominator: u64) -> Result<(u64, u64), HwError> {
    let (q, r, _) = restoring_divide(numerator, denominator, 64)?;
    Ok((q, r))
}

pub fn stream_run(
    seq: &FrameSequence,
    cfg: &HwConfig,
) -> Result<(ActivityReport, HwReport), HwError> {
    stream_run_traced(seq, cfg, None)
}

pub fn stream_run_traced(
    seq: &FrameSequence,
    cfg: &HwConfig,
    trace: Option<&mut dyn Write>,
) -> Result<(ActivityReport, HwReport), HwError> {
    let (report, hw, _) = stream_run_inner(seq, cfg, trace)?;
    Ok((report, hw))
}

/// Like [`stream_run`], also returning the latched region partition.
pub fn stream_run_with_partition(
    seq: &FrameSequence,
    cfg: &HwConfig,
    trace: Option<&mut dyn Write>,
) -> Result<(ActivityReport, HwReport, RegionPartition), HwError> {
    stream_run_inner(seq, cfg, trace)
}

fn stream_run_inner(
    seq: &FrameSequence,
    cfg: &HwConfig,
    trace: Option<&mut dyn Write>,
) -> Result<(ActivityReport, HwReport, RegionPartition), HwError> {
    if !(1..=MAX_Z).contains(&cfg.z) {
        return Err(ActivityError::InvalidZ(cfg.z).into());
    }
    let n_p = seq.pixel_count();
    let n_f = seq.count();
    let hist_frames = match cfg.hist_scope {
        HistScope::Sequence => n_f,
        HistScope::FirstFrame => 1,
    };
    let hist_pixels = (n_p * hist_frames) as u64;
    let hist_width = ceil_log2(hist_pixels);
    let flag_width = cfg
        .counter_width
        .unwrap_or_else(|| default_counter_width(n_f));
    if flag_width == 0 {
        return Err(ActivityError::InvalidWidth.into());
    }

    let mut st = StreamState::new(n_p, hist_width, flag_width);
    let mut trace = Trace { out: trace };

    histogram_stage(seq, hist_frames, &mut st, &mut trace)?;
    let total = regions_stage(cfg.z, hist_pixels, &mut st, &mut trace)?;
    granular_stage(seq, &mut st, &mut trace)?;
    let (granular_count, fixed) = activity_stage(n_f as u64, &mut st, &mut trace)?;

    let report = ActivityReport {
        granular_count,
        activity_index: ActivityIndex::new(granular_count, n_f as u64),
        per_region_granules: st.granule_tally.clone(),
        frames_used: n_f as u64,
    };
    let hw = HwReport {
        cycles_total: st.cycles,
        stage_cycles: st.stage_cycles,
        hist_register_width: hist_width,
        hist_mem_bits: BINS as u64 * hist_width as u64,
        counter_width: flag_width,
        flag_mem_bits: n_p as u64 * flag_width as u64,
        activity_index_fixed: fixed,
    };
    let uppers: Vec<u8> = st.region_regs.iter().map(|&(_, hi)| hi).collect();
    let partition = RegionPartition::from_upper_limits(cfg.z, &uppers, total)?;
    Ok((report, hw, partition))
}

fn histogram_stage(
    seq: &FrameSequence,
    frames: usize,
    st: &mut StreamState,
    trace: &mut Trace,
) -> Result<(), HwError> {
    let limit = max_for_width(st.hist_width);
    for frame in &seq.frames()[..frames] {
        for &px_in in frame.pixels() {
            let cycle = st.tick(Stage::Histogram);
            st.pixel_cursor += 1;
            let bin = px_in as usize;
            if st.mem_hist[bin] == limit {
                return Err(HwError::OverflowDetected {
                    stage: Stage::Histogram,
                    index: bin,
                    cycle,
                    width: st.hist_width,
                });
            }
            st.mem_hist[bin] += 1;
            trace.record(cycle, Stage::Histogram, bin, st.mem_hist[bin])?;
        }
    }
    st.raise_finish(Stage::Histogram);
    Ok(())
}

/// Latches the region boundary registers; returns the pixel total used for `N_m`.
fn regions_stage(
    z: u32,
    total: u64,
    st: &mut StreamState,
    trace: &mut Trace,
) -> Result<u64, HwError> {
    let count = region_count(z);

    // Reverse pass: occupied levels strictly above each bin.
    let mut occ_above = [0u32; BINS];
    let mut running = 0u32;
    for bin in (0..BINS).rev() {
        let cycle = st.tick(Stage::Regions);
        occ_above[bin] = running;
        if st.mem_hist[bin] != 0 {
            running += 1;
        }
        trace.record(cycle, Stage::Regions, bin, running as u64)?;
    }
    if (running as usize) < count {
        return Err(ActivityError::TooManyRegions {
            z,
            needed: count,
            available: running as usize,
        }
        .into());
    }

    // Forward scans; the running count is compared against N_m as acc*R vs total.
    let r = count as u128;
    let total = total as u128;
    let mut lower = 0usize;
    for k in 0..count - 1 {
        let reserve = (count - 1 - k) as u32;
        let mut acc: u128 = 0;
        let mut best: Option<(u128, usize)> = None;
        let mut bin = lower;
        while bin < BINS && occ_above[bin] >= reserve {
            let cycle = st.tick(Stage::Regions);
            acc += st.mem_hist[bin] as u128;
            trace.record(cycle, Stage::Regions, bin, acc as u64)?;
            if acc > 0 {
                let scaled = acc * r;
                let dist = scaled.abs_diff(total);
                match best {
                    Some((d, _)) if dist >= d => {}
                    _ => best = Some((dist, bin)),
                }
                if scaled >= total {
                    // Past N_m: later bins can only move further away.
                    break;
                }
            }
            bin += 1;
        }
        let (_, upper) = best.expect("occupied bins remain for every region");
        st.region_regs.push((lower as u8, upper as u8));
        lower = upper + 1;
    }
    st.region_regs.push((lower as u8, 255));
    st.raise_finish(Stage::Regions);
    Ok(total as u64)
}

/// Comparator chain over the boundary registers.
fn region_of(regs: &[(u8, u8)], px: u8) -> u8 {
    regs.iter()
        .position(|&(lo, hi)| lo <= px && px <= hi)
        .expect("regions cover 0..=255") as u8
}

fn granular_stage(
    seq: &FrameSequence,
    st: &mut StreamState,
    trace: &mut Trace,
) -> Result<(), HwError> {
    let limit = max_for_width(st.flag_width) as u32;
    st.granule_tally = vec![0; st.region_regs.len()];
    st.pixel_cursor = 0;
    for (t, frame) in seq.iter().enumerate() {
        for (p, &px_in) in frame.pixels().iter().enumerate() {
            let cycle = st.tick(Stage::Granular);
            st.pixel_cursor += 1;
            let region = region_of(&st.region_regs, px_in);
            if t == 0 {
                st.mem_prev[p] = region;
                st.granule_tally[region as usize] += 1;
            } else if st.mem_prev[p] != region {
                if st.mem_flags[p] == limit {
                    return Err(HwError::OverflowDetected {
                        stage: Stage::Granular,
                        index: p,
                        cycle,
                        width: st.flag_width,
                    });
                }
                st.mem_flags[p] += 1;
                st.mem_prev[p] = region;
                st.granule_tally[region as usize] += 1;
            }
            trace.record(cycle, Stage::Granular, p, st.mem_flags[p] as u64)?;
        }
    }
    st.raise_finish(Stage::Granular);
    Ok(())
}

fn activity_stage(
    frames: u64,
    st: &mut StreamState,
    trace: &mut Trace,
) -> Result<(u64, FixedQuotient), HwError> {
    let mut granular: u64 = 0;
    for p in 0..st.mem_flags.len() {
        let cycle = st.tick(Stage::Activity);
        granular += st.mem_flags[p] as u64;
        trace.record(cycle, Stage::Activity, p, granular)?;
    }
    let width = (u64::BITS - granular.leading_zeros()).max(1);
    let (quotient, remainder, div_cycles) = restoring_divide(granular, frames, width)?;
    for bit in 0..div_cycles {
        let cycle = st.tick(Stage::Activity);
        trace.record(
            cycle,
            Stage::Activity,
            bit as usize,
            quotient >> (div_cycles - 1 - bit),
        )?;
    }
    st.raise_finish(Stage::Activity);
    Ok((
        granular,
        FixedQuotient {
            quotient,
            remainder,
        },
    ))
}
