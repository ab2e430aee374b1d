//! Granular-computing activity analysis.
//!
//! The sequence histogram is split into `2Z-1` contiguous intensity regions
//! holding roughly equal pixel counts. Every pixel is then followed through
//! the frames; each change of region between successive frames adds one to
//! the granular count. The activity index is that count divided by `N_F`.

use std::cmp::Ordering;
use std::fmt;

use num::{BigInt, BigRational};
use serde::Serialize;
use thiserror::Error;

use crate::frame::{Frame, FrameSequence};

pub const BINS: usize = 256;
pub const MAX_Z: u32 = 8;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ActivityError {
    #[error("invalid region parameter Z={0} (expected 1..={MAX_Z})")]
    InvalidZ(u32),
    #[error(
        "too many regions: Z={z} needs {needed} regions but the histogram has only \
         {available} occupied gray levels; lower Z"
    )]
    TooManyRegions {
        z: u32,
        needed: usize,
        available: usize,
    },
    #[error("histogram is empty")]
    EmptyHistogram,
    #[error("pixel count must be at least 1")]
    InvalidPixelCount,
    #[error("register width must be at least 1 bit")]
    InvalidWidth,
}

/// Which frames feed the histogram that fixes the region limits.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum HistScope {
    #[default]
    Sequence,
    FirstFrame,
}

impl std::str::FromStr for HistScope {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "sequence" => Ok(Self::Sequence),
            "first-frame" => Ok(Self::FirstFrame),
            other => Err(format!(
                "unknown histogram scope {other:?} (expected sequence or first-frame)"
            )),
        }
    }
}

impl fmt::Display for HistScope {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Sequence => "sequence",
            Self::FirstFrame => "first-frame",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Histogram {
    bins: [u64; BINS],
    total: u64,
}

impl Default for Histogram {
    fn default() -> Self {
        Self {
            bins: [0; BINS],
            total: 0,
        }
    }
}

impl Histogram {
    /// Builds a histogram directly from bin counts.
    pub fn from_bins(bins: [u64; BINS]) -> Self {
        let total = bins.iter().sum();
        Self { bins, total }
    }

    pub fn add_frame(&mut self, frame: &Frame) {
        for &px in frame.pixels() {
            self.bins[px as usize] += 1;
        }
        self.total += frame.pixel_count() as u64;
    }

    pub fn bins(&self) -> &[u64; BINS] {
        &self.bins
    }

    pub fn total(&self) -> u64 {
        self.total
    }

    pub fn max_bin(&self) -> u64 {
        self.bins.iter().copied().max().unwrap_or(0)
    }

    pub fn occupied_levels(&self) -> usize {
        self.bins.iter().filter(|&&b| b > 0).count()
    }
}

/// Histogram over every frame of the sequence.
pub fn compute_histogram(seq: &FrameSequence) -> Histogram {
    compute_histogram_scoped(seq, HistScope::Sequence)
}

pub fn compute_histogram_scoped(seq: &FrameSequence, scope: HistScope) -> Histogram {
    let mut hist = Histogram::default();
    match scope {
        HistScope::Sequence => seq.iter().for_each(|f| hist.add_frame(f)),
        HistScope::FirstFrame => hist.add_frame(seq.first()),
    }
    hist
}

/// Inclusive intensity range `[lower, upper]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Region {
    pub lower: u8,
    pub upper: u8,
}

impl Region {
    pub fn contains(&self, intensity: u8) -> bool {
        self.lower <= intensity && intensity <= self.upper
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RegionPartition {
    z: u32,
    regions: Vec<Region>,
    /// Pixels the histogram had; the per-region target is `total / regions.len()`.
    total: u64,
    lookup: [u8; BINS],
}

impl RegionPartition {
    /// Builds a partition from explicit upper limits; the last one must be 255.
    pub fn from_upper_limits(z: u32, uppers: &[u8], total: u64) -> Result<Self, ActivityError> {
        check_z(z)?;
        let count = region_count(z);
        assert_eq!(uppers.len(), count, "expected {count} region limits");
        assert_eq!(uppers.last(), Some(&255), "last region must end at 255");
        let mut regions = Vec::with_capacity(count);
        let mut lookup = [0u8; BINS];
        let mut lower = 0usize;
        for (k, &upper) in uppers.iter().enumerate() {
            assert!(lower <= upper as usize, "region {k} is empty");
            regions.push(Region {
                lower: lower as u8,
                upper,
            });
            lookup[lower..=upper as usize].fill(k as u8);
            lower = upper as usize + 1;
        }
        Ok(Self {
            z,
            regions,
            total,
            lookup,
        })
    }

    pub fn z(&self) -> u32 {
        self.z
    }

    pub fn regions(&self) -> &[Region] {
        &self.regions
    }

    pub fn len(&self) -> usize {
        self.regions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.regions.is_empty()
    }

    /// `N_m` as a real number.
    pub fn target(&self) -> f64 {
        self.total as f64 / self.regions.len() as f64
    }

    pub fn upper_limits(&self) -> Vec<u8> {
        self.regions.iter().map(|r| r.upper).collect()
    }

    #[inline]
    pub fn assign(&self, intensity: u8) -> usize {
        self.lookup[intensity as usize] as usize
    }

    /// Pixels of `hist` that fall in each region.
    pub fn region_counts(&self, hist: &Histogram) -> Vec<u64> {
        self.regions
            .iter()
            .map(|r| hist.bins[r.lower as usize..=r.upper as usize].iter().sum())
            .collect()
    }
}

/// Index of the region that holds `intensity`.
pub fn assign_region(partition: &RegionPartition, intensity: u8) -> usize {
    partition.assign(intensity)
}

pub fn region_count(z: u32) -> usize {
    2 * z as usize - 1
}

fn check_z(z: u32) -> Result<(), ActivityError> {
    if (1..=MAX_Z).contains(&z) {
        Ok(())
    } else {
        Err(ActivityError::InvalidZ(z))
    }
}

/// Splits `[0,255]` into `2Z-1` regions of about `N_m = total / (2Z-1)` pixels.
///
/// Each region accumulates bins from its lower limit and stops at the bin
/// whose running count is closest to `N_m`; ties go to the smaller region.
/// A region must hold at least one pixel, and never reaches so far that
/// fewer occupied levels than regions still to be formed would remain.
pub fn compute_region_boundaries(
    hist: &Histogram,
    z: u32,
) -> Result<RegionPartition, ActivityError> {
    check_z(z)?;
    if hist.total == 0 {
        return Err(ActivityError::EmptyHistogram);
    }
    let count = region_count(z);
    let occupied = hist.occupied_levels();
    if occupied < count {
        return Err(ActivityError::TooManyRegions {
            z,
            needed: count,
            available: occupied,
        });
    }

    // occupied_after[i] = occupied levels in (i, 255]
    let mut occupied_after = [0usize; BINS];
    for i in (0..BINS - 1).rev() {
        occupied_after[i] = occupied_after[i + 1] + usize::from(hist.bins[i + 1] > 0);
    }

    // Distances are compared as |acc * R - total| to stay in integers.
    let r = count as i128;
    let total = hist.total as i128;
    let mut uppers = Vec::with_capacity(count);
    let mut start = 0usize;
    for k in 0..count - 1 {
        let still_needed = count - 1 - k;
        let mut acc = 0i128;
        let mut best: Option<(i128, usize)> = None;
        for (i, (&bin, &after)) in hist
            .bins
            .iter()
            .zip(&occupied_after)
            .enumerate()
            .skip(start)
        {
            if after < still_needed {
                break;
            }
            acc += bin as i128;
            if acc == 0 {
                continue;
            }
            let dist = (acc * r - total).abs();
            if best.is_none_or(|(d, _)| dist < d) {
                best = Some((dist, i));
            }
        }
        let (_, upper) = best.expect("occupied-level reservation guarantees a candidate");
        uppers.push(upper as u8);
        start = upper + 1;
    }
    uppers.push(255);
    RegionPartition::from_upper_limits(z, &uppers, hist.total)
}

/// Exact activity index `granular_count / frames`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ActivityIndex {
    pub granular_count: u64,
    pub frames: u64,
}

impl ActivityIndex {
    pub fn new(granular_count: u64, frames: u64) -> Self {
        assert!(frames > 0, "activity index needs at least one frame");
        Self {
            granular_count,
            frames,
        }
    }

    pub fn as_f64(&self) -> f64 {
        self.granular_count as f64 / self.frames as f64
    }

    /// Exact `granular_count / frames` against an `f64` threshold.
    pub fn cmp_threshold(&self, threshold: f64) -> Ordering {
        assert!(!threshold.is_nan(), "threshold is NaN");
        if threshold.is_infinite() {
            return if threshold > 0.0 {
                Ordering::Less
            } else {
                Ordering::Greater
            };
        }
        let lhs = BigRational::new(BigInt::from(self.granular_count), BigInt::from(self.frames));
        let rhs = BigRational::from_float(threshold).expect("finite threshold");
        lhs.cmp(&rhs)
    }

    pub fn exceeds(&self, threshold: f64) -> bool {
        self.cmp_threshold(threshold) == Ordering::Greater
    }
}

impl fmt::Display for ActivityIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.as_f64())
    }
}

/// Per-pixel transition counters (the MEM_FLAGS contents).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GranuleCounters {
    pub flags: Vec<u32>,
    pub register_width: u32,
}

impl GranuleCounters {
    pub fn total(&self) -> u64 {
        self.flags.iter().map(|&f| f as u64).sum()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ActivityReport {
    pub granular_count: u64,
    pub activity_index: ActivityIndex,
    /// Maximal runs of frames in which a pixel stays in one region, per region.
    pub per_region_granules: Vec<u64>,
    pub frames_used: u64,
}

/// Counter width that can hold `N_F - 1` transitions.
pub fn default_counter_width(frames: usize) -> u32 {
    let frames = frames.max(1) as u64;
    (u64::BITS - (frames - 1).leading_zeros()).max(1)
}

pub fn compute_granular(
    seq: &FrameSequence,
    partition: &RegionPartition,
) -> (GranuleCounters, ActivityReport) {
    let n_p = seq.pixel_count();
    let mut flags = vec![0u32; n_p];
    let mut granules = vec![0u64; partition.len()];

    let mut prev: Vec<u8> = seq
        .first()
        .pixels()
        .iter()
        .map(|&px| partition.assign(px) as u8)
        .collect();
    for &region in &prev {
        granules[region as usize] += 1;
    }
    for frame in &seq.frames()[1..] {
        for ((prev_region, flag), &px) in prev.iter_mut().zip(&mut flags).zip(frame.pixels()) {
            let region = partition.assign(px) as u8;
            if region != *prev_region {
                *flag += 1;
                granules[region as usize] += 1;
                *prev_region = region;
            }
        }
    }

    let counters = GranuleCounters {
        flags,
        register_width: default_counter_width(seq.count()),
    };
    let granular_count = counters.total();
    let frames_used = seq.count() as u64;
    let report = ActivityReport {
        granular_count,
        activity_index: ActivityIndex::new(granular_count, frames_used),
        per_region_granules: granules,
        frames_used,
    };
    (counters, report)
}

/// `256 * ceil(log2(n_p))` bits for the histogram bin registers.
pub fn histogram_memory_bits(n_p: u64) -> Result<u64, ActivityError> {
    if n_p == 0 {
        return Err(ActivityError::InvalidPixelCount);
    }
    Ok(BINS as u64 * ceil_log2(n_p) as u64)
}

/// `n_p * l` bits for the per-pixel granule counters.
pub fn counter_memory_bits(n_p: u64, l: u32) -> Result<u64, ActivityError> {
    if n_p == 0 {
        return Err(ActivityError::InvalidPixelCount);
    }
    if l == 0 {
        return Err(ActivityError::InvalidWidth);
    }
    Ok(n_p * l as u64)
}

pub fn ceil_log2(n: u64) -> u32 {
    debug_assert!(n > 0);
    u64::BITS - (n - 1).leading_zeros()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn seq_of(width: usize, height: usize, frames: &[&[u8]]) -> FrameSequence {
        FrameSequence::new(
            frames
                .iter()
                .map(|px| Frame::new(width, height, px.to_vec()).unwrap())
                .collect(),
        )
        .unwrap()
    }

    fn uniform_hist() -> Histogram {
        Histogram::from_bins([1; BINS])
    }

    #[test]
    fn histogram_of_constant_frame() {
        let seq = seq_of(2, 2, &[&[128; 4]]);
        let h = compute_histogram(&seq);
        assert_eq!(h.bins()[128], 4);
        assert_eq!(h.total(), 4);
        assert_eq!(h.bins().iter().sum::<u64>(), 4);

        let seq = seq_of(2, 2, &[&[128; 4], &[128; 4]]);
        assert_eq!(compute_histogram(&seq).bins()[128], 8);
    }

    #[test]
    fn histogram_of_all_levels() {
        let px: Vec<u8> = (0..=255).collect();
        let seq = seq_of(16, 16, &[&px]);
        let h = compute_histogram(&seq);
        // enumerate-and-count oracle
        for level in 0..=255u8 {
            let expected = px.iter().filter(|&&p| p == level).count() as u64;
            assert_eq!(h.bins()[level as usize], expected);
        }
    }

    #[test]
    fn first_frame_scope() {
        let seq = seq_of(1, 2, &[&[0, 0], &[9, 9]]);
        let h = compute_histogram_scoped(&seq, HistScope::FirstFrame);
        assert_eq!(h.total(), 2);
        assert_eq!(h.bins()[0], 2);
        assert_eq!(h.bins()[9], 0);
    }

    #[test]
    fn uniform_histogram_three_regions() {
        let p = compute_region_boundaries(&uniform_hist(), 2).unwrap();
        assert_eq!(p.upper_limits(), vec![84, 169, 255]);
        assert_eq!(
            p.regions()[1],
            Region {
                lower: 85,
                upper: 169
            }
        );
        assert_eq!(p.region_counts(&uniform_hist()), vec![85, 85, 86]);
        assert!((p.target() - 256.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn single_region_for_z1() {
        let p = compute_region_boundaries(&uniform_hist(), 1).unwrap();
        assert_eq!(
            p.regions(),
            &[Region {
                lower: 0,
                upper: 255
            }]
        );
        for i in 0..=255 {
            assert_eq!(assign_region(&p, i), 0);
        }
    }

    #[test]
    fn single_occupied_level_cannot_feed_three_regions() {
        let mut bins = [0; BINS];
        bins[7] = 100;
        let err = compute_region_boundaries(&Histogram::from_bins(bins), 2).unwrap_err();
        assert_eq!(
            err,
            ActivityError::TooManyRegions {
                z: 2,
                needed: 3,
                available: 1
            }
        );
        assert!(compute_region_boundaries(&Histogram::from_bins(bins), 1).is_ok());
    }

    #[test]
    fn invalid_z_and_empty_histogram() {
        assert_eq!(
            compute_region_boundaries(&uniform_hist(), 0).unwrap_err(),
            ActivityError::InvalidZ(0)
        );
        assert_eq!(
            compute_region_boundaries(&uniform_hist(), 9).unwrap_err(),
            ActivityError::InvalidZ(9)
        );
        assert_eq!(
            compute_region_boundaries(&Histogram::default(), 1).unwrap_err(),
            ActivityError::EmptyHistogram
        );
    }

    #[test]
    fn tie_stops_at_smaller_region() {
        // R = 3, total = 6, N_m = 2: after bin 1 acc = 2 (exact), bin 2 is empty
        // and keeps acc = 2, so the region must stop at 1.
        let mut bins = [0; BINS];
        bins[0] = 1;
        bins[1] = 1;
        bins[3] = 2;
        bins[4] = 2;
        let p = compute_region_boundaries(&Histogram::from_bins(bins), 2).unwrap();
        assert_eq!(p.upper_limits(), vec![1, 3, 255]);

        // acc 1 vs acc 3 around N_m = 2: equal distance, keep the smaller.
        let mut bins = [0; BINS];
        bins[0] = 1;
        bins[1] = 2;
        bins[10] = 1;
        bins[11] = 1;
        bins[12] = 1;
        let p = compute_region_boundaries(&Histogram::from_bins(bins), 2).unwrap();
        assert_eq!(p.upper_limits()[0], 0);
    }

    #[test]
    fn leading_empty_bins_join_the_first_region() {
        let mut bins = [0; BINS];
        for b in bins.iter_mut().skip(100).take(30) {
            *b = 10;
        }
        let h = Histogram::from_bins(bins);
        let p = compute_region_boundaries(&h, 2).unwrap();
        assert_eq!(p.regions()[0].lower, 0);
        assert_eq!(p.region_counts(&h), vec![100, 100, 100]);
    }

    #[test]
    fn reservation_keeps_later_regions_populated() {
        let mut bins = [0; BINS];
        bins[0] = 100;
        bins[1] = 1;
        bins[2] = 1;
        let p = compute_region_boundaries(&Histogram::from_bins(bins), 2).unwrap();
        assert_eq!(p.upper_limits(), vec![0, 1, 255]);
    }

    #[test]
    fn assign_boundaries() {
        let p = compute_region_boundaries(&uniform_hist(), 2).unwrap();
        assert_eq!(assign_region(&p, 85), 1);
        assert_eq!(assign_region(&p, 84), 0);
        assert_eq!(assign_region(&p, 0), 0);
        assert_eq!(assign_region(&p, 255), 2);
    }

    fn partition_012() -> RegionPartition {
        RegionPartition::from_upper_limits(2, &[9, 19, 255], 0).unwrap()
    }

    #[test]
    fn transitions_between_two_frames() {
        // regions frame 1 = [0,0,1,1], frame 2 = [0,1,1,2]
        let seq = seq_of(2, 2, &[&[0, 5, 10, 15], &[1, 12, 18, 200]]);
        let (counters, report) = compute_granular(&seq, &partition_012());
        assert_eq!(counters.flags, vec![0, 1, 0, 1]);
        assert_eq!(report.granular_count, 2);
        assert_eq!(report.activity_index.as_f64(), 1.0);
        // initial runs [2,2,0] plus one new run in regions 1 and 2
        assert_eq!(report.per_region_granules, vec![2, 3, 1]);
    }

    #[test]
    fn identical_frames_have_no_activity() {
        let px: Vec<u8> = (0..16).map(|i| i * 16).collect();
        let seq = seq_of(4, 4, &[&px, &px, &px, &px]);
        let p = compute_region_boundaries(&compute_histogram(&seq), 4).unwrap();
        let (_, report) = compute_granular(&seq, &p);
        assert_eq!(report.granular_count, 0);
        assert_eq!(report.activity_index.as_f64(), 0.0);
        assert_eq!(report.per_region_granules.iter().sum::<u64>(), 16);
    }

    #[test]
    fn single_frame_has_no_transitions() {
        let seq = seq_of(2, 1, &[&[0, 255]]);
        let (c, r) = compute_granular(&seq, &partition_012());
        assert_eq!(r.granular_count, 0);
        assert_eq!(c.register_width, 1);
    }

    #[test]
    fn counter_width_covers_frames() {
        assert_eq!(default_counter_width(1), 1);
        assert_eq!(default_counter_width(2), 1);
        assert_eq!(default_counter_width(4), 2);
        assert_eq!(default_counter_width(5), 3);
        assert_eq!(default_counter_width(8), 3);
        assert_eq!(default_counter_width(9), 4);
    }

    #[test]
    fn memory_formulas() {
        assert_eq!(histogram_memory_bits(262_144).unwrap(), 4608);
        assert_eq!(histogram_memory_bits(1).unwrap(), 0);
        assert_eq!(histogram_memory_bits(2).unwrap(), 256);
        assert_eq!(histogram_memory_bits(3).unwrap(), 512);
        assert_eq!(
            histogram_memory_bits(0).unwrap_err(),
            ActivityError::InvalidPixelCount
        );
        assert_eq!(counter_memory_bits(262_144, 8).unwrap(), 2_097_152);
        assert_eq!(counter_memory_bits(1, 1).unwrap(), 1);
        assert_eq!(counter_memory_bits(100, 4).unwrap(), 400);
        assert_eq!(
            counter_memory_bits(0, 4).unwrap_err(),
            ActivityError::InvalidPixelCount
        );
        assert_eq!(
            counter_memory_bits(4, 0).unwrap_err(),
            ActivityError::InvalidWidth
        );
    }

    #[test]
    fn exact_threshold_comparison() {
        let half = ActivityIndex::new(2, 4);
        assert_eq!(half.cmp_threshold(0.5), Ordering::Equal);
        assert!(!half.exceeds(0.5));
        assert!(half.exceeds(0.499_999_999_999));
        // 1/3 is not representable; the nearest double is slightly below it.
        let third = ActivityIndex::new(1, 3);
        assert!(third.exceeds(1.0 / 3.0));
        assert!(!ActivityIndex::new(0, 4).exceeds(0.0));
        assert!(!ActivityIndex::new(u64::MAX, 1).exceeds(f64::INFINITY));
    }

    fn arb_hist() -> impl Strategy<Value = Histogram> {
        (proptest::collection::vec(0u64..50, BINS), 0.0f64..0.8).prop_map(|(raw, sparsity)| {
            let mut bins = [0u64; BINS];
            for (i, v) in raw.into_iter().enumerate() {
                // Knock out a deterministic subset of bins.
                let keep = ((i as f64 * 0.618_033_988_7).fract()) >= sparsity;
                bins[i] = if keep { v } else { 0 };
            }
            Histogram::from_bins(bins)
        })
    }

    proptest! {
        #[test]
        fn histogram_conservation(px in proptest::collection::vec(any::<u8>(), 1..200), frames in 1usize..4) {
            let n = px.len();
            let seq = FrameSequence::new(vec![Frame::new(n, 1, px).unwrap(); frames]).unwrap();
            let h = compute_histogram(&seq);
            prop_assert_eq!(h.bins().iter().sum::<u64>(), (n * frames) as u64);
            prop_assert_eq!(h.total(), (n * frames) as u64);
        }

        #[test]
        fn partition_is_total_and_contiguous(h in arb_hist(), z in 1u32..=MAX_Z) {
            let Ok(p) = compute_region_boundaries(&h, z) else {
                prop_assert!(h.occupied_levels() < region_count(z) || h.total() == 0);
                return Ok(());
            };
            let regions = p.regions();
            prop_assert_eq!(regions.len(), region_count(z));
            prop_assert_eq!(regions[0].lower, 0);
            prop_assert_eq!(regions.last().unwrap().upper, 255);
            for w in regions.windows(2) {
                prop_assert_eq!(w[1].lower as usize, w[0].upper as usize + 1);
            }
            for r in regions {
                prop_assert!(r.lower <= r.upper);
            }
            for i in 0..=255u8 {
                let hits = regions.iter().filter(|r| r.contains(i)).count();
                prop_assert_eq!(hits, 1);
                prop_assert!(regions[p.assign(i)].contains(i));
            }
            for c in p.region_counts(&h) {
                prop_assert!(c > 0);
            }
        }

        #[test]
        fn greedy_regions_stay_within_one_bin_of_target(h in arb_hist(), z in 1u32..=MAX_Z) {
            prop_assume!(h.occupied_levels() >= 4 * region_count(z));
            let p = compute_region_boundaries(&h, z).unwrap();
            let counts = p.region_counts(&h);
            let m = h.max_bin() as f64;
            let target = p.target();
            // Every region chosen by the closest-count rule lands within one bin
            // of N_m; the final region takes whatever is left.
            for &c in &counts[..counts.len() - 1] {
                prop_assert!((c as f64 - target).abs() <= m, "{c} vs {target} ± {m}");
            }
            let drift = (counts.len() - 1) as f64 * m;
            prop_assert!((*counts.last().unwrap() as f64 - target).abs() <= drift.max(m));
        }

        #[test]
        fn z1_and_identical_frames_never_transition(
            px in proptest::collection::vec(any::<u8>(), 16),
            other in proptest::collection::vec(any::<u8>(), 16),
            z in 1u32..=4,
        ) {
            let a = Frame::new(4, 4, px).unwrap();
            let b = Frame::new(4, 4, other).unwrap();
            let seq = FrameSequence::new(vec![a.clone(), b, a.clone()]).unwrap();
            let p1 = compute_region_boundaries(&compute_histogram(&seq), 1).unwrap();
            prop_assert_eq!(compute_granular(&seq, &p1).1.granular_count, 0);

            let same = FrameSequence::new(vec![a.clone(), a.clone(), a]).unwrap();
            if let Ok(p) = compute_region_boundaries(&compute_histogram(&same), z) {
                prop_assert_eq!(compute_granular(&same, &p).1.granular_count, 0);
            }
        }

        #[test]
        fn granular_count_bounds(
            frames in proptest::collection::vec(proptest::collection::vec(any::<u8>(), 12), 1..6),
            z in 1u32..=3,
        ) {
            let n_f = frames.len() as u64;
            let seq = FrameSequence::new(
                frames.into_iter().map(|px| Frame::new(3, 4, px).unwrap()).collect(),
            ).unwrap();
            if let Ok(p) = compute_region_boundaries(&compute_histogram(&seq), z) {
                let (c, r) = compute_granular(&seq, &p);
                prop_assert!(r.granular_count <= 12 * (n_f - 1));
                prop_assert!(c.flags.iter().all(|&f| (f as u64) < n_f));
                prop_assert!(c.flags.iter().all(|&f| f < (1 << c.register_width)));
                prop_assert_eq!(r.activity_index.granular_count, r.granular_count);
                prop_assert_eq!(r.activity_index.frames, n_f);
                prop_assert_eq!(r.per_region_granules.iter().sum::<u64>(), 12 + r.granular_count);
            }
        }
    }
}
