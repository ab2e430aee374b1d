//! Orthonormal 2-D Haar transform and coefficient shrinkage.
//!
//! Each level pairs neighbouring samples as `(a+b)/√2` and `(a-b)/√2`, first
//! along rows and then along columns. Odd sizes are extended by repeating the
//! last row or column; the inverse trims the extension away again.

use std::f64::consts::SQRT_2;
use std::fmt;
use std::str::FromStr;

use ndarray::{s, Array2, ArrayView2, Zip};
use serde::Serialize;
use thiserror::Error;

use crate::frame::Frame;

/// Scale linking the median absolute deviation to a Gaussian standard deviation.
pub const MAD_SCALE: f64 = 0.6745;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum WaveletError {
    #[error("empty input matrix")]
    EmptyInput,
    #[error("decomposition depth {levels} too large for a {height}x{width} input (max {max})")]
    DepthTooLarge {
        levels: usize,
        height: usize,
        width: usize,
        max: usize,
    },
    #[error("inconsistent decomposition: {0}")]
    ShapeMismatch(String),
    #[error("universal threshold needs at least 2 coefficients, got {0}")]
    InvalidCount(usize),
    #[error("invalid threshold {0}: must be finite and non-negative")]
    InvalidThreshold(f64),
}

/// Detail subbands of one level. `hl` is high-pass along rows (horizontal
/// frequency) and low-pass along columns; `lh` is the transpose role.
#[derive(Debug, Clone, PartialEq)]
pub struct DetailBands {
    pub lh: Array2<f64>,
    pub hl: Array2<f64>,
    pub hh: Array2<f64>,
    /// `(height, width)` of this level's input before edge extension.
    pub input_shape: (usize, usize),
}

impl DetailBands {
    fn bands(&self) -> [&Array2<f64>; 3] {
        [&self.lh, &self.hl, &self.hh]
    }

    fn bands_mut(&mut self) -> [&mut Array2<f64>; 3] {
        [&mut self.lh, &mut self.hl, &mut self.hh]
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct WaveletDecomposition {
    pub ll: Array2<f64>,
    /// `details[0]` is the finest level.
    pub details: Vec<DetailBands>,
    pub original_shape: (usize, usize),
}

impl WaveletDecomposition {
    pub fn levels(&self) -> usize {
        self.details.len()
    }

    /// Sum of squares over every coefficient.
    pub fn energy(&self) -> f64 {
        let sq = |a: &Array2<f64>| a.iter().map(|v| v * v).sum::<f64>();
        sq(&self.ll)
            + self
                .details
                .iter()
                .flat_map(|d| d.bands())
                .map(sq)
                .sum::<f64>()
    }

    pub fn finest_hh(&self) -> &Array2<f64> {
        &self.details[0].hh
    }
}

pub fn max_levels(height: usize, width: usize) -> usize {
    let m = height.min(width);
    if m == 0 {
        0
    } else {
        m.ilog2() as usize
    }
}

/// Repeats the last row/column so both dimensions are even.
fn extend_even(x: ArrayView2<f64>) -> Array2<f64> {
    let (h, w) = x.dim();
    let (h2, w2) = (h + h % 2, w + w % 2);
    Array2::from_shape_fn((h2, w2), |(i, j)| x[[i.min(h - 1), j.min(w - 1)]])
}

fn analyze_level(x: ArrayView2<f64>) -> (Array2<f64>, DetailBands) {
    let input_shape = x.dim();
    let ext = extend_even(x);
    let (h, w) = ext.dim();
    let (hh_, hw) = (h / 2, w / 2);

    // rows
    let mut low = Array2::zeros((h, hw));
    let mut high = Array2::zeros((h, hw));
    for i in 0..h {
        for j in 0..hw {
            let (a, b) = (ext[[i, 2 * j]], ext[[i, 2 * j + 1]]);
            low[[i, j]] = (a + b) / SQRT_2;
            high[[i, j]] = (a - b) / SQRT_2;
        }
    }

    // columns
    let split_cols = |m: &Array2<f64>| {
        let mut lo = Array2::zeros((hh_, hw));
        let mut hi = Array2::zeros((hh_, hw));
        for i in 0..hh_ {
            for j in 0..hw {
                let (a, b) = (m[[2 * i, j]], m[[2 * i + 1, j]]);
                lo[[i, j]] = (a + b) / SQRT_2;
                hi[[i, j]] = (a - b) / SQRT_2;
            }
        }
        (lo, hi)
    };
    let (ll, lh) = split_cols(&low);
    let (hl, hh) = split_cols(&high);
    (
        ll,
        DetailBands {
            lh,
            hl,
            hh,
            input_shape,
        },
    )
}

fn synthesize_level(ll: &Array2<f64>, d: &DetailBands) -> Array2<f64> {
    let (bh, bw) = ll.dim();
    let merge_cols = |lo: &Array2<f64>, hi: &Array2<f64>| {
        let mut out = Array2::zeros((2 * bh, bw));
        for i in 0..bh {
            for j in 0..bw {
                let (l, h) = (lo[[i, j]], hi[[i, j]]);
                out[[2 * i, j]] = (l + h) / SQRT_2;
                out[[2 * i + 1, j]] = (l - h) / SQRT_2;
            }
        }
        out
    };
    let low = merge_cols(ll, &d.lh);
    let high = merge_cols(&d.hl, &d.hh);

    let mut out = Array2::zeros((2 * bh, 2 * bw));
    for i in 0..2 * bh {
        for j in 0..bw {
            let (l, h) = (low[[i, j]], high[[i, j]]);
            out[[i, 2 * j]] = (l + h) / SQRT_2;
            out[[i, 2 * j + 1]] = (l - h) / SQRT_2;
        }
    }
    let (h, w) = d.input_shape;
    out.slice(s![..h, ..w]).to_owned()
}

pub fn dwt2_forward(
    x: ArrayView2<f64>,
    levels: usize,
) -> Result<WaveletDecomposition, WaveletError> {
    let (height, width) = x.dim();
    if height == 0 || width == 0 {
        return Err(WaveletError::EmptyInput);
    }
    let max = max_levels(height, width);
    if levels == 0 || levels > max {
        return Err(WaveletError::DepthTooLarge {
            levels,
            height,
            width,
            max,
        });
    }
    let mut details = Vec::with_capacity(levels);
    let mut approx = x.to_owned();
    for _ in 0..levels {
        let (ll, d) = analyze_level(approx.view());
        details.push(d);
        approx = ll;
    }
    Ok(WaveletDecomposition {
        ll: approx,
        details,
        original_shape: (height, width),
    })
}

fn check_structure(dec: &WaveletDecomposition) -> Result<(), WaveletError> {
    if dec.details.is_empty() {
        return Err(WaveletError::ShapeMismatch("no detail levels".into()));
    }
    if dec.details[0].input_shape != dec.original_shape {
        return Err(WaveletError::ShapeMismatch(format!(
            "finest level input {:?} differs from original shape {:?}",
            dec.details[0].input_shape, dec.original_shape
        )));
    }
    for (k, d) in dec.details.iter().enumerate() {
        let (h, w) = d.input_shape;
        let band = (h.div_ceil(2), w.div_ceil(2));
        if d.bands().iter().any(|b| b.dim() != band) {
            return Err(WaveletError::ShapeMismatch(format!(
                "level {} bands must all be {band:?}",
                k + 1
            )));
        }
        let next = dec
            .details
            .get(k + 1)
            .map_or(dec.ll.dim(), |n| n.input_shape);
        if next != band {
            return Err(WaveletError::ShapeMismatch(format!(
                "level {} approximation is {next:?}, expected {band:?}",
                k + 1
            )));
        }
    }
    Ok(())
}

pub fn dwt2_inverse(dec: &WaveletDecomposition) -> Result<Array2<f64>, WaveletError> {
    check_structure(dec)?;
    let mut approx = dec.ll.clone();
    for d in dec.details.iter().rev() {
        approx = synthesize_level(&approx, d);
    }
    Ok(approx)
}

fn median(mut v: Vec<f64>) -> f64 {
    if v.is_empty() {
        return 0.0;
    }
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        (v[n / 2 - 1] + v[n / 2]) / 2.0
    }
}

/// Robust noise estimate `median(|HH₁|) / 0.6745` from the finest diagonal band.
pub fn estimate_sigma(dec: &WaveletDecomposition) -> f64 {
    median(dec.finest_hh().iter().map(|c| c.abs()).collect()) / MAD_SCALE
}

/// `sigma * sqrt(2 ln n)`
pub fn universal_threshold(sigma: f64, n: usize) -> Result<f64, WaveletError> {
    if n < 2 {
        return Err(WaveletError::InvalidCount(n));
    }
    Ok(sigma * (2.0 * (n as f64).ln()).sqrt())
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Shrink {
    #[default]
    Soft,
    Hard,
}

impl Shrink {
    #[inline]
    pub fn apply(self, c: f64, t: f64) -> f64 {
        match self {
            Shrink::Soft => c.signum() * (c.abs() - t).max(0.0),
            Shrink::Hard => {
                if c.abs() > t {
                    c
                } else {
                    0.0
                }
            }
        }
    }
}

impl FromStr for Shrink {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "soft" => Ok(Self::Soft),
            "hard" => Ok(Self::Hard),
            other => Err(format!(
                "unknown shrinkage {other:?} (expected soft or hard)"
            )),
        }
    }
}

impl fmt::Display for Shrink {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Shrink::Soft => "soft",
            Shrink::Hard => "hard",
        })
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize)]
#[serde(tag = "rule", content = "value", rename_all = "lowercase")]
pub enum ThresholdRule {
    /// VisuShrink: estimated sigma times `sqrt(2 ln N)`.
    #[default]
    Universal,
    Manual(f64),
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize)]
pub struct ThresholdSpec {
    pub mode: Shrink,
    pub rule: ThresholdRule,
}

impl ThresholdSpec {
    pub fn manual(mode: Shrink, value: f64) -> Self {
        Self {
            mode,
            rule: ThresholdRule::Manual(value),
        }
    }

    /// Threshold value for `dec`, with `N` taken as its original pixel count.
    pub fn resolve(&self, dec: &WaveletDecomposition) -> Result<f64, WaveletError> {
        let t = match self.rule {
            ThresholdRule::Universal => {
                let (h, w) = dec.original_shape;
                universal_threshold(estimate_sigma(dec), h * w)?
            }
            ThresholdRule::Manual(v) => v,
        };
        if !t.is_finite() || t < 0.0 {
            return Err(WaveletError::InvalidThreshold(t));
        }
        Ok(t)
    }
}

/// Shrinks every detail band by `t`; the approximation band is untouched.
pub fn apply_threshold(dec: &WaveletDecomposition, mode: Shrink, t: f64) -> WaveletDecomposition {
    let mut out = dec.clone();
    for level in &mut out.details {
        for band in level.bands_mut() {
            band.mapv_inplace(|c| mode.apply(c, t));
        }
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DenoiseOptions {
    pub levels: usize,
    pub threshold: ThresholdSpec,
    /// Threshold in the `ln(1 + x)` domain and map back with `exp(y) - 1`.
    pub homomorphic: bool,
}

impl Default for DenoiseOptions {
    fn default() -> Self {
        Self {
            levels: 2,
            threshold: ThresholdSpec::default(),
            homomorphic: false,
        }
    }
}

pub fn frame_to_matrix(frame: &Frame) -> Array2<f64> {
    Array2::from_shape_fn((frame.height(), frame.width()), |(i, j)| {
        frame.get(j, i) as f64
    })
}

/// Clamps to `[0,255]` and rounds half-to-even.
pub fn matrix_to_frame(m: &Array2<f64>) -> Frame {
    let (h, w) = m.dim();
    let data = m
        .iter()
        .map(|&v| v.clamp(0.0, 255.0).round_ties_even() as u8)
        .collect();
    Frame::new(w, h, data).expect("matrix dimensions are positive")
}

pub fn denoise(frame: &Frame, opts: &DenoiseOptions) -> Result<Frame, WaveletError> {
    let mut x = frame_to_matrix(frame);
    if opts.homomorphic {
        x.mapv_inplace(f64::ln_1p);
    }
    let dec = dwt2_forward(x.view(), opts.levels)?;
    let t = opts.threshold.resolve(&dec)?;
    let mut y = dwt2_inverse(&apply_threshold(&dec, opts.threshold.mode, t))?;
    if opts.homomorphic {
        y.mapv_inplace(f64::exp_m1);
    }
    Ok(matrix_to_frame(&y))
}

/// Max absolute elementwise difference.
pub fn max_abs_diff(a: ArrayView2<f64>, b: ArrayView2<f64>) -> f64 {
    assert_eq!(a.dim(), b.dim());
    Zip::from(a)
        .and(b)
        .fold(0.0f64, |m, &x, &y| m.max((x - y).abs()))
}
