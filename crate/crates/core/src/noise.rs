//! Multiplicative speckle synthesis, `J = I + n·I`.
//!
//! The noise stream is SplitMix64 so that any implementation can reproduce
//! it bit for bit:
//!
//! ```text
//! state += 0x9E3779B97F4A7C15
//! z = state
//! z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9
//! z = (z ^ (z >> 27)) * 0x94D049BB133111EB
//! output z ^ (z >> 31)
//! ```
//!
//! A uniform `u ∈ [0,1)` is `(output >> 11) * 2^-53`. Uniform speckle draws
//! one `u` per pixel in row-major order and uses `n = (2u - 1)·√(3v)`.
//! Gaussian speckle draws two (`u1`, `u2`) per pixel and uses the Box-Muller
//! cosine branch `n = √v · √(-2 ln(1 - u1)) · cos(2π u2)`. Frame `k` of a
//! sequence is seeded with `seed + k` (wrapping).

use std::fmt;
use std::str::FromStr;

use serde::Serialize;
use thiserror::Error;

use crate::frame::{Frame, FrameSequence};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum NoiseError {
    #[error("noise variance must be finite and non-negative, got {0}")]
    InvalidVariance(f64),
    #[error("frame count must be at least 1")]
    InvalidCount,
}

#[derive(Debug, Clone)]
pub struct SplitMix64 {
    state: u64,
}

impl SplitMix64 {
    pub fn new(seed: u64) -> Self {
        Self { state: seed }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(0x9E37_79B9_7F4A_7C15);
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }

    /// Uniform in `[0, 1)` with 53 random bits.
    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum NoiseKind {
    #[default]
    Uniform,
    Gaussian,
}

impl FromStr for NoiseKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "uniform" => Ok(Self::Uniform),
            "gaussian" => Ok(Self::Gaussian),
            other => Err(format!("unknown noise kind {other:?}")),
        }
    }
}

impl fmt::Display for NoiseKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Uniform => "uniform",
            Self::Gaussian => "gaussian",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SpeckleParams {
    pub variance: f64,
    pub seed: u64,
    pub kind: NoiseKind,
}

impl SpeckleParams {
    pub fn new(variance: f64, seed: u64) -> Result<Self, NoiseError> {
        if !variance.is_finite() || variance < 0.0 {
            return Err(NoiseError::InvalidVariance(variance));
        }
        Ok(Self {
            variance,
            seed,
            kind: NoiseKind::Uniform,
        })
    }

    pub fn with_kind(mut self, kind: NoiseKind) -> Self {
        self.kind = kind;
        self
    }
}

/// Zero-mean multiplicative factors `n` with variance `params.variance`.
pub struct SpeckleSamples {
    rng: SplitMix64,
    kind: NoiseKind,
    scale: f64,
}

impl SpeckleSamples {
    pub fn new(params: &SpeckleParams) -> Self {
        let scale = match params.kind {
            NoiseKind::Uniform => (3.0 * params.variance).sqrt(),
            NoiseKind::Gaussian => params.variance.sqrt(),
        };
        Self {
            rng: SplitMix64::new(params.seed),
            kind: params.kind,
            scale,
        }
    }
}

impl Iterator for SpeckleSamples {
    type Item = f64;

    fn next(&mut self) -> Option<f64> {
        let n = match self.kind {
            NoiseKind::Uniform => (2.0 * self.rng.next_f64() - 1.0) * self.scale,
            NoiseKind::Gaussian => {
                let u1 = self.rng.next_f64();
                let u2 = self.rng.next_f64();
                let r = (-2.0 * (1.0 - u1).ln()).sqrt();
                r * (std::f64::consts::TAU * u2).cos() * self.scale
            }
        };
        Some(n)
    }
}

pub fn add_speckle(frame: &Frame, params: &SpeckleParams) -> Frame {
    if params.variance == 0.0 {
        return frame.clone();
    }
    let data = frame
        .pixels()
        .iter()
        .zip(SpeckleSamples::new(params))
        .map(|(&px, n)| {
            let i = px as f64;
            (i + n * i).clamp(0.0, 255.0).round_ties_even() as u8
        })
        .collect();
    Frame::new(frame.width(), frame.height(), data).expect("same dimensions")
}

/// `n_frames` independent speckle realizations of one clean frame.
pub fn noise_sequence(
    frame: &Frame,
    params: &SpeckleParams,
    n_frames: usize,
) -> Result<FrameSequence, NoiseError> {
    if n_frames == 0 {
        return Err(NoiseError::InvalidCount);
    }
    let frames = (0..n_frames as u64)
        .map(|k| {
            let p = SpeckleParams {
                seed: params.seed.wrapping_add(k),
                ..*params
            };
            add_speckle(frame, &p)
        })
        .collect();
    Ok(FrameSequence::new(frames).expect("all frames share dimensions"))
}
