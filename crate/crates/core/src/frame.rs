//! Grayscale frames, frame sequences, and PGM (P2/P5) input/output.
//!
//! Only 8-bit files with a maxval of exactly 255 are accepted. Nothing is
//! rescaled on load, so a histogram bin index is always the stored value.

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum FrameError {
    #[error("file not found: {0}")]
    MissingFile(PathBuf),
    #[error("malformed PGM header: {0}")]
    MalformedHeader(String),
    #[error("unsupported bit depth: maxval {0} (only 255 is accepted)")]
    BitDepthUnsupported(u32),
    #[error("truncated pixel data: expected {expected} samples, found {found}")]
    TruncatedData { expected: usize, found: usize },
    #[error("pixel value {value} at sample {index} exceeds maxval 255")]
    PixelOutOfRange { index: usize, value: u32 },
    #[error("frame {index} is {found:?} but the sequence is {expected:?} (width, height)")]
    DimensionMismatch {
        index: usize,
        expected: (usize, usize),
        found: (usize, usize),
    },
    #[error("invalid frame: {0}")]
    InvalidFrame(String),
    #[error("empty frame sequence")]
    EmptySequence,
    #[error("i/o failure on {path}: {source}")]
    IoFailure {
        path: PathBuf,
        #[source]
        source: io::Error,
    },
}

/// One 8-bit grayscale image stored row-major.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Frame {
    width: usize,
    height: usize,
    data: Vec<u8>,
}

impl Frame {
    pub fn new(width: usize, height: usize, data: Vec<u8>) -> Result<Self, FrameError> {
        if width == 0 || height == 0 {
            return Err(FrameError::InvalidFrame(format!(
                "dimensions must be positive, got {width}x{height}"
            )));
        }
        let expected = width
            .checked_mul(height)
            .ok_or_else(|| FrameError::InvalidFrame("dimensions overflow".into()))?;
        if data.len() != expected {
            return Err(FrameError::InvalidFrame(format!(
                "{width}x{height} frame needs {expected} pixels, got {}",
                data.len()
            )));
        }
        Ok(Self {
            width,
            height,
            data,
        })
    }

    pub fn filled(width: usize, height: usize, value: u8) -> Result<Self, FrameError> {
        Self::new(width, height, vec![value; width.saturating_mul(height)])
    }

    pub fn from_fn(
        width: usize,
        height: usize,
        mut f: impl FnMut(usize, usize) -> u8,
    ) -> Result<Self, FrameError> {
        let mut data = Vec::with_capacity(width.saturating_mul(height));
        for y in 0..height {
            for x in 0..width {
                data.push(f(x, y));
            }
        }
        Self::new(width, height, data)
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    /// `(width, height)`
    pub fn dims(&self) -> (usize, usize) {
        (self.width, self.height)
    }

    pub fn pixel_count(&self) -> usize {
        self.data.len()
    }

    pub fn pixels(&self) -> &[u8] {
        &self.data
    }

    pub fn get(&self, x: usize, y: usize) -> u8 {
        self.data[y * self.width + x]
    }

    pub fn into_pixels(self) -> Vec<u8> {
        self.data
    }
}

/// `N_F` frames of one scene, all with the same dimensions.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FrameSequence {
    frames: Vec<Frame>,
}

impl FrameSequence {
    pub fn new(frames: Vec<Frame>) -> Result<Self, FrameError> {
        let first = frames.first().ok_or(FrameError::EmptySequence)?;
        let expected = first.dims();
        if let Some((index, f)) = frames
            .iter()
            .enumerate()
            .find(|(_, f)| f.dims() != expected)
        {
            return Err(FrameError::DimensionMismatch {
                index,
                expected,
                found: f.dims(),
            });
        }
        Ok(Self { frames })
    }

    /// `N_F`
    pub fn count(&self) -> usize {
        self.frames.len()
    }

    pub fn frames(&self) -> &[Frame] {
        &self.frames
    }

    pub fn first(&self) -> &Frame {
        &self.frames[0]
    }

    pub fn dims(&self) -> (usize, usize) {
        self.frames[0].dims()
    }

    /// `N_p`, pixels per frame.
    pub fn pixel_count(&self) -> usize {
        self.frames[0].pixel_count()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Frame> {
        self.frames.iter()
    }

    pub fn into_frames(self) -> Vec<Frame> {
        self.frames
    }
}

impl<'a> IntoIterator for &'a FrameSequence {
    type Item = &'a Frame;
    type IntoIter = std::slice::Iter<'a, Frame>;

    fn into_iter(self) -> Self::IntoIter {
        self.frames.iter()
    }
}

pub fn load_frame(path: impl AsRef<Path>) -> Result<Frame, FrameError> {
    let path = path.as_ref();
    let bytes = fs::read(path).map_err(|source| {
        if source.kind() == io::ErrorKind::NotFound {
            FrameError::MissingFile(path.to_path_buf())
        } else {
            FrameError::IoFailure {
                path: path.to_path_buf(),
                source,
            }
        }
    })?;
    decode_pgm(&bytes)
}

/// Writes `frame` as a binary (P5) PGM with maxval 255.
pub fn save_frame(frame: &Frame, path: impl AsRef<Path>) -> Result<(), FrameError> {
    let path = path.as_ref();
    let io_err = |source| FrameError::IoFailure {
        path: path.to_path_buf(),
        source,
    };
    let mut file = io::BufWriter::new(fs::File::create(path).map_err(io_err)?);
    file.write_all(&encode_pgm(frame)).map_err(io_err)?;
    file.flush().map_err(io_err)
}

pub fn load_sequence<P: AsRef<Path>>(paths: &[P]) -> Result<FrameSequence, FrameError> {
    let frames = paths
        .iter()
        .map(load_frame)
        .collect::<Result<Vec<_>, _>>()?;
    FrameSequence::new(frames)
}

pub fn encode_pgm(frame: &Frame) -> Vec<u8> {
    let mut out = format!("P5\n{} {}\n255\n", frame.width, frame.height).into_bytes();
    out.extend_from_slice(&frame.data);
    out
}

/// Header tokenizer that skips whitespace and `#` comments.
struct HeaderReader<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> HeaderReader<'a> {
    fn skip_space_and_comments(&mut self) {
        while let Some(&b) = self.bytes.get(self.pos) {
            if b == b'#' {
                while let Some(&c) = self.bytes.get(self.pos) {
                    self.pos += 1;
                    if c == b'\n' || c == b'\r' {
                        break;
                    }
                }
            } else if b.is_ascii_whitespace() {
                self.pos += 1;
            } else {
                break;
            }
        }
    }

    fn token(&mut self) -> Option<&'a [u8]> {
        self.skip_space_and_comments();
        let start = self.pos;
        while let Some(&b) = self.bytes.get(self.pos) {
            if b.is_ascii_whitespace() || b == b'#' {
                break;
            }
            self.pos += 1;
        }
        (self.pos > start).then(|| &self.bytes[start..self.pos])
    }

    fn number(&mut self, what: &str) -> Result<u32, FrameError> {
        let tok = self
            .token()
            .ok_or_else(|| FrameError::MalformedHeader(format!("missing {what}")))?;
        std::str::from_utf8(tok)
            .ok()
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| {
                FrameError::MalformedHeader(format!(
                    "{what} is not a number: {:?}",
                    String::from_utf8_lossy(tok)
                ))
            })
    }
}

pub fn decode_pgm(bytes: &[u8]) -> Result<Frame, FrameError> {
    let mut hdr = HeaderReader { bytes, pos: 0 };
    let binary = match hdr.token() {
        Some(b"P5") => true,
        Some(b"P2") => false,
        Some(other) => {
            return Err(FrameError::MalformedHeader(format!(
                "unsupported magic {:?}",
                String::from_utf8_lossy(other)
            )))
        }
        None => return Err(FrameError::MalformedHeader("empty file".into())),
    };
    let width = hdr.number("width")? as usize;
    let height = hdr.number("height")? as usize;
    let maxval = hdr.number("maxval")?;
    if width == 0 || height == 0 {
        return Err(FrameError::MalformedHeader(format!(
            "zero dimension {width}x{height}"
        )));
    }
    if maxval != 255 {
        return Err(FrameError::BitDepthUnsupported(maxval));
    }
    let expected = width * height;

    let data = if binary {
        // Exactly one whitespace byte separates maxval from the raster.
        match bytes.get(hdr.pos) {
            Some(b) if b.is_ascii_whitespace() => hdr.pos += 1,
            _ => {
                return Err(FrameError::MalformedHeader(
                    "missing whitespace after maxval".into(),
                ))
            }
        }
        let raster = &bytes[hdr.pos..];
        if raster.len() < expected {
            return Err(FrameError::TruncatedData {
                expected,
                found: raster.len(),
            });
        }
        raster[..expected].to_vec()
    } else {
        let mut data = Vec::with_capacity(expected);
        while data.len() < expected {
            let Some(tok) = hdr.token() else {
                return Err(FrameError::TruncatedData {
                    expected,
                    found: data.len(),
                });
            };
            let value: u32 = std::str::from_utf8(tok)
                .ok()
                .and_then(|s| s.parse().ok())
                .ok_or_else(|| {
                    FrameError::MalformedHeader(format!(
                        "non-numeric sample {:?}",
                        String::from_utf8_lossy(tok)
                    ))
                })?;
            if value > 255 {
                return Err(FrameError::PixelOutOfRange {
                    index: data.len(),
                    value,
                });
            }
            data.push(value as u8);
        }
        data
    };
    Frame::new(width, height, data)
}
