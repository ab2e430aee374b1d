//! Reference implementations written independently of the library, plus
//! small generators shared by the integration tests.
#![allow(dead_code)]

use speckle_core::frame::{Frame, FrameSequence};

/// Region of `px` by scanning upper limits left to right.
pub fn region_of(uppers: &[u8], px: u8) -> usize {
    let mut k = 0;
    while px > uppers[k] {
        k += 1;
    }
    k
}

/// Nested-loop granular count: one increment whenever a pixel's region differs
/// from its region in the previous frame.
pub fn brute_granular(seq: &FrameSequence, uppers: &[u8]) -> (u64, Vec<u64>) {
    let frames = seq.frames();
    let (w, h) = seq.dims();
    let mut count = 0u64;
    let mut runs = vec![0u64; uppers.len()];
    for y in 0..h {
        for x in 0..w {
            runs[region_of(uppers, frames[0].get(x, y))] += 1;
            for f in 1..frames.len() {
                let before = region_of(uppers, frames[f - 1].get(x, y));
                let now = region_of(uppers, frames[f].get(x, y));
                if before != now {
                    count += 1;
                    runs[now] += 1;
                }
            }
        }
    }
    (count, runs)
}

pub fn brute_histogram(seq: &FrameSequence) -> [u64; 256] {
    let mut bins = [0u64; 256];
    for f in seq.frames() {
        for y in 0..f.height() {
            for x in 0..f.width() {
                bins[f.get(x, y) as usize] += 1;
            }
        }
    }
    bins
}

/// Pixel counts per region given upper limits.
pub fn region_totals(bins: &[u64; 256], uppers: &[u8]) -> Vec<u64> {
    let mut out = vec![0u64; uppers.len()];
    for (v, &c) in bins.iter().enumerate() {
        out[region_of(uppers, v as u8)] += c;
    }
    out
}

/// Matrix as nested rows, kept free of the library's array type.
pub type Grid = Vec<Vec<f64>>;

fn pad_even(x: &Grid) -> Grid {
    let h = x.len();
    let w = x[0].len();
    let (h2, w2) = (h + h % 2, w + w % 2);
    (0..h2)
        .map(|i| (0..w2).map(|j| x[i.min(h - 1)][j.min(w - 1)]).collect())
        .collect()
}

/// One Haar level in closed 2x2-block form: (ll, lh, hl, hh).
pub fn haar_block_level(x: &Grid) -> (Grid, Grid, Grid, Grid) {
    let e = pad_even(x);
    let (bh, bw) = (e.len() / 2, e[0].len() / 2);
    let mut bands: [Grid; 4] = std::array::from_fn(|_| vec![vec![0.0; bw]; bh]);
    for i in 0..bh {
        for j in 0..bw {
            let a = e[2 * i][2 * j];
            let b = e[2 * i][2 * j + 1];
            let c = e[2 * i + 1][2 * j];
            let d = e[2 * i + 1][2 * j + 1];
            bands[0][i][j] = (a + b + c + d) / 2.0;
            bands[1][i][j] = (a + b - c - d) / 2.0;
            bands[2][i][j] = (a - b + c - d) / 2.0;
            bands[3][i][j] = (a - b - c + d) / 2.0;
        }
    }
    let [ll, lh, hl, hh] = bands;
    (ll, lh, hl, hh)
}

pub fn sum_sq(g: &Grid) -> f64 {
    g.iter().flatten().map(|v| v * v).sum()
}

/// Coefficient energy of a `levels`-deep decomposition, computed blockwise.
pub fn haar_block_energy(x: &Grid, levels: usize) -> f64 {
    let mut approx = x.clone();
    let mut energy = 0.0;
    for _ in 0..levels {
        let (ll, lh, hl, hh) = haar_block_level(&approx);
        energy += sum_sq(&lh) + sum_sq(&hl) + sum_sq(&hh);
        approx = ll;
    }
    energy + sum_sq(&approx)
}

/// xorshift64* for test inputs; independent of the library's noise source.
pub struct TestRng(u64);

impl TestRng {
    pub fn new(seed: u64) -> Self {
        Self(seed.wrapping_mul(0x9E37_79B9_7F4A_7C15) | 1)
    }

    pub fn next_u64(&mut self) -> u64 {
        self.0 ^= self.0 >> 12;
        self.0 ^= self.0 << 25;
        self.0 ^= self.0 >> 27;
        self.0.wrapping_mul(0x2545_F491_4F6C_DD1D)
    }

    /// Uniform in `lo..=hi`.
    pub fn range(&mut self, lo: u64, hi: u64) -> u64 {
        lo + self.next_u64() % (hi - lo + 1)
    }

    pub fn unit(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 / (1u64 << 53) as f64
    }
}

/// Random sequence whose frames are small perturbations of a base frame, so
/// granular counts land well away from both zero and the maximum.
pub fn random_sequence(rng: &mut TestRng, w: usize, h: usize, frames: usize) -> FrameSequence {
    let base: Vec<u8> = (0..w * h).map(|_| rng.range(0, 255) as u8).collect();
    let spread = rng.range(0, 60) as i64;
    let out = (0..frames)
        .map(|_| {
            let data = base
                .iter()
                .map(|&p| {
                    let d = rng.range(0, 2 * spread as u64) as i64 - spread;
                    (p as i64 + d).clamp(0, 255) as u8
                })
                .collect();
            Frame::new(w, h, data).unwrap()
        })
        .collect();
    FrameSequence::new(out).unwrap()
}

pub fn testdata(name: &str) -> std::path::PathBuf {
    std::path::Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("../../testdata")
        .join(name)
}
