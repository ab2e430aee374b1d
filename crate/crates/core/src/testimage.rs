//! Deterministic synthetic scene for experiments without a reference image.

use crate::frame::Frame;

/// Piecewise-smooth scene: a diagonal ramp, a bright disk, a dark bar and a
/// fine stripe patch, with values kept inside `[16, 240]`.
pub fn synthetic_scene(width: usize, height: usize) -> Frame {
    let (w, h) = (width as f64, height as f64);
    Frame::from_fn(width, height, |x, y| {
        let (u, v) = (x as f64 / w, y as f64 / h);
        let mut val = 60.0 + 100.0 * (0.6 * u + 0.4 * v);
        let (dx, dy) = (u - 0.35, v - 0.4);
        if dx * dx + dy * dy < 0.04 {
            val = 220.0 - 40.0 * ((dx * dx + dy * dy) / 0.04);
        }
        if (0.65..0.8).contains(&u) && (0.15..0.85).contains(&v) {
            val = 30.0;
        }
        if (0.1..0.3).contains(&u) && (0.7..0.9).contains(&v) {
            val = if (x / 3) % 2 == 0 { 200.0 } else { 90.0 };
        }
        val.clamp(16.0, 240.0).round() as u8
    })
    .expect("positive dimensions")
}
