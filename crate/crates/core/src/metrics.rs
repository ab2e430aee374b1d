//! MSE, PSNR and image enhancement factor on 8-bit frames.
//!
//! Squared errors are summed in `u64`, so results do not depend on summation
//! order. Infinite values (zero error) serialize as the string `"inf"`.

use serde::{Serialize, Serializer};
use thiserror::Error;

use crate::frame::Frame;

pub const PEAK: f64 = 255.0;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("frame dimensions differ: {a:?} vs {b:?}")]
pub struct DimensionMismatch {
    pub a: (usize, usize),
    pub b: (usize, usize),
}

fn check(a: &Frame, b: &Frame) -> Result<(), DimensionMismatch> {
    if a.dims() == b.dims() {
        Ok(())
    } else {
        Err(DimensionMismatch {
            a: a.dims(),
            b: b.dims(),
        })
    }
}

pub fn sum_squared_error(a: &Frame, b: &Frame) -> Result<u64, DimensionMismatch> {
    check(a, b)?;
    Ok(a.pixels()
        .iter()
        .zip(b.pixels())
        .map(|(&x, &y)| {
            let d = x.abs_diff(y) as u64;
            d * d
        })
        .sum())
}

pub fn mse(a: &Frame, b: &Frame) -> Result<f64, DimensionMismatch> {
    Ok(sum_squared_error(a, b)? as f64 / a.pixel_count() as f64)
}

/// `10·log10(255² / mse)`; `+inf` for identical frames.
pub fn psnr(a: &Frame, b: &Frame) -> Result<f64, DimensionMismatch> {
    Ok(psnr_from_mse(mse(a, b)?))
}

pub fn psnr_from_mse(mse: f64) -> f64 {
    if mse == 0.0 {
        f64::INFINITY
    } else {
        10.0 * (PEAK * PEAK / mse).log10()
    }
}

/// `Σ(noisy-clean)² / Σ(denoised-clean)²`; `+inf` when `denoised == clean`.
pub fn ief(clean: &Frame, noisy: &Frame, denoised: &Frame) -> Result<f64, DimensionMismatch> {
    let num = sum_squared_error(noisy, clean)?;
    let den = sum_squared_error(denoised, clean)?;
    Ok(if den == 0 {
        f64::INFINITY
    } else {
        num as f64 / den as f64
    })
}

/// Writes non-finite values as `"inf"`, `"-inf"` or `"nan"`.
pub fn serialize_metric<S: Serializer>(v: &f64, s: S) -> Result<S::Ok, S::Error> {
    if v.is_finite() {
        s.serialize_f64(*v)
    } else {
        s.serialize_str(&format_metric(*v))
    }
}

/// Shortest round-trip decimal, with `inf` for infinity.
pub fn format_metric(v: f64) -> String {
    if v.is_nan() {
        "nan".into()
    } else if v == f64::INFINITY {
        "inf".into()
    } else if v == f64::NEG_INFINITY {
        "-inf".into()
    } else {
        format!("{v}")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MetricReport {
    /// clean vs noisy
    #[serde(serialize_with = "serialize_metric")]
    pub mse1: f64,
    /// noisy vs denoised
    #[serde(serialize_with = "serialize_metric")]
    pub mse2: f64,
    #[serde(serialize_with = "serialize_metric")]
    pub psnr1: f64,
    #[serde(serialize_with = "serialize_metric")]
    pub psnr2: f64,
    #[serde(serialize_with = "serialize_metric")]
    pub ief: f64,
    /// clean vs denoised, the usual quality figure
    #[serde(serialize_with = "serialize_metric")]
    pub psnr_clean_denoised: f64,
}

pub fn metric_report(
    clean: &Frame,
    noisy: &Frame,
    denoised: &Frame,
) -> Result<MetricReport, DimensionMismatch> {
    let mse1 = mse(clean, noisy)?;
    let mse2 = mse(noisy, denoised)?;
    Ok(MetricReport {
        mse1,
        mse2,
        psnr1: psnr_from_mse(mse1),
        psnr2: psnr_from_mse(mse2),
        ief: ief(clean, noisy, denoised)?,
        psnr_clean_denoised: psnr(clean, denoised)?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn f(w: usize, px: &[u8]) -> Frame {
        Frame::new(w, px.len() / w, px.to_vec()).unwrap()
    }

    #[test]
    fn mse_examples() {
        let a = f(2, &[0, 10]);
        assert_eq!(mse(&a, &a).unwrap(), 0.0);
        assert_eq!(mse(&a, &f(2, &[1, 11])).unwrap(), 1.0);
        assert_eq!(mse(&a, &f(2, &[3, 14])).unwrap(), 12.5);
        assert!(mse(&a, &f(1, &[0, 10])).is_err());
    }

    #[test]
    fn psnr_examples() {
        let black = Frame::filled(3, 3, 0).unwrap();
        let white = Frame::filled(3, 3, 255).unwrap();
        assert_eq!(psnr(&black, &black).unwrap(), f64::INFINITY);
        assert_eq!(psnr(&black, &white).unwrap(), 0.0);
        assert!((psnr_from_mse(650.25) - 20.0).abs() < 1e-12);
    }

    #[test]
    fn ief_examples() {
        let clean = f(2, &[10, 20, 30, 40]);
        let noisy = f(2, &[12, 17, 30, 45]);
        assert_eq!(ief(&clean, &noisy, &noisy).unwrap(), 1.0);
        assert_eq!(ief(&clean, &noisy, &clean).unwrap(), f64::INFINITY);
        let better = f(2, &[11, 19, 30, 41]);
        // (4 + 9 + 25) / (1 + 1 + 1)
        assert!((ief(&clean, &noisy, &better).unwrap() - 38.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn report_degenerate_cases() {
        let a = f(2, &[1, 2, 3, 4]);
        let r = metric_report(&a, &a, &a).unwrap();
        assert_eq!((r.mse1, r.mse2), (0.0, 0.0));
        assert!(r.psnr1.is_infinite() && r.psnr2.is_infinite() && r.ief.is_infinite());

        let n = f(2, &[2, 2, 3, 4]);
        let r = metric_report(&a, &n, &n).unwrap();
        assert_eq!(r.ief, 1.0);
        assert_eq!(r.mse2, 0.0);
        assert!(r.psnr2.is_infinite());
        assert_eq!(r.mse1, 0.25);
    }

    #[test]
    fn infinity_serializes_as_string() {
        let a = f(1, &[5]);
        let json = serde_json::to_string(&metric_report(&a, &a, &a).unwrap()).unwrap();
        assert!(json.contains("\"psnr1\":\"inf\""), "{json}");
        assert!(json.contains("\"mse1\":0.0"), "{json}");
        assert_eq!(format_metric(1.5), "1.5");
    }

    proptest! {
        #[test]
        fn symmetric(a in proptest::collection::vec(any::<u8>(), 12), b in proptest::collection::vec(any::<u8>(), 12)) {
            let (fa, fb) = (f(3, &a), f(3, &b));
            prop_assert_eq!(mse(&fa, &fb).unwrap(), mse(&fb, &fa).unwrap());
            prop_assert_eq!(psnr(&fa, &fb).unwrap(), psnr(&fb, &fa).unwrap());
        }

        #[test]
        fn psnr_strictly_decreasing(m1 in 1e-3f64..1e5, m2 in 1e-3f64..1e5) {
            prop_assume!(m1 < m2);
            prop_assert!(psnr_from_mse(m1) > psnr_from_mse(m2));
        }

        #[test]
        fn ief_of_untouched_noisy_is_one(a in proptest::collection::vec(any::<u8>(), 8), b in proptest::collection::vec(any::<u8>(), 8)) {
            prop_assume!(a != b);
            let (c, n) = (f(4, &a), f(4, &b));
            prop_assert_eq!(ief(&c, &n, &n).unwrap(), 1.0);
        }
    }
}
