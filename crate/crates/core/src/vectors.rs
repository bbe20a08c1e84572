//! Stimulus/expected files for an HDL testbench.
//!
//! One vector per line, five whitespace-separated hexadecimal fields:
//!
//! ```text
//! x_raw w_raw degree result_raw z
//! ```
//!
//! Raw fields are zero-padded to their port width in nibbles and written as two's complement
//! for signed formats. Blank lines and lines starting with `#` are ignored on input.

use std::fmt::Write as _;

use rand::Rng;

use crate::divider::{Divider, DividerConfig};
use crate::error::{Error, Result};
use crate::fixed::{FixedPoint, QFormat, Rounding};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TestVector {
    pub x: FixedPoint,
    pub w: FixedPoint,
    pub degree: u32,
    pub result: FixedPoint,
    pub z: i32,
}

fn nibbles(fmt: QFormat) -> usize {
    fmt.width().div_ceil(4) as usize
}

fn encode(v: &FixedPoint) -> String {
    let fmt = v.format();
    let mask = if fmt.width() == 64 { u64::MAX } else { (1u64 << fmt.width()) - 1 };
    format!("{:0width$x}", (v.raw() as u64) & mask, width = nibbles(fmt))
}

fn decode(field: &str, fmt: QFormat) -> Result<FixedPoint> {
    let bits =
        u64::from_str_radix(field, 16).map_err(|e| Error::Parse(format!("bad hex field {field:?}: {e}")))?;
    let w = fmt.width();
    if w < 64 && bits >> w != 0 {
        return Err(Error::Parse(format!("{field} is wider than {fmt}")));
    }
    let raw = if fmt.is_signed() && w < 64 && bits >> (w - 1) & 1 == 1 {
        (bits | !((1u64 << w) - 1)) as i64
    } else {
        bits as i64
    };
    FixedPoint::from_raw(raw, fmt)
}

impl TestVector {
    pub fn to_line(&self) -> String {
        format!(
            "{} {} {:x} {} {:02x}",
            encode(&self.x),
            encode(&self.w),
            self.degree,
            encode(&self.result),
            self.z
        )
    }

    pub fn parse_line(line: &str, cfg: &DividerConfig) -> Result<Self> {
        let f: Vec<&str> = line.split_whitespace().collect();
        if f.len() != 5 {
            return Err(Error::Parse(format!("expected 5 fields, got {}: {line:?}", f.len())));
        }
        let degree =
            u32::from_str_radix(f[2], 16).map_err(|e| Error::Parse(format!("bad degree {:?}: {e}", f[2])))?;
        let z = i32::from_str_radix(f[4], 16).map_err(|e| Error::Parse(format!("bad z {:?}: {e}", f[4])))?;
        Ok(TestVector {
            x: decode(f[0], cfg.x_format)?,
            w: decode(f[1], cfg.w_format)?,
            degree,
            result: decode(f[3], cfg.out_format)?,
            z,
        })
    }
}

/// Evaluates every `(w, x)` pair.
pub fn generate(divider: &Divider, inputs: &[(FixedPoint, FixedPoint)]) -> Result<Vec<TestVector>> {
    inputs
        .iter()
        .map(|(w, x)| {
            let (result, trace) = divider.divide(w, x)?;
            Ok(TestVector { x: *x, w: *w, degree: divider.config().degree, result, z: trace.z })
        })
        .collect()
}

/// Every `x >= 1` of the input format with a fixed dividend.
pub fn exhaustive_inputs(cfg: &DividerConfig, w: FixedPoint) -> Result<Vec<(FixedPoint, FixedPoint)>> {
    let one = FixedPoint::quantize(1.0, cfg.x_format, Rounding::NearestEven)?.raw();
    let max = cfg.x_format.max_raw();
    if max - one > 1 << 24 {
        return Err(Error::Config(format!("{} has too many values to enumerate", cfg.x_format)));
    }
    (one..=max).map(|r| Ok((w, FixedPoint::from_raw(r, cfg.x_format)?))).collect()
}

/// Uniform random `x >= 1` and `w` with `w / x` comfortably inside the output range.
pub fn random_inputs<R: Rng>(
    cfg: &DividerConfig,
    count: usize,
    rng: &mut R,
) -> Result<Vec<(FixedPoint, FixedPoint)>> {
    let one = FixedPoint::quantize(1.0, cfg.x_format, Rounding::NearestEven)?.raw();
    let xmax = cfg.x_format.max_raw();
    // the correction may overshoot 1/x by ~2e-3 relative
    let headroom = cfg.out_format.max_value() / 1.01;
    (0..count)
        .map(|_| {
            let x = FixedPoint::from_raw(rng.gen_range(one..=xmax), cfg.x_format)?;
            let wmax = (x.to_f64() * headroom).min(cfg.w_format.max_value());
            let wmax_raw = FixedPoint::quantize(wmax, cfg.w_format, Rounding::Truncate)?.raw();
            let w = FixedPoint::from_raw(rng.gen_range(0..=wmax_raw), cfg.w_format)?;
            Ok((w, x))
        })
        .collect()
}

pub fn write_vectors(vectors: &[TestVector]) -> String {
    vectors.iter().fold(String::new(), |mut s, v| {
        let _ = writeln!(s, "{}", v.to_line());
        s
    })
}

pub fn parse_vectors(text: &str, cfg: &DividerConfig) -> Result<Vec<TestVector>> {
    text.lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
        .map(|l| TestVector::parse_line(l, cfg))
        .collect()
}

/// Re-evaluates each vector and reports the first mismatch.
pub fn check(divider: &Divider, vectors: &[TestVector]) -> Result<()> {
    for (i, v) in vectors.iter().enumerate() {
        let (r, t) = divider.divide(&v.w, &v.x)?;
        if r != v.result || t.z != v.z || v.degree != divider.config().degree {
            return Err(Error::Numerical(format!(
                "vector {i}: expected {} got {} {} {}",
                v.to_line(),
                encode(&r),
                divider.config().degree,
                t.z
            )));
        }
    }
    Ok(())
}
