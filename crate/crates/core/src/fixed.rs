//! Parametric binary fixed point with hardware truncation semantics.
//!
//! A value is a raw integer plus a [`QFormat`]; its real value is `raw * 2^-frac_bits`.
//! Datapath operations never touch floating point and never saturate: anything that does not fit
//! its destination format is a [`Error::Range`].

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::reference::exp2i;

/// Fixed-point layout. `Q16.0` is unsigned with 16 integer bits, `SQ1.17` is signed with one
/// integer bit, 17 fractional bits and a sign bit on top.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(into = "String", try_from = "String")]
pub struct QFormat {
    int_bits: u32,
    frac_bits: u32,
    signed: bool,
}

impl QFormat {
    /// Raw values are held in an `i64`, so signed formats may use all 64 bits and unsigned
    /// formats 63.
    pub fn new(int_bits: u32, frac_bits: u32, signed: bool) -> Result<Self> {
        let width = int_bits as u64 + frac_bits as u64 + signed as u64;
        if width == 0 || width > 64 || (!signed && width > 63) {
            return Err(Error::Config(format!(
                "format with {int_bits} integer and {frac_bits} fractional bits ({}) does not fit 64-bit raw storage",
                if signed { "signed" } else { "unsigned" }
            )));
        }
        Ok(QFormat { int_bits, frac_bits, signed })
    }

    pub fn unsigned(int_bits: u32, frac_bits: u32) -> Result<Self> {
        Self::new(int_bits, frac_bits, false)
    }

    pub fn signed(int_bits: u32, frac_bits: u32) -> Result<Self> {
        Self::new(int_bits, frac_bits, true)
    }

    pub fn int_bits(&self) -> u32 {
        self.int_bits
    }

    pub fn frac_bits(&self) -> u32 {
        self.frac_bits
    }

    pub fn is_signed(&self) -> bool {
        self.signed
    }

    /// Total number of wires, sign bit included.
    pub fn width(&self) -> u32 {
        self.int_bits + self.frac_bits + self.signed as u32
    }

    /// Weight of one LSB.
    pub fn step(&self) -> f64 {
        exp2i(-(self.frac_bits as i32))
    }

    pub fn min_raw(&self) -> i64 {
        if self.signed {
            let mag = self.int_bits + self.frac_bits;
            if mag == 63 {
                i64::MIN
            } else {
                -(1i64 << mag)
            }
        } else {
            0
        }
    }

    pub fn max_raw(&self) -> i64 {
        let mag = self.int_bits + self.frac_bits;
        if mag == 63 {
            i64::MAX
        } else {
            (1i64 << mag) - 1
        }
    }

    pub fn min_value(&self) -> f64 {
        self.min_raw() as f64 * self.step()
    }

    pub fn max_value(&self) -> f64 {
        self.max_raw() as f64 * self.step()
    }

    pub fn contains_raw(&self, raw: i128) -> bool {
        raw >= self.min_raw() as i128 && raw <= self.max_raw() as i128
    }

    fn check(&self, raw: i128, what: &str) -> Result<i64> {
        if self.contains_raw(raw) {
            Ok(raw as i64)
        } else {
            Err(Error::Range(format!("{what}: raw value {raw} does not fit {self}")))
        }
    }
}

impl fmt::Display for QFormat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let prefix = if self.signed { "SQ" } else { "Q" };
        write!(f, "{prefix}{}.{}", self.int_bits, self.frac_bits)
    }
}

impl FromStr for QFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Parse(format!("expected a format like Q16.0 or SQ1.17, got {s:?}"));
        let t = s.trim();
        let (signed, rest) = if let Some(r) = t.strip_prefix("SQ").or_else(|| t.strip_prefix("sQ")) {
            (true, r)
        } else if let Some(r) = t.strip_prefix('Q').or_else(|| t.strip_prefix("UQ")) {
            (false, r)
        } else {
            return Err(bad());
        };
        let (i, f) = rest.split_once('.').ok_or_else(bad)?;
        let int_bits = i.parse().map_err(|_| bad())?;
        let frac_bits = f.parse().map_err(|_| bad())?;
        QFormat::new(int_bits, frac_bits, signed)
    }
}

impl From<QFormat> for String {
    fn from(q: QFormat) -> String {
        q.to_string()
    }
}

impl TryFrom<String> for QFormat {
    type Error = Error;

    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Rounding {
    /// Floor, i.e. dropping wires.
    Truncate,
    /// Round half to even; used for compile-time constants.
    NearestEven,
}

/// `floor(raw * 2^-shift)` for `shift >= 0`, `raw * 2^-shift` otherwise. `None` on i128 overflow.
pub(crate) fn shift_floor(raw: i128, shift: i32) -> Option<i128> {
    if shift >= 0 {
        Some(if shift >= 127 {
            if raw < 0 {
                -1
            } else {
                0
            }
        } else {
            raw >> shift
        })
    } else {
        let k = (-shift) as u32;
        if k >= 127 {
            return if raw == 0 { Some(0) } else { None };
        }
        let v = raw.checked_mul(1i128 << k)?;
        Some(v)
    }
}

/// Round `raw * 2^-shift` to nearest, ties upward (add half an LSB, then drop wires).
pub(crate) fn shift_round_half_up(raw: i128, shift: i32) -> Option<i128> {
    if shift <= 0 {
        return shift_floor(raw, shift);
    }
    if shift >= 128 {
        // |raw * 2^-shift| < 1/2
        return Some(0);
    }
    raw.checked_add(1i128 << (shift - 1)).map(|v| v >> shift)
}

/// A quantized signal: raw integer plus its format.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct FixedPoint {
    raw: i64,
    format: QFormat,
}

impl FixedPoint {
    pub fn from_raw(raw: i64, format: QFormat) -> Result<Self> {
        let raw = format.check(raw as i128, "from_raw")?;
        Ok(FixedPoint { raw, format })
    }

    pub fn zero(format: QFormat) -> Self {
        FixedPoint { raw: 0, format }
    }

    /// Quantizes a real value. Exactly representable values round-trip exactly.
    pub fn quantize(v: f64, format: QFormat, mode: Rounding) -> Result<Self> {
        if !v.is_finite() {
            return Err(Error::Range(format!("cannot quantize non-finite value {v}")));
        }
        let scaled = v * exp2i(format.frac_bits as i32);
        let r = match mode {
            Rounding::Truncate => scaled.floor(),
            Rounding::NearestEven => scaled.round_ties_even(),
        };
        // 2^63 bounds every legal raw; anything beyond is out of range anyway
        if r.abs() >= 9.3e18 {
            return Err(Error::Range(format!("{v} does not fit {format}")));
        }
        let raw = format.check(r as i128, &format!("quantize {v}"))?;
        Ok(FixedPoint { raw, format })
    }

    pub fn raw(&self) -> i64 {
        self.raw
    }

    pub fn format(&self) -> QFormat {
        self.format
    }

    pub fn to_f64(&self) -> f64 {
        self.raw as f64 * self.format.step()
    }

    pub fn is_positive(&self) -> bool {
        self.raw > 0
    }

    /// Full-precision product truncated to `out`.
    pub fn mul(&self, other: &FixedPoint, out: QFormat) -> Result<FixedPoint> {
        let prod = self.raw as i128 * other.raw as i128;
        let shift = (self.format.frac_bits + other.format.frac_bits) as i32 - out.frac_bits as i32;
        let raw = shift_floor(prod, shift).ok_or_else(|| Error::Range("product overflows".into()))?;
        Ok(FixedPoint { raw: out.check(raw, "mul")?, format: out })
    }

    /// Full-precision product rounded to nearest (ties up) in `out`.
    pub fn mul_round(&self, other: &FixedPoint, out: QFormat) -> Result<FixedPoint> {
        let prod = self.raw as i128 * other.raw as i128;
        let shift = (self.format.frac_bits + other.format.frac_bits) as i32 - out.frac_bits as i32;
        let raw = shift_round_half_up(prod, shift).ok_or_else(|| Error::Range("product overflows".into()))?;
        Ok(FixedPoint { raw: out.check(raw, "mul_round")?, format: out })
    }

    fn aligned(&self, other: &FixedPoint, op: &str) -> Result<()> {
        if self.format.frac_bits != other.format.frac_bits {
            return Err(Error::Usage(format!(
                "{op} needs aligned binary points, got {} and {}",
                self.format, other.format
            )));
        }
        Ok(())
    }

    /// Exact sum in `self`'s format.
    pub fn add(&self, other: &FixedPoint) -> Result<FixedPoint> {
        self.add_as(other, self.format)
    }

    /// Exact difference in `self`'s format.
    pub fn sub(&self, other: &FixedPoint) -> Result<FixedPoint> {
        self.sub_as(other, self.format)
    }

    /// Exact sum placed in `out`, which must share the binary point.
    pub fn add_as(&self, other: &FixedPoint, out: QFormat) -> Result<FixedPoint> {
        self.aligned(other, "add")?;
        if out.frac_bits != self.format.frac_bits {
            return Err(Error::Usage(format!("add output {out} is not aligned with {}", self.format)));
        }
        let raw = out.check(self.raw as i128 + other.raw as i128, "add")?;
        Ok(FixedPoint { raw, format: out })
    }

    pub fn sub_as(&self, other: &FixedPoint, out: QFormat) -> Result<FixedPoint> {
        self.aligned(other, "sub")?;
        if out.frac_bits != self.format.frac_bits {
            return Err(Error::Usage(format!("sub output {out} is not aligned with {}", self.format)));
        }
        let raw = out.check(self.raw as i128 - other.raw as i128, "sub")?;
        Ok(FixedPoint { raw, format: out })
    }

    /// Shifts the raw value by `k` (right for `k > 0`, flooring; left for `k < 0`), keeping
    /// the format.
    pub fn shift(&self, k: i32) -> Result<FixedPoint> {
        let raw = shift_floor(self.raw as i128, k)
            .ok_or_else(|| Error::Range(format!("left shift by {} overflows", -k)))?;
        Ok(FixedPoint { raw: self.format.check(raw, "shift")?, format: self.format })
    }

    /// `floor(self * 2^-k)` expressed in `out`; a shift and a re-wiring in one step.
    pub fn scaled(&self, k: i32, out: QFormat) -> Result<FixedPoint> {
        let shift = k + self.format.frac_bits as i32 - out.frac_bits as i32;
        let raw =
            shift_floor(self.raw as i128, shift).ok_or_else(|| Error::Range("scaling overflows".into()))?;
        Ok(FixedPoint { raw: out.check(raw, "scaled")?, format: out })
    }

    /// Re-expresses the value in `out` with the given rounding.
    pub fn requantize(&self, out: QFormat, mode: Rounding) -> Result<FixedPoint> {
        let shift = self.format.frac_bits as i32 - out.frac_bits as i32;
        let raw = match mode {
            Rounding::Truncate => shift_floor(self.raw as i128, shift),
            Rounding::NearestEven => {
                if shift <= 0 {
                    shift_floor(self.raw as i128, shift)
                } else {
                    let v = self.raw as i128;
                    let q = v >> shift;
                    let rem = v - (q << shift);
                    let half = 1i128 << (shift - 1);
                    Some(if rem > half || (rem == half && q & 1 == 1) { q + 1 } else { q })
                }
            }
        }
        .ok_or_else(|| Error::Range("requantize overflows".into()))?;
        Ok(FixedPoint { raw: out.check(raw, "requantize")?, format: out })
    }

    /// Position of the most significant set bit relative to the binary point (priority encoder).
    pub fn leading_one(&self) -> Result<i32> {
        if self.raw <= 0 {
            return Err(Error::Domain(format!("leading_one needs x > 0, got {}", self.to_f64())));
        }
        Ok(63 - self.raw.leading_zeros() as i32 - self.format.frac_bits as i32)
    }
}

impl fmt::Display for FixedPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} ({} raw {:#x})", self.to_f64(), self.format, self.raw)
    }
}

/// Parses `<raw>:<format>`, the raw part decimal or `0x`-prefixed hexadecimal (e.g. `0x6:Q16.0`).
impl FromStr for FixedPoint {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (raw, fmt) =
            s.split_once(':').ok_or_else(|| Error::Parse(format!("expected <raw>:<format>, got {s:?}")))?;
        let format: QFormat = fmt.parse()?;
        let raw = parse_int(raw)?;
        FixedPoint::from_raw(raw, format)
    }
}

/// Decimal or `0x` hexadecimal integer, optionally negative.
pub fn parse_int(s: &str) -> Result<i64> {
    let t = s.trim();
    let (neg, body) = match t.strip_prefix('-') {
        Some(b) => (true, b),
        None => (false, t),
    };
    let v = if let Some(h) = body.strip_prefix("0x").or_else(|| body.strip_prefix("0X")) {
        i64::from_str_radix(h, 16)
    } else {
        body.parse::<i64>()
    }
    .map_err(|e| Error::Parse(format!("bad integer {s:?}: {e}")))?;
    Ok(if neg { -v } else { v })
}
