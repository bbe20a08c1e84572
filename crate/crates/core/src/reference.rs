//! Real-valued (double precision) forms of the reciprocal approximation.
//!
//! Everything here is a pure function. `z` is always `floor(log2(x))` of the `x` in the same
//! expression, and the linearization constant is 3 except in [`linear_approx`].

use crate::error::{Error, Result};

/// Linearization constant the correction function is derived for.
pub const LINEARIZATION_C: f64 = 3.0;

/// Exact `2^e` for any exponent in the normal or subnormal range.
pub(crate) fn exp2i(e: i32) -> f64 {
    if e > 1023 {
        f64::INFINITY
    } else if e >= -1022 {
        f64::from_bits(((e + 1023) as u64) << 52)
    } else if e >= -1074 {
        f64::from_bits(1u64 << (e + 1074))
    } else {
        0.0
    }
}

/// `floor(log2(x))` by exponent extraction; exact for every finite positive double.
pub fn floor_log2(x: f64) -> Result<i32> {
    if !(x.is_finite() && x > 0.0) {
        return Err(Error::Domain(format!("floor_log2 needs a finite x > 0, got {x}")));
    }
    let bits = x.to_bits();
    let biased = ((bits >> 52) & 0x7ff) as i32;
    if biased == 0 {
        // subnormal: position of the leading mantissa bit
        let mant = bits & ((1u64 << 52) - 1);
        Ok(63 - mant.leading_zeros() as i32 - 1074)
    } else {
        Ok(biased - 1023)
    }
}

/// Piecewise-linear reciprocal `(c - x 2^-z) 2^-(z+1)`.
pub fn linear_approx(x: f64, c: f64) -> Result<f64> {
    let z = floor_log2(x)?;
    Ok((c - x * exp2i(-z)) * exp2i(-(z + 1)))
}

/// Intra-octave position `a = x 2^-z - 1`, in `[0, 1)`.
pub fn fractional_position(x: f64) -> Result<f64> {
    let z = floor_log2(x)?;
    Ok(x * exp2i(-z) - 1.0)
}

/// Exact correction `gamma(a) = 2 / (3(1+a) - (1+a)^2)` on the fit interval `[0, 1]`.
pub fn correction_exact(a: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&a) {
        return Err(Error::Domain(format!("correction is defined on [0, 1], got a = {a}")));
    }
    // 3(1+a) - (1+a)^2 = (1+a)(2-a); both factors are exact for a in [0, 1]
    Ok(2.0 / ((1.0 + a) * (2.0 - a)))
}

/// Anything that can act as the correction factor in [`corrected_reciprocal`].
pub trait Correction {
    fn correction(&self, a: f64) -> Result<f64>;
}

/// The exact correction function; composing it with `y_l` recovers `1/x`.
#[derive(Debug, Clone, Copy, Default)]
pub struct ExactCorrection;

impl Correction for ExactCorrection {
    fn correction(&self, a: f64) -> Result<f64> {
        correction_exact(a)
    }
}

/// Unquantized model of the full method: `p(a) * y_l(x, 3)`.
pub fn corrected_reciprocal(x: f64, correction: &impl Correction) -> Result<f64> {
    let a = fractional_position(x)?;
    let yl = linear_approx(x, LINEARIZATION_C)?;
    Ok(correction.correction(a)? * yl)
}
