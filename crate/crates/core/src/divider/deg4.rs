//! Degree-4 architecture: `s (q1c - 2.5a + a^2)(q2c + 0.5a + a^2)` with `a = m - 1`.
//!
//! The rounded linear terms cost no multiplier: `0.5a` is one right shift and `2.5a` is
//! `(a << 1) + (a >> 1)`.

use super::stage::{CorrectionStage, StageOutput};
use crate::error::{Error, Result};
use crate::fixed::{FixedPoint, QFormat, Rounding};
use crate::polyfit::{FactoredDeg4, QUARTIC_FACTORS_ROUNDED};

#[derive(Debug, Clone)]
pub struct QuarticStage {
    factors: FactoredDeg4,
    scale: FixedPoint,
    q1_const: FixedPoint,
    q2_const: FixedPoint,
    one: FixedPoint,
    frac: QFormat,
    wide: QFormat,
    product: QFormat,
    corr: QFormat,
}

impl QuarticStage {
    pub fn new(frac_bits: u32) -> Result<Self> {
        let factors = QUARTIC_FACTORS_ROUNDED;
        let frac = QFormat::unsigned(0, frac_bits)?;
        let wide = QFormat::unsigned(2, frac_bits)?;
        let q = |v: f64, f: QFormat| FixedPoint::quantize(v, f, Rounding::NearestEven);
        Ok(QuarticStage {
            factors,
            scale: q(factors.scale, frac)?,
            q1_const: q(factors.q1_const, wide)?,
            q2_const: q(factors.q2_const, wide)?,
            one: q(1.0, QFormat::unsigned(1, frac_bits)?)?,
            frac,
            wide,
            product: QFormat::unsigned(3, frac_bits)?,
            corr: QFormat::unsigned(1, frac_bits)?,
        })
    }

    pub fn boxed(frac_bits: u32) -> Result<Box<dyn CorrectionStage>> {
        Ok(Box::new(Self::new(frac_bits)?))
    }
}

impl CorrectionStage for QuarticStage {
    fn name(&self) -> &'static str {
        "deg4"
    }

    fn degree(&self) -> u32 {
        4
    }

    fn correct(&self, m: FixedPoint) -> Result<StageOutput> {
        let a = m.sub_as(&self.one, self.frac)?;
        let a2 = a.mul(&a, self.frac)?;
        let half_a = a.shift(1)?;
        let a_wide = a.requantize(self.wide, Rounding::Truncate)?;
        let two_and_half_a = a_wide.shift(-1)?.add(&half_a)?;

        let q1 = self
            .q1_const
            .sub(&two_and_half_a)
            .map_err(|e| Error::Range(format!("q1 went negative: {e}")))?
            .add(&a2)?;
        let q2 = self.q2_const.add(&half_a)?.add(&a2)?;
        let p = q1.mul(&q2, self.product)?;
        let correction = self.scale.mul(&p, self.corr)?;
        Ok(StageOutput { a_signal: a, correction })
    }

    fn constants(&self) -> Vec<(&'static str, FixedPoint)> {
        vec![
            ("scale", self.scale),
            ("q1_const", self.q1_const),
            ("q2_const", self.q2_const),
            ("one", self.one),
        ]
    }

    fn ideal_correction(&self, a: f64) -> f64 {
        self.factors.eval(a)
    }
}
