//! Degree-2 architecture: `c2 (m - 1.5)^2 + C'`.

use super::stage::{CorrectionStage, StageOutput};
use crate::error::Result;
use crate::fixed::{FixedPoint, QFormat, Rounding};
use crate::polyfit::{factor_degree2, table_polynomial, FactoredDeg2};

#[derive(Debug, Clone)]
pub struct QuadraticStage {
    factored: FactoredDeg2,
    c2: FixedPoint,
    c_prime: FixedPoint,
    one_and_half: FixedPoint,
    frac: QFormat,
    signed_frac: QFormat,
    corr: QFormat,
}

impl QuadraticStage {
    pub fn new(frac_bits: u32) -> Result<Self> {
        let factored = factor_degree2(&table_polynomial(2)?)?;
        let frac = QFormat::unsigned(0, frac_bits)?;
        Ok(QuadraticStage {
            factored,
            c2: FixedPoint::quantize(factored.c2, frac, Rounding::NearestEven)?,
            c_prime: FixedPoint::quantize(factored.c_prime, frac, Rounding::NearestEven)?,
            one_and_half: FixedPoint::quantize(1.5, QFormat::unsigned(1, frac_bits)?, Rounding::NearestEven)?,
            frac,
            signed_frac: QFormat::signed(0, frac_bits)?,
            corr: QFormat::unsigned(1, frac_bits)?,
        })
    }

    pub fn boxed(frac_bits: u32) -> Result<Box<dyn CorrectionStage>> {
        Ok(Box::new(Self::new(frac_bits)?))
    }
}

impl CorrectionStage for QuadraticStage {
    fn name(&self) -> &'static str {
        "deg2"
    }

    fn degree(&self) -> u32 {
        2
    }

    fn correct(&self, m: FixedPoint) -> Result<StageOutput> {
        // a - 0.5 folded into one subtraction: (m - 1) - 0.5
        let s = m.sub_as(&self.one_and_half, self.signed_frac)?;
        let s2 = s.mul(&s, self.frac)?;
        let scaled = self.c2.mul(&s2, self.frac)?;
        let correction = scaled.add_as(&self.c_prime, self.corr)?;
        Ok(StageOutput { a_signal: s, correction })
    }

    fn constants(&self) -> Vec<(&'static str, FixedPoint)> {
        vec![("c2", self.c2), ("c_prime", self.c_prime), ("one_and_half", self.one_and_half)]
    }

    fn ideal_correction(&self, a: f64) -> f64 {
        self.factored.eval(a)
    }
}
