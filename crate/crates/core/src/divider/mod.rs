//! Bit-exact combinational model of the single-pass divider.
//!
//! Both architectures share the same frame:
//!
//! ```text
//! x --priority encoder--> z
//! x --shift by z--------> m in [1, 2) --[correction stage]--> corr
//!                         m ---(3 - m)-----------------------> y_l'
//! w --shift by z + 1----> w'
//! result = round((corr * y_l') * w')
//! ```
//!
//! Every multiplier keeps `internal_frac_bits` fractional bits by truncation; only the final
//! product is rounded to nearest into `out_format`. Pipeline registers are not modeled.

mod deg2;
mod deg4;
mod stage;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fixed::{FixedPoint, QFormat, Rounding};

pub use deg2::QuadraticStage;
pub use deg4::QuarticStage;
pub use stage::{CorrectionStage, StageFactory, StageOutput, StageRegistry};

/// Operand and internal bit widths plus the architecture (by polynomial degree).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct DividerConfig {
    pub degree: u32,
    pub x_format: QFormat,
    pub w_format: QFormat,
    pub internal_frac_bits: u32,
    pub out_format: QFormat,
}

impl DividerConfig {
    /// Averaging scenario: `x` a 16-bit integer count, `w` a Q16.16 sum, 17 internal fractional
    /// bits, a Q1.16 fractional result.
    pub fn new(degree: u32) -> Self {
        DividerConfig {
            degree,
            x_format: QFormat::unsigned(16, 0).expect("static format"),
            w_format: QFormat::unsigned(16, 16).expect("static format"),
            internal_frac_bits: 17,
            out_format: QFormat::unsigned(1, 16).expect("static format"),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let f = self.internal_frac_bits;
        if f == 0 {
            return Err(Error::Config("internal_frac_bits must be positive".into()));
        }
        if f < self.out_format.frac_bits() {
            return Err(Error::Config(format!(
                "internal_frac_bits ({f}) is narrower than the output's {} fractional bits",
                self.out_format.frac_bits()
            )));
        }
        // widest internal signal is Q3.F; the shifted dividend keeps w's integer bits
        if f + 3 > 60 || self.w_format.int_bits() + f + self.w_format.is_signed() as u32 > 62 {
            return Err(Error::Config(format!("internal_frac_bits ({f}) too wide for 64-bit wires")));
        }
        Ok(())
    }

    fn internal(&self, int_bits: u32) -> QFormat {
        QFormat::unsigned(int_bits, self.internal_frac_bits).expect("validated width")
    }
}

impl Default for DividerConfig {
    fn default() -> Self {
        Self::new(2)
    }
}

/// Every named wire of one evaluation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DividerTrace {
    pub degree: u32,
    /// Leading-one position of `x`.
    pub z: i32,
    /// `x 2^-z`, in `[1, 2)`.
    pub m: FixedPoint,
    /// Polynomial argument as wired: `m - 1.5` (degree 2) or `m - 1` (degree 4).
    pub a_signal: FixedPoint,
    pub correction: FixedPoint,
    /// Linear factor before the octave shift, `3 - m = y_l(x, 3) 2^(z+1)`; the `2^-(z+1)` is
    /// applied to the dividend instead.
    pub y_l: FixedPoint,
    /// `correction * y_l`.
    pub corrected: FixedPoint,
    /// `w 2^-(z+1)`.
    pub w_shifted: FixedPoint,
    pub result: FixedPoint,
    /// Quantized constants used by the correction stage.
    pub constants: Vec<(String, FixedPoint)>,
}

/// A configured divider: widths plus the correction stage for the chosen degree.
#[derive(Debug)]
pub struct Divider {
    cfg: DividerConfig,
    stage: Box<dyn CorrectionStage>,
    three: FixedPoint,
}

impl Divider {
    pub fn new(cfg: DividerConfig) -> Result<Self> {
        Self::with_registry(cfg, &StageRegistry::builtin())
    }

    pub fn with_registry(cfg: DividerConfig, registry: &StageRegistry) -> Result<Self> {
        cfg.validate()?;
        let stage = registry.build_degree(cfg.degree, cfg.internal_frac_bits)?;
        Self::from_stage(cfg, stage)
    }

    /// Uses an explicit stage; `cfg.degree` is overwritten with the stage's degree.
    pub fn from_stage(mut cfg: DividerConfig, stage: Box<dyn CorrectionStage>) -> Result<Self> {
        cfg.validate()?;
        cfg.degree = stage.degree();
        let three = FixedPoint::quantize(3.0, cfg.internal(2), Rounding::NearestEven)?;
        Ok(Divider { cfg, stage, three })
    }

    pub fn config(&self) -> &DividerConfig {
        &self.cfg
    }

    pub fn stage(&self) -> &dyn CorrectionStage {
        self.stage.as_ref()
    }

    /// Splits `x >= 1` into `m = x 2^-z` in `Q1.F` and `z`.
    pub fn normalize(&self, x: &FixedPoint) -> Result<(FixedPoint, i32)> {
        if x.format() != self.cfg.x_format {
            return Err(Error::Usage(format!(
                "x is {} but the divider expects {}",
                x.format(),
                self.cfg.x_format
            )));
        }
        let z = x.leading_one()?;
        if z < 0 {
            return Err(Error::Domain(format!("divider needs x >= 1, got {}", x.to_f64())));
        }
        let m = x.scaled(z, self.cfg.internal(1))?;
        Ok((m, z))
    }

    /// `w / x` with the full wire trace.
    pub fn divide(&self, w: &FixedPoint, x: &FixedPoint) -> Result<(FixedPoint, DividerTrace)> {
        if w.format() != self.cfg.w_format {
            return Err(Error::Usage(format!(
                "w is {} but the divider expects {}",
                w.format(),
                self.cfg.w_format
            )));
        }
        let (m, z) = self.normalize(x)?;
        let StageOutput { a_signal, correction } = self.stage.correct(m)?;
        let y_l = self.three.sub(&m)?;
        let corrected = correction.mul(&y_l, self.cfg.internal(2))?;

        let wf = self.cfg.w_format;
        let w_fmt = QFormat::new(wf.int_bits(), self.cfg.internal_frac_bits, wf.is_signed())?;
        let w_shifted = w.scaled(z + 1, w_fmt)?;

        let result = corrected.mul_round(&w_shifted, self.cfg.out_format).map_err(|e| match e {
            Error::Range(_) => Error::Range(format!(
                "w / x = {} / {} does not fit {}",
                w.to_f64(),
                x.to_f64(),
                self.cfg.out_format
            )),
            other => other,
        })?;
        let trace = DividerTrace {
            degree: self.stage.degree(),
            z,
            m,
            a_signal,
            correction,
            y_l,
            corrected,
            w_shifted,
            result,
            constants: self.stage.constants().into_iter().map(|(n, v)| (n.to_string(), v)).collect(),
        };
        Ok((result, trace))
    }

    /// `1 / x`: the dividend is an exact 1.0 in `w_format`.
    pub fn reciprocal(&self, x: &FixedPoint) -> Result<FixedPoint> {
        let one = FixedPoint::quantize(1.0, self.cfg.w_format, Rounding::NearestEven)?;
        Ok(self.divide(&one, x)?.0)
    }

    /// Real-valued evaluation of the same wire diagram without any quantization.
    pub fn ideal(&self, w: f64, x: f64) -> Result<f64> {
        let z = crate::reference::floor_log2(x)?;
        let m = x * crate::reference::exp2i(-z);
        let corr = self.stage.ideal_correction(m - 1.0);
        Ok(corr * (3.0 - m) * (w * crate::reference::exp2i(-(z + 1))))
    }
}

/// Degree-2 architecture regardless of `cfg.degree`.
pub fn divide_deg2(
    w: &FixedPoint,
    x: &FixedPoint,
    cfg: &DividerConfig,
) -> Result<(FixedPoint, DividerTrace)> {
    Divider::new(DividerConfig { degree: 2, ..*cfg })?.divide(w, x)
}

/// Degree-4 architecture regardless of `cfg.degree`.
pub fn divide_deg4(
    w: &FixedPoint,
    x: &FixedPoint,
    cfg: &DividerConfig,
) -> Result<(FixedPoint, DividerTrace)> {
    Divider::new(DividerConfig { degree: 4, ..*cfg })?.divide(w, x)
}

pub fn reciprocal(x: &FixedPoint, cfg: &DividerConfig) -> Result<FixedPoint> {
    Divider::new(*cfg)?.reciprocal(x)
}
