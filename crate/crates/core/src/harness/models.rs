use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::divider::{Divider, DividerConfig};
use crate::error::{Error, Result};
use crate::fixed::{FixedPoint, Rounding};
use crate::polyfit::{table_polynomial, CorrectionPolynomial};
use crate::reference::{corrected_reciprocal, ExactCorrection};

/// `1/x` in double precision rounded to the nearest multiple of `2^-16`.
pub fn optimal_16bit(x: f64) -> Result<f64> {
    if !(x.is_finite() && x >= 1.0) {
        return Err(Error::Domain(format!("optimal 16-bit reference needs x >= 1, got {x}")));
    }
    Ok((65536.0 / x).round_ties_even() / 65536.0)
}

/// A reciprocal approximation that can be swept.
pub trait ReciprocalModel: Send + Sync {
    fn name(&self) -> String;

    fn degree(&self) -> Option<u32> {
        None
    }

    /// Smallest admissible input.
    fn min_x(&self) -> f64 {
        f64::MIN_POSITIVE
    }

    /// The input the model actually sees for grid point `x`.
    fn input(&self, x: f64) -> Result<f64> {
        Ok(x)
    }

    fn eval(&self, x: f64) -> Result<f64>;
}

pub struct RealPolyModel {
    poly: CorrectionPolynomial,
}

impl RealPolyModel {
    pub fn new(poly: CorrectionPolynomial) -> Self {
        RealPolyModel { poly }
    }
}

impl ReciprocalModel for RealPolyModel {
    fn name(&self) -> String {
        format!("real-poly-d{}", self.poly.degree())
    }

    fn degree(&self) -> Option<u32> {
        Some(self.poly.degree())
    }

    fn eval(&self, x: f64) -> Result<f64> {
        corrected_reciprocal(x, &self.poly)
    }
}

pub struct ExactModel;

impl ReciprocalModel for ExactModel {
    fn name(&self) -> String {
        "exact".into()
    }

    fn eval(&self, x: f64) -> Result<f64> {
        corrected_reciprocal(x, &ExactCorrection)
    }
}

/// The bit-exact divider with an exact 1.0 as dividend. Grid points are truncated onto the
/// `x` input format.
pub struct FixedPointModel {
    divider: Divider,
    one: FixedPoint,
}

impl FixedPointModel {
    pub fn new(cfg: DividerConfig) -> Result<Self> {
        let divider = Divider::new(cfg)?;
        let one = FixedPoint::quantize(1.0, cfg.w_format, Rounding::NearestEven)?;
        Ok(FixedPointModel { divider, one })
    }
}

impl ReciprocalModel for FixedPointModel {
    fn name(&self) -> String {
        format!("fixed-d{}", self.divider.config().degree)
    }

    fn degree(&self) -> Option<u32> {
        Some(self.divider.config().degree)
    }

    fn min_x(&self) -> f64 {
        1.0
    }

    fn input(&self, x: f64) -> Result<f64> {
        Ok(FixedPoint::quantize(x, self.divider.config().x_format, Rounding::Truncate)?.to_f64())
    }

    fn eval(&self, x: f64) -> Result<f64> {
        let xq = FixedPoint::quantize(x, self.divider.config().x_format, Rounding::Truncate)?;
        Ok(self.divider.divide(&self.one, &xq)?.0.to_f64())
    }
}

pub struct Optimal16Model;

impl ReciprocalModel for Optimal16Model {
    fn name(&self) -> String {
        "optimal16".into()
    }

    fn min_x(&self) -> f64 {
        1.0
    }

    fn eval(&self, x: f64) -> Result<f64> {
        optimal_16bit(x)
    }
}

/// Parameters any model factory may draw on.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    /// Table polynomial degree for `real-poly`.
    pub degree: u32,
    /// Overrides the table polynomial for `real-poly`.
    pub polynomial: Option<CorrectionPolynomial>,
    /// Widths and architecture for `fixed`.
    pub divider: DividerConfig,
}

impl Default for ModelParams {
    fn default() -> Self {
        ModelParams { degree: 2, polynomial: None, divider: DividerConfig::new(2) }
    }
}

pub type ModelFactory = fn(&ModelParams) -> Result<Box<dyn ReciprocalModel>>;

/// Name-keyed table of sweepable models.
#[derive(Clone, Default)]
pub struct ModelRegistry {
    entries: BTreeMap<String, ModelFactory>,
}

impl ModelRegistry {
    pub fn builtin() -> Self {
        let mut r = ModelRegistry::default();
        r.register("real-poly", |p| {
            let poly = match &p.polynomial {
                Some(poly) => poly.clone(),
                None => table_polynomial(p.degree)?,
            };
            Ok(Box::new(RealPolyModel::new(poly)))
        });
        r.register("exact", |_| Ok(Box::new(ExactModel)));
        r.register("fixed", |p| Ok(Box::new(FixedPointModel::new(p.divider)?)));
        r.register("optimal16", |_| Ok(Box::new(Optimal16Model)));
        r
    }

    pub fn register(&mut self, name: impl Into<String>, factory: ModelFactory) {
        self.entries.insert(name.into(), factory);
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.entries.keys().map(String::as_str)
    }

    pub fn build(&self, name: &str, params: &ModelParams) -> Result<Box<dyn ReciprocalModel>> {
        let f = self.entries.get(name).ok_or_else(|| {
            Error::Config(format!(
                "unknown model {name:?}; known: {}",
                self.names().collect::<Vec<_>>().join(", ")
            ))
        })?;
        f(params)
    }
}

impl fmt::Debug for ModelRegistry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.entries.keys()).finish()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn optimal_examples() {
        assert_eq!(optimal_16bit(2.0).unwrap(), 0.5);
        assert_eq!(optimal_16bit(3.0).unwrap(), 21845.0 / 65536.0);
        assert_eq!(optimal_16bit(32768.0).unwrap(), 2.0 / 65536.0);
        assert!(matches!(optimal_16bit(0.5), Err(Error::Domain(_))));
    }

    #[test]
    fn registry_names() {
        let r = ModelRegistry::builtin();
        assert_eq!(r.names().collect::<Vec<_>>(), ["exact", "fixed", "optimal16", "real-poly"]);
        assert!(matches!(r.build("nope", &ModelParams::default()), Err(Error::Config(_))));
        let m =
            r.build("fixed", &ModelParams { divider: DividerConfig::new(4), ..Default::default() }).unwrap();
        assert_eq!(m.name(), "fixed-d4");
        assert_eq!(m.degree(), Some(4));
    }

    #[test]
    fn custom_polynomial() {
        let r = ModelRegistry::builtin();
        let p = ModelParams { polynomial: Some(table_polynomial(6).unwrap()), ..Default::default() };
        assert_eq!(r.build("real-poly", &p).unwrap().degree(), Some(6));
    }
}
