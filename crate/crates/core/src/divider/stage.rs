//! Correction stages: the part of the datapath that differs between architectures.
//!
//! Each architecture turns the normalized input `m = x 2^-z` (in `[1, 2)`) into a correction
//! factor. Stages are registered by name and by degree so a [`super::Divider`] can be assembled
//! from a config at runtime.

use std::collections::BTreeMap;
use std::fmt;

use crate::error::{Error, Result};
use crate::fixed::FixedPoint;

/// Wires produced by a correction stage.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct StageOutput {
    /// The polynomial argument as it appears on the wire: `m - 1.5` for the degree-2 stage,
    /// `m - 1` for the degree-4 stage.
    pub a_signal: FixedPoint,
    pub correction: FixedPoint,
}

pub trait CorrectionStage: Send + Sync + fmt::Debug {
    fn name(&self) -> &'static str;

    fn degree(&self) -> u32;

    /// Correction factor for the normalized input `m` (format `Q1.F`).
    fn correct(&self, m: FixedPoint) -> Result<StageOutput>;

    /// Constants after quantization, in datapath order.
    fn constants(&self) -> Vec<(&'static str, FixedPoint)>;

    /// The stage's formula on reals with unquantized constants, as a function of `a = m - 1`.
    fn ideal_correction(&self, a: f64) -> f64;
}

/// Builds a stage for a given number of internal fractional bits.
pub type StageFactory = fn(frac_bits: u32) -> Result<Box<dyn CorrectionStage>>;

#[derive(Clone)]
struct Entry {
    degree: u32,
    factory: StageFactory,
}

/// Name-keyed table of correction stages.
#[derive(Clone, Default)]
pub struct StageRegistry {
    entries: BTreeMap<String, Entry>,
}

impl StageRegistry {
    pub fn empty() -> Self {
        Self::default()
    }

    /// The two published architectures, `deg2` and `deg4`.
    pub fn builtin() -> Self {
        let mut r = Self::empty();
        r.register("deg2", 2, super::deg2::QuadraticStage::boxed);
        r.register("deg4", 4, super::deg4::QuarticStage::boxed);
        r
    }

    pub fn register(&mut self, name: impl Into<String>, degree: u32, factory: StageFactory) {
        self.entries.insert(name.into(), Entry { degree, factory });
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.entries.keys().map(String::as_str)
    }

    pub fn degrees(&self) -> Vec<u32> {
        let mut d: Vec<u32> = self.entries.values().map(|e| e.degree).collect();
        d.sort_unstable();
        d.dedup();
        d
    }

    pub fn build(&self, name: &str, frac_bits: u32) -> Result<Box<dyn CorrectionStage>> {
        let e = self.entries.get(name).ok_or_else(|| {
            Error::Config(format!(
                "unknown architecture {name:?}; known: {}",
                self.names().collect::<Vec<_>>().join(", ")
            ))
        })?;
        (e.factory)(frac_bits)
    }

    /// First registered stage (in name order) implementing `degree`.
    pub fn build_degree(&self, degree: u32, frac_bits: u32) -> Result<Box<dyn CorrectionStage>> {
        let e = self.entries.values().find(|e| e.degree == degree).ok_or_else(|| {
            Error::Config(format!(
                "no hardware architecture for degree {degree}; available degrees: {:?}",
                self.degrees()
            ))
        })?;
        (e.factory)(frac_bits)
    }
}

impl fmt::Debug for StageRegistry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_map().entries(self.entries.iter().map(|(k, v)| (k, v.degree))).finish()
    }
}
