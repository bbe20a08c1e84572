//! Error sweeps: evaluate a reciprocal model over a grid of `x` and compare it with a
//! reference.
//!
//! Models are looked up by name in a [`ModelRegistry`]. The built-in ones are `real-poly` (the
//! unquantized corrected approximation with a table polynomial), `exact` (exact correction),
//! `fixed` (the bit-exact divider with `w = 1`) and `optimal16` (`1/x` rounded to 16 fractional
//! bits).

mod models;

use std::io::Write;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::divider::DividerConfig;
use crate::error::{Error, Result};
use crate::reference::{exp2i, floor_log2};

pub use models::{
    optimal_16bit, ExactModel, FixedPointModel, ModelFactory, ModelParams, ModelRegistry, Optimal16Model,
    RealPolyModel, ReciprocalModel,
};

/// Default grid density.
pub const DEFAULT_POINTS_PER_OCTAVE: u32 = 4096;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Grid {
    /// `x_start + k * step`.
    Step(f64),
    /// `2^z (1 + k / n)` for every octave touching the range.
    PerOctave(u32),
}

/// What the `exact` column holds.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Reference {
    /// Double-precision `1/x`.
    Exact,
    /// `1/x` rounded to the nearest multiple of `2^-16`.
    Optimal16,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepSpec {
    pub x_start: f64,
    pub x_end: f64,
    /// Drop `x_start` itself, for half-open ranges such as `(1, 256]`.
    pub start_exclusive: bool,
    pub grid: Grid,
    /// Registered model name.
    pub model: String,
    pub params: ModelParams,
    pub reference: Reference,
}

impl SweepSpec {
    pub fn new(model: &str, params: ModelParams, x_start: f64, x_end: f64) -> Self {
        SweepSpec {
            x_start,
            x_end,
            start_exclusive: false,
            grid: Grid::PerOctave(DEFAULT_POINTS_PER_OCTAVE),
            model: model.to_string(),
            params,
            reference: Reference::Exact,
        }
    }

    pub fn real_poly(degree: u32, x_start: f64, x_end: f64) -> Self {
        Self::new("real-poly", ModelParams { degree, ..ModelParams::default() }, x_start, x_end)
    }

    pub fn fixed(config: DividerConfig, x_start: f64, x_end: f64) -> Self {
        Self::new(
            "fixed",
            ModelParams { degree: config.degree, divider: config, ..ModelParams::default() },
            x_start,
            x_end,
        )
    }

    pub fn with_grid(mut self, grid: Grid) -> Self {
        self.grid = grid;
        self
    }

    pub fn exclusive_start(mut self) -> Self {
        self.start_exclusive = true;
        self
    }

    pub fn with_reference(mut self, reference: Reference) -> Self {
        self.reference = reference;
        self
    }

    fn validate(&self) -> Result<()> {
        if !(self.x_start.is_finite() && self.x_start > 0.0) || !self.x_end.is_finite() {
            return Err(Error::Config(format!(
                "sweep range must be positive and finite, got [{}, {}]",
                self.x_start, self.x_end
            )));
        }
        if self.x_end < self.x_start {
            return Err(Error::Config(format!("empty sweep range [{}, {}]", self.x_start, self.x_end)));
        }
        match self.grid {
            Grid::Step(s) if !(s.is_finite() && s > 0.0) => {
                Err(Error::Config(format!("sweep step must be positive, got {s}")))
            }
            Grid::PerOctave(0) => Err(Error::Config("points per octave must be positive".into())),
            _ => Ok(()),
        }
    }

    /// Grid points in increasing order, before any model-specific input quantization.
    pub fn points(&self) -> Result<Vec<f64>> {
        self.validate()?;
        let mut pts = match self.grid {
            Grid::Step(step) => {
                let n = ((self.x_end - self.x_start) / step * (1.0 + 4.0 * f64::EPSILON)).floor();
                if n > 5e8 {
                    return Err(Error::Config(format!("sweep grid too large ({n} points)")));
                }
                (0..=n as u64).map(|k| self.x_start + k as f64 * step).collect::<Vec<_>>()
            }
            Grid::PerOctave(n) => {
                let z0 = floor_log2(self.x_start)?;
                let z1 = floor_log2(self.x_end)?;
                if (z1 - z0 + 1) as f64 * n as f64 > 5e8 {
                    return Err(Error::Config("sweep grid too large".into()));
                }
                let mut v = Vec::new();
                for z in z0..=z1 {
                    let base = exp2i(z);
                    for k in 0..n {
                        let x = base * (1.0 + k as f64 / n as f64);
                        if x >= self.x_start && x <= self.x_end {
                            v.push(x);
                        }
                    }
                }
                if v.last() != Some(&self.x_end) {
                    v.push(self.x_end);
                }
                v
            }
        };
        if self.start_exclusive {
            pts.retain(|&x| x > self.x_start);
        }
        if pts.is_empty() {
            return Err(Error::Config("sweep grid is empty".into()));
        }
        Ok(pts)
    }
}

/// One compared point. `rel_err = x * abs_err`, the error relative to `1/x`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ErrorRow {
    pub x: f64,
    pub approx: f64,
    pub exact: f64,
    pub abs_err: f64,
    pub rel_err: f64,
}

impl ErrorRow {
    pub fn new(x: f64, approx: f64, exact: f64) -> Self {
        let abs_err = (exact - approx).abs();
        ErrorRow { x, approx, exact, abs_err, rel_err: x * abs_err }
    }
}

fn reference_value(reference: Reference, x: f64) -> Result<f64> {
    match reference {
        Reference::Exact => Ok(1.0 / x),
        Reference::Optimal16 => optimal_16bit(x),
    }
}

/// Runs a sweep with the built-in models.
pub fn sweep(spec: &SweepSpec) -> Result<Vec<ErrorRow>> {
    sweep_with(spec, &ModelRegistry::builtin())
}

/// Runs a sweep; rows come back sorted by `x` whatever the thread schedule.
pub fn sweep_with(spec: &SweepSpec, registry: &ModelRegistry) -> Result<Vec<ErrorRow>> {
    let model = registry.build(&spec.model, &spec.params)?;
    if model.min_x() > spec.x_start {
        return Err(Error::Config(format!(
            "model {} needs x >= {}, sweep starts at {}",
            model.name(),
            model.min_x(),
            spec.x_start
        )));
    }
    let mut inputs = spec.points()?.into_iter().map(|x| model.input(x)).collect::<Result<Vec<_>>>()?;
    if spec.start_exclusive {
        inputs.retain(|&x| x > spec.x_start);
    }
    inputs.dedup();
    let reference = spec.reference;
    inputs.par_iter().map(|&x| Ok(ErrorRow::new(x, model.eval(x)?, reference_value(reference, x)?))).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub max_abs: f64,
    pub argmax_abs: f64,
    pub max_rel: f64,
    pub argmax_rel: f64,
}

/// Scan maxima; the first row wins ties.
pub fn summarize(rows: &[ErrorRow]) -> Result<Summary> {
    let first = rows.first().ok_or_else(|| Error::Usage("cannot summarize an empty sweep".into()))?;
    let mut s =
        Summary { max_abs: first.abs_err, argmax_abs: first.x, max_rel: first.rel_err, argmax_rel: first.x };
    for r in &rows[1..] {
        if r.abs_err > s.max_abs {
            s.max_abs = r.abs_err;
            s.argmax_abs = r.x;
        }
        if r.rel_err > s.max_rel {
            s.max_rel = r.rel_err;
            s.argmax_rel = r.x;
        }
    }
    Ok(s)
}

/// Maximum of `metric` within each octave `[2^z, 2^(z+1))`, as `(z, max)` in increasing `z`.
pub fn octave_maxima(rows: &[ErrorRow], metric: impl Fn(&ErrorRow) -> f64) -> Result<Vec<(i32, f64)>> {
    let mut out: Vec<(i32, f64)> = Vec::new();
    for r in rows {
        let z = floor_log2(r.x)?;
        let v = metric(r);
        match out.last_mut() {
            Some((lz, m)) if *lz == z => *m = m.max(v),
            _ => out.push((z, v)),
        }
    }
    Ok(out)
}

/// JSON summary record.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SummaryReport {
    pub model: String,
    pub degree: Option<u32>,
    pub range: [f64; 2],
    pub max_abs: f64,
    pub argmax_abs: f64,
    pub max_rel: f64,
    pub argmax_rel: f64,
}

impl SummaryReport {
    pub fn new(spec: &SweepSpec, registry: &ModelRegistry, summary: &Summary) -> Result<Self> {
        let model = registry.build(&spec.model, &spec.params)?;
        Ok(SummaryReport {
            model: spec.model.clone(),
            degree: model.degree(),
            range: [spec.x_start, spec.x_end],
            max_abs: summary.max_abs,
            argmax_abs: summary.argmax_abs,
            max_rel: summary.max_rel,
            argmax_rel: summary.argmax_rel,
        })
    }
}

pub const CSV_HEADER: [&str; 5] = ["x", "approx", "exact", "abs_err", "rel_err"];

/// 17 significant digits, enough to round-trip any double.
fn fmt17(v: f64) -> String {
    format!("{v:.16e}")
}

/// Writes `x,approx,exact,abs_err,rel_err` rows.
pub fn write_csv<W: Write>(rows: &[ErrorRow], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(CSV_HEADER)?;
    for r in rows {
        w.write_record([fmt17(r.x), fmt17(r.approx), fmt17(r.exact), fmt17(r.abs_err), fmt17(r.rel_err)])?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_csv<R: std::io::Read>(input: R) -> Result<Vec<ErrorRow>> {
    let mut rd = csv::Reader::from_reader(input);
    let header = rd.headers()?.clone();
    if header.iter().ne(CSV_HEADER) {
        return Err(Error::Parse(format!("unexpected CSV header {header:?}")));
    }
    rd.records()
        .map(|rec| {
            let rec = rec?;
            let f = |i: usize| -> Result<f64> {
                rec[i].parse().map_err(|e| Error::Parse(format!("bad number {:?}: {e}", &rec[i])))
            };
            Ok(ErrorRow { x: f(0)?, approx: f(1)?, exact: f(2)?, abs_err: f(3)?, rel_err: f(4)? })
        })
        .collect()
}
