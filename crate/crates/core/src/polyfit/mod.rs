//! Correction polynomials: the published table, the least-squares regeneration on Chebyshev
//! nodes, Horner evaluation and the factored forms used by the hardware datapaths.

mod factor;
mod fit;
mod table;

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::reference::{correction_exact, Correction};

pub use factor::{
    factor_degree2, FactoredDeg2, FactoredDeg4, FACTOR_TOLERANCE, QUARTIC_FACTORS, QUARTIC_FACTORS_ROUNDED,
};
pub use fit::{chebyshev_nodes, fit_correction, FitSpec, DEFAULT_THETA_STEP};
pub use table::{descending_row, table_polynomial};

/// Degrees with a published polynomial.
pub const SUPPORTED_DEGREES: [u32; 8] = [2, 4, 6, 8, 10, 12, 14, 16];

/// Where a coefficient vector came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Provenance {
    Fitted,
    Table,
    /// Built by hand or by expanding a factored form.
    Derived,
}

/// `p_d(a) = sum_j c_j a^j` with coefficients stored lowest power first.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "PolynomialFile", into = "PolynomialFile")]
pub struct CorrectionPolynomial {
    degree: u32,
    coeffs: Vec<f64>,
    provenance: Provenance,
}

/// On-disk JSON layout.
#[derive(Debug, Clone, Serialize, Deserialize)]
struct PolynomialFile {
    degree: u32,
    coeffs_ascending: Vec<f64>,
    provenance: Provenance,
}

impl CorrectionPolynomial {
    pub fn new(coeffs_ascending: Vec<f64>, provenance: Provenance) -> Result<Self> {
        let degree = coeffs_ascending.len().saturating_sub(1) as u32;
        if !SUPPORTED_DEGREES.contains(&degree) {
            return Err(Error::Config(format!(
                "correction polynomials have degree 2, 4, ..., 16; got {} coefficients",
                coeffs_ascending.len()
            )));
        }
        if coeffs_ascending.iter().any(|c| !c.is_finite()) {
            return Err(Error::Numerical("non-finite coefficient".into()));
        }
        if matches!(provenance, Provenance::Fitted | Provenance::Table) {
            let c0 = coeffs_ascending[0];
            if !(c0 > 0.99 && c0 <= 1.0) {
                return Err(Error::Numerical(format!(
                    "constant term {c0} outside (0.99, 1]; the correction is 1 at a = 0"
                )));
            }
        }
        Ok(CorrectionPolynomial { degree, coeffs: coeffs_ascending, provenance })
    }

    /// Builds from a highest-power-first row.
    pub fn from_descending(row: &[f64], provenance: Provenance) -> Result<Self> {
        Self::new(row.iter().rev().copied().collect(), provenance)
    }

    pub fn degree(&self) -> u32 {
        self.degree
    }

    /// Coefficients, `c_0` first.
    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn provenance(&self) -> Provenance {
        self.provenance
    }

    /// Horner evaluation.
    pub fn eval(&self, a: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, &c| acc * a + c)
    }

    /// Largest `|self(a) - other(a)|` over `points` uniformly spaced samples of `[0, 1]`.
    pub fn max_deviation(&self, other: &CorrectionPolynomial, points: usize) -> f64 {
        unit_grid(points).map(|a| (self.eval(a) - other.eval(a)).abs()).fold(0.0, f64::max)
    }

    /// Largest `|gamma(a) - p(a)|` over `points` uniformly spaced samples of `[0, 1]`.
    pub fn max_error_vs_exact(&self, points: usize) -> f64 {
        unit_grid(points)
            .map(|a| (correction_exact(a).expect("grid inside [0,1]") - self.eval(a)).abs())
            .fold(0.0, f64::max)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_json()? + "\n")?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }
}

impl Correction for CorrectionPolynomial {
    fn correction(&self, a: f64) -> Result<f64> {
        Ok(self.eval(a))
    }
}

impl TryFrom<PolynomialFile> for CorrectionPolynomial {
    type Error = Error;

    fn try_from(f: PolynomialFile) -> Result<Self> {
        if f.coeffs_ascending.len() != f.degree as usize + 1 {
            return Err(Error::Parse(format!(
                "degree {} needs {} coefficients, file has {}",
                f.degree,
                f.degree + 1,
                f.coeffs_ascending.len()
            )));
        }
        CorrectionPolynomial::new(f.coeffs_ascending, f.provenance)
    }
}

impl From<CorrectionPolynomial> for PolynomialFile {
    fn from(p: CorrectionPolynomial) -> Self {
        PolynomialFile { degree: p.degree, coeffs_ascending: p.coeffs, provenance: p.provenance }
    }
}

/// `points` samples `k / (points - 1)`, both ends included.
pub fn unit_grid(points: usize) -> impl Iterator<Item = f64> {
    let n = points.max(2);
    (0..n).map(move |k| k as f64 / (n - 1) as f64)
}
