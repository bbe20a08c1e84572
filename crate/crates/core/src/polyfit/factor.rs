//! Factored forms that map the degree-2 and degree-4 polynomials onto cheap hardware.

use super::{CorrectionPolynomial, Provenance};
use crate::error::{Error, Result};

/// Largest `|c_1 + c_2|` for which a quadratic is treated as `c_2 (a - 1/2)^2 + C'`.
pub const FACTOR_TOLERANCE: f64 = 1e-6;

/// `c2 * (a - 0.5)^2 + c_prime`, valid when `c_1 = -c_2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FactoredDeg2 {
    pub c2: f64,
    pub c_prime: f64,
}

impl FactoredDeg2 {
    pub fn eval(&self, a: f64) -> f64 {
        let s = a - 0.5;
        self.c2 * s * s + self.c_prime
    }
}

/// Rewrites a quadratic whose linear and quadratic coefficients nearly cancel.
pub fn factor_degree2(poly: &CorrectionPolynomial) -> Result<FactoredDeg2> {
    if poly.degree() != 2 {
        return Err(Error::Factoring(format!("expected a quadratic, got degree {}", poly.degree())));
    }
    let c = poly.coeffs();
    if (c[1] + c[2]).abs() > FACTOR_TOLERANCE {
        return Err(Error::Factoring(format!(
            "c1 = {} and c2 = {} do not cancel (|c1 + c2| > {FACTOR_TOLERANCE})",
            c[1], c[2]
        )));
    }
    Ok(FactoredDeg2 { c2: c[2], c_prime: c[0] - 0.25 * c[2] })
}

/// `scale * (q1_const + q1_lin a + a^2) * (q2_const + q2_lin a + a^2)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FactoredDeg4 {
    pub scale: f64,
    pub q1_const: f64,
    pub q1_lin: f64,
    pub q2_const: f64,
    pub q2_lin: f64,
}

/// Published factorization of the degree-4 table polynomial.
pub const QUARTIC_FACTORS: FactoredDeg4 = FactoredDeg4 {
    scale: 0.209150199411479,
    q1_const: 3.0616168632399,
    q1_lin: -2.500018461800448,
    q2_const: 1.561598389171924,
    q2_lin: 0.5000184489913662,
};

/// Same, with the linear terms rounded so they cost only shifts and one add.
pub const QUARTIC_FACTORS_ROUNDED: FactoredDeg4 =
    FactoredDeg4 { q1_lin: -2.5, q2_lin: 0.5, ..QUARTIC_FACTORS };

impl FactoredDeg4 {
    pub fn eval(&self, a: f64) -> f64 {
        let a2 = a * a;
        let q1 = self.q1_const + self.q1_lin * a + a2;
        let q2 = self.q2_const + self.q2_lin * a + a2;
        self.scale * q1 * q2
    }

    /// Multiplies the factors out into ascending coefficients.
    pub fn expand(&self) -> Result<CorrectionPolynomial> {
        let q1 = [self.q1_const, self.q1_lin, 1.0];
        let q2 = [self.q2_const, self.q2_lin, 1.0];
        let mut c = vec![0.0; 5];
        for (i, x) in q1.iter().enumerate() {
            for (j, y) in q2.iter().enumerate() {
                c[i + j] += x * y;
            }
        }
        for v in &mut c {
            *v *= self.scale;
        }
        CorrectionPolynomial::new(c, Provenance::Derived)
    }
}
