//! Least-squares regeneration of the correction polynomials.
//!
//! The correction function is sampled at `a = (cos(theta) + 1) / 2` for an equally spaced
//! `theta` grid over `[-pi, 0]`, which clusters samples at both ends of `[0, 1]`. The fit is
//! solved with Householder QR on the monomial design matrix; the normal equations square the
//! condition number and lose most digits past degree 10.

use std::f64::consts::PI;

use super::{CorrectionPolynomial, Provenance, SUPPORTED_DEGREES};
use crate::error::{Error, Result};
use crate::reference::correction_exact;

pub const DEFAULT_THETA_STEP: f64 = 1e-5;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FitSpec {
    pub degree: u32,
    pub theta_step: f64,
    pub theta_start: f64,
    pub theta_end: f64,
}

impl FitSpec {
    /// The full grid `theta = -pi, -pi + 1e-5, ...` up to 0.
    pub fn new(degree: u32) -> Self {
        FitSpec { degree, theta_step: DEFAULT_THETA_STEP, theta_start: -PI, theta_end: 0.0 }
    }

    pub fn with_step(mut self, step: f64) -> Self {
        self.theta_step = step;
        self
    }

    /// Grid size. Like a `start:step:end` range, the grid stops at the last
    /// `theta_start + k * step` that does not pass `theta_end`; the end point is only included
    /// when it falls on the grid.
    pub fn node_count(&self) -> Result<usize> {
        if !(self.theta_step.is_finite() && self.theta_step > 0.0) {
            return Err(Error::Config(format!("theta step must be positive, got {}", self.theta_step)));
        }
        if !self.theta_start.is_finite() || !self.theta_end.is_finite() {
            return Err(Error::Config("theta range must be finite".into()));
        }
        if self.theta_end < self.theta_start {
            return Err(Error::Config(format!(
                "empty theta grid: [{}, {}]",
                self.theta_start, self.theta_end
            )));
        }
        let span = (self.theta_end - self.theta_start) / self.theta_step;
        // absorb representation error so that e.g. pi / (pi/2) lands on 2
        let n = (span * (1.0 + 4.0 * f64::EPSILON)).floor();
        if n > 1e9 {
            return Err(Error::Config(format!("theta grid too large ({n} nodes)")));
        }
        Ok(n as usize + 1)
    }

    pub fn validate(&self) -> Result<usize> {
        if !SUPPORTED_DEGREES.contains(&self.degree) {
            return Err(Error::Config(format!(
                "fit degree must be one of 2, 4, ..., 16, got {}",
                self.degree
            )));
        }
        let n = self.node_count()?;
        if n < self.degree as usize + 1 {
            return Err(Error::Config(format!(
                "{n} nodes cannot determine a degree-{} polynomial",
                self.degree
            )));
        }
        Ok(n)
    }
}

/// Sample positions `a_k = (cos(theta_k) + 1) / 2` in `[0, 1]`.
pub fn chebyshev_nodes(spec: &FitSpec) -> Result<Vec<f64>> {
    let n = spec.node_count()?;
    Ok((0..n)
        .map(|k| {
            let theta = (spec.theta_start + k as f64 * spec.theta_step).min(spec.theta_end);
            ((theta.cos() + 1.0) / 2.0).clamp(0.0, 1.0)
        })
        .collect())
}

/// Least-squares polynomial of `spec.degree` through the correction function at the
/// Chebyshev-distributed samples.
pub fn fit_correction(spec: &FitSpec) -> Result<CorrectionPolynomial> {
    spec.validate()?;
    let nodes = chebyshev_nodes(spec)?;
    let targets = nodes.iter().map(|&a| correction_exact(a)).collect::<Result<Vec<_>>>()?;
    let coeffs = least_squares_monomial(&nodes, &targets, spec.degree as usize)?;
    CorrectionPolynomial::new(coeffs, Provenance::Fitted)
}

/// Minimizes `sum_k (sum_j c_j x_k^j - y_k)^2` and returns `c` lowest power first.
///
/// Householder QR, one column at a time, summing in index order so the result is
/// bitwise reproducible.
pub(crate) fn least_squares_monomial(x: &[f64], y: &[f64], degree: usize) -> Result<Vec<f64>> {
    let m = x.len();
    let n = degree + 1;
    if m < n || y.len() != m {
        return Err(Error::Numerical(format!("{m} samples for {n} unknowns")));
    }

    // column-major Vandermonde
    let mut cols: Vec<Vec<f64>> = Vec::with_capacity(n);
    let mut pow = vec![1.0; m];
    for j in 0..n {
        if j > 0 {
            for (p, &xi) in pow.iter_mut().zip(x) {
                *p *= xi;
            }
        }
        cols.push(pow.clone());
    }
    let mut rhs = y.to_vec();
    let col_scale = cols.iter().map(|c| norm2(c)).fold(0.0, f64::max);

    let mut diag = vec![0.0; n];
    for j in 0..n {
        let (head, tail) = cols.split_at_mut(j + 1);
        let v = &mut head[j][j..];
        let alpha = norm2(v);
        if !(alpha.is_finite() && alpha > col_scale * 4.0 * f64::EPSILON) {
            return Err(Error::Numerical(format!("design matrix is rank deficient at column {j}")));
        }
        let r_jj = if v[0] > 0.0 { -alpha } else { alpha };
        v[0] -= r_jj;
        // v^T v = 2 alpha (alpha + |v0|) after the update
        let vtv = dot(v, v);
        for c in tail.iter_mut() {
            reflect(v, vtv, &mut c[j..]);
        }
        reflect(v, vtv, &mut rhs[j..]);
        diag[j] = r_jj;
    }

    // back substitution on R c = Q^T y
    let mut c = vec![0.0; n];
    for i in (0..n).rev() {
        let mut s = rhs[i];
        for k in i + 1..n {
            s -= cols[k][i] * c[k];
        }
        c[i] = s / diag[i];
    }
    if c.iter().any(|v| !v.is_finite()) {
        return Err(Error::Numerical("least-squares solution is not finite".into()));
    }
    Ok(c)
}

fn reflect(v: &[f64], vtv: f64, target: &mut [f64]) {
    let s = 2.0 * dot(v, target) / vtv;
    for (t, &vi) in target.iter_mut().zip(v) {
        *t -= s * vi;
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).fold(0.0, |acc, (x, y)| acc + x * y)
}

fn norm2(v: &[f64]) -> f64 {
    // scaled to avoid overflow; every entry here is at most 1 in magnitude anyway
    let big = v.iter().fold(0.0f64, |acc, x| acc.max(x.abs()));
    if big == 0.0 {
        return 0.0;
    }
    big * v.iter().fold(0.0, |acc, x| acc + (x / big) * (x / big)).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polyfit::table_polynomial;

    #[test]
    fn node_endpoints() {
        // pi/2 divides pi, so the grid is exactly {-pi, -pi/2, 0}
        let spec = FitSpec::new(2).with_step(PI / 2.0);
        let a = chebyshev_nodes(&spec).unwrap();
        assert_eq!(a.len(), 3);
        assert_eq!(a[0], 0.0);
        assert!((a[1] - 0.5).abs() < 1e-16);
        assert_eq!(a[2], 1.0);
    }

    #[test]
    fn default_grid_size() {
        let spec = FitSpec::new(2);
        // -pi + 314159e-5 is the last node at or below zero
        assert_eq!(spec.node_count().unwrap(), 314_160);
        let a = chebyshev_nodes(&spec).unwrap();
        assert_eq!(a[0], 0.0);
        assert!(a.iter().all(|v| (0.0..=1.0).contains(v)));
        assert!(1.0 - a[a.len() - 1] < 1e-11);
        assert!(a.windows(2).all(|w| w[0] <= w[1]));
    }

    #[test]
    fn bad_specs() {
        assert!(matches!(FitSpec::new(2).with_step(0.0).validate(), Err(Error::Config(_))));
        assert!(matches!(FitSpec::new(2).with_step(-1.0).validate(), Err(Error::Config(_))));
        assert!(matches!(FitSpec::new(3).validate(), Err(Error::Config(_))));
        let empty = FitSpec { theta_start: 0.0, theta_end: -1.0, ..FitSpec::new(2) };
        assert!(matches!(chebyshev_nodes(&empty), Err(Error::Config(_))));
        // three nodes cannot pin down a quartic
        assert!(matches!(fit_correction(&FitSpec::new(4).with_step(PI / 2.0)), Err(Error::Config(_))));
    }

    #[test]
    fn exact_polynomial_is_recovered() {
        let x: Vec<f64> = (0..200).map(|k| k as f64 / 199.0).collect();
        let want = [0.3, -1.25, 2.0, 0.5, -0.125];
        let y: Vec<f64> = x.iter().map(|&t| want.iter().rev().fold(0.0, |a, &c| a * t + c)).collect();
        let got = least_squares_monomial(&x, &y, 4).unwrap();
        for (g, w) in got.iter().zip(want) {
            assert!((g - w).abs() < 1e-12, "{got:?}");
        }
    }

    #[test]
    fn repeated_nodes_are_rank_deficient() {
        let x = vec![0.5; 10];
        let y = vec![1.0; 10];
        assert!(matches!(least_squares_monomial(&x, &y, 2), Err(Error::Numerical(_))));
    }

    #[test]
    fn decimated_fit_is_close_to_table() {
        // 10x coarser grid moves the fit by ~1e-7; the full grid is exercised by the
        // acceptance suite
        let p = fit_correction(&FitSpec::new(2).with_step(1e-4)).unwrap();
        assert_eq!(p.provenance(), Provenance::Fitted);
        assert!(p.max_deviation(&table_polynomial(2).unwrap(), 10_001) < 2e-7);
    }

    #[test]
    fn fit_is_bitwise_reproducible() {
        let spec = FitSpec::new(8).with_step(1e-3);
        let a = fit_correction(&spec).unwrap();
        let b = fit_correction(&spec).unwrap();
        let bits = |p: &CorrectionPolynomial| p.coeffs().iter().map(|c| c.to_bits()).collect::<Vec<_>>();
        assert_eq!(bits(&a), bits(&b));
    }
}
