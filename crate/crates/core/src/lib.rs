//! Single-pass division: a piecewise-linear reciprocal `y_l(x) = (3 - x 2^-z) 2^-(z+1)`
//! corrected by one polynomial `p_d(a)` in the intra-octave position `a = x 2^-z - 1`.
//!
//! The crate is layered bottom-up:
//!
//! * [`reference`] holds the real-valued closed forms and acts as the oracle for everything else.
//! * [`polyfit`] regenerates, stores, evaluates and factors the correction polynomials.
//! * [`fixed`] is a small Q-format arithmetic layer with hardware truncation semantics.
//! * [`divider`] models the degree-2 and degree-4 datapaths bit-exactly.
//! * [`harness`] sweeps input ranges and measures errors against exact references.
//! * [`vectors`] reads and writes hexadecimal stimulus files for an HDL testbench.

pub mod divider;
pub mod error;
pub mod fixed;
pub mod harness;
pub mod polyfit;
pub mod reference;
pub mod vectors;

pub use divider::{Divider, DividerConfig, DividerTrace};
pub use error::{Error, Result};
pub use fixed::{FixedPoint, QFormat, Rounding};
pub use polyfit::{CorrectionPolynomial, FitSpec};
