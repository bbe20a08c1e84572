//! Published correction polynomials, stored exactly as listed: highest power first.

use super::{CorrectionPolynomial, Provenance};
use crate::error::{Error, Result};

const DEG2: [f64; 3] = [0.444059373310529, -0.444059378998574, 0.998316470026731];

const DEG4: [f64; 5] =
    [0.209150199411479, -0.418300401501980, 0.705497065458358, -0.496346863702732, 0.999950441820227];

const DEG6: [f64; 7] = [
    0.098508912421565,
    -0.295526738526111,
    0.541617753193361,
    -0.590690940810007,
    0.745901070861286,
    -0.499810057154873,
    0.999998541152684,
];

const DEG8: [f64; 9] = [
    0.046397306119941,
    -0.185589225073683,
    0.400091390713315,
    -0.550711883119918,
    0.661235760287096,
    -0.621139145442145,
    0.749707092244658,
    -0.499991295729843,
    0.999999957055819,
];

const DEG10: [f64; 11] = [
    0.021852946554248,
    -0.109264732943323,
    0.278584857665575,
    -0.458751032417924,
    0.594292338298524,
    -0.636160280553253,
    0.684123714654436,
    -0.624660366579099,
    0.749982187229885,
    -0.499999631909091,
    0.999999998735847,
];

const DEG12: [f64; 13] = [
    0.010292651888006,
    -0.061755913969247,
    0.183962224976114,
    -0.353715232937807,
    0.512340641363993,
    -0.606386252715474,
    0.656490500342412,
    -0.653408505661428,
    0.687155627762944,
    -0.624974786919717,
    0.749999031146584,
    -0.499999985276385,
    0.999999999962789,
];

const DEG14: [f64; 15] = [
    0.004847557219273,
    -0.033932867266309,
    0.116332750240922,
    -0.256869471884100,
    0.418707931272722,
    -0.547635332581819,
    0.624725982459027,
    -0.652257742453188,
    0.669535180214450,
    -0.655925894486105,
    0.687470300538450,
    -0.624998345227464,
    0.749999951387920,
    -0.499999999433776,
    0.999999999998901,
];

const DEG16: [f64; 17] = [
    0.002280382320975,
    -0.018242765293630,
    0.070976706318807,
    -0.177591353506595,
    0.324764737187105,
    -0.469933369923315,
    0.576458350792034,
    -0.633272693434323,
    0.658848078752916,
    -0.662148630845731,
    0.671580922961134,
    -0.656218168654479,
    0.687497704369226,
    -0.624999898693680,
    0.749999997627261,
    -0.499999999977700,
    0.999999999999963,
];

/// The published coefficient row for `degree`, highest power first.
pub fn descending_row(degree: u32) -> Result<&'static [f64]> {
    Ok(match degree {
        2 => &DEG2,
        4 => &DEG4,
        6 => &DEG6,
        8 => &DEG8,
        10 => &DEG10,
        12 => &DEG12,
        14 => &DEG14,
        16 => &DEG16,
        _ => {
            return Err(Error::Config(format!(
                "no published polynomial of degree {degree}; supported degrees are 2, 4, ..., 16"
            )))
        }
    })
}

/// Published polynomial of the given degree, reversed into ascending storage.
pub fn table_polynomial(degree: u32) -> Result<CorrectionPolynomial> {
    CorrectionPolynomial::from_descending(descending_row(degree)?, Provenance::Table)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polyfit::SUPPORTED_DEGREES;

    #[test]
    fn constant_terms() {
        assert_eq!(table_polynomial(2).unwrap().coeffs()[0], 0.998316470026731);
        assert_eq!(table_polynomial(4).unwrap().coeffs()[0], 0.999950441820227);
        assert_eq!(table_polynomial(16).unwrap().coeffs()[0], 0.999999999999963);
    }

    #[test]
    fn loader_reverses_order() {
        for d in SUPPORTED_DEGREES {
            let p = table_polynomial(d).unwrap();
            let row = descending_row(d).unwrap();
            assert_eq!(p.degree(), d);
            assert_eq!(p.coeffs().len(), d as usize + 1);
            let mut rev = row.to_vec();
            rev.reverse();
            assert_eq!(p.coeffs(), rev.as_slice());
            assert_eq!(p.provenance(), Provenance::Table);
        }
    }

    #[test]
    fn unsupported_degree() {
        for d in [0, 1, 3, 5, 18] {
            assert!(matches!(table_polynomial(d), Err(Error::Config(_))));
        }
    }
}
