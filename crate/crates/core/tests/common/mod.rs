//! Independent oracles shared by the integration suites.
#![allow(dead_code)]

use num::bigint::BigInt;
use num::rational::BigRational;
use num::{One, Signed, ToPrimitive, Zero};

// ---------------------------------------------------------------------------------------------
// compensated (double-double) power sum

fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    (s, (a - (s - bb)) + (b - bb))
}

fn two_prod(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    (p, a.mul_add(b, -p))
}

#[derive(Clone, Copy)]
struct Dd(f64, f64);

impl Dd {
    fn add(self, o: Dd) -> Dd {
        let (s, e) = two_sum(self.0, o.0);
        let e = e + self.1 + o.1;
        let (h, l) = two_sum(s, e);
        Dd(h, l)
    }

    fn mul_f(self, b: f64) -> Dd {
        let (p, e) = two_prod(self.0, b);
        let e = e + self.1 * b;
        let (h, l) = two_sum(p, e);
        Dd(h, l)
    }
}

/// `sum_j c_j a^j` term by term with powers and partial sums carried in double-double.
pub fn naive_power_sum(coeffs_ascending: &[f64], a: f64) -> f64 {
    let mut pow = Dd(1.0, 0.0);
    let mut acc = Dd(0.0, 0.0);
    for (j, &c) in coeffs_ascending.iter().enumerate() {
        if j > 0 {
            pow = pow.mul_f(a);
        }
        acc = acc.add(pow.mul_f(c));
    }
    acc.0 + acc.1
}

/// Distance in units of the last place of `b`.
pub fn ulp_distance(a: f64, b: f64) -> f64 {
    let ulp = (b.abs().next_up() - b.abs()).max(f64::from_bits(1));
    (a - b).abs() / ulp
}

// ---------------------------------------------------------------------------------------------
// rational re-implementation of the two wire diagrams

fn pow2(k: u32) -> BigRational {
    BigRational::from_integer(BigInt::one() << k)
}

fn exact(v: f64) -> BigRational {
    BigRational::from_float(v).expect("finite constant")
}

fn floor_bits(r: &BigRational, bits: u32) -> BigRational {
    (r * pow2(bits)).floor() / pow2(bits)
}

fn nearest_even_bits(r: &BigRational, bits: u32) -> BigRational {
    let s = r * pow2(bits);
    let fl = s.floor();
    let frac = &s - &fl;
    let half = BigRational::new(BigInt::one(), BigInt::from(2));
    let up = frac > half || (frac == half && (fl.to_integer() % BigInt::from(2)) != BigInt::zero());
    let q = if up { fl + BigRational::one() } else { fl };
    q / pow2(bits)
}

fn round_half_up_bits(r: &BigRational, bits: u32) -> BigRational {
    let half = BigRational::new(BigInt::one(), BigInt::from(2));
    (r * pow2(bits) + half).floor() / pow2(bits)
}

/// `w / x` as the degree-2 or degree-4 diagram computes it, with every multiplier output
/// truncated to `frac` bits and the final product rounded to `out_frac` bits. Returns the
/// raw output integer and the octave.
pub fn rational_divide(degree: u32, x: u64, w: f64, frac: u32, out_frac: u32) -> (i64, i32) {
    assert!(x >= 1);
    let xr = BigRational::from_integer(BigInt::from(x));
    let mut z = 0u32;
    while BigRational::from_integer(BigInt::one() << (z + 1)) <= xr {
        z += 1;
    }
    let m = floor_bits(&(&xr / pow2(z)), frac);
    let k = |v: f64| nearest_even_bits(&exact(v), frac);
    let three = BigRational::from_integer(BigInt::from(3));
    let corr = match degree {
        2 => {
            let c2 = 0.444059373310529f64;
            let c0 = 0.998316470026731f64;
            let c2q = k(c2);
            let cpq = k(c0 - 0.25 * c2);
            let s = &m - BigRational::new(BigInt::from(3), BigInt::from(2));
            let s2 = floor_bits(&(&s * &s), frac);
            floor_bits(&(&c2q * &s2), frac) + cpq
        }
        4 => {
            let a = &m - BigRational::one();
            let a2 = floor_bits(&(&a * &a), frac);
            let half_a = floor_bits(&(&a / pow2(1)), frac);
            let two_a = &a * BigRational::from_integer(BigInt::from(2));
            let q1 = k(3.0616168632399) - (two_a + &half_a) + &a2;
            assert!(q1.is_positive());
            let q2 = k(1.561598389171924) + &half_a + &a2;
            let p = floor_bits(&(&q1 * &q2), frac);
            floor_bits(&(k(0.209150199411479) * p), frac)
        }
        _ => panic!("no diagram for degree {degree}"),
    };
    let yl = three - &m;
    let cy = floor_bits(&(corr * yl), frac);
    let ws = floor_bits(&(exact(w) / pow2(z + 1)), frac);
    let r = round_half_up_bits(&(cy * ws), out_frac);
    ((r * pow2(out_frac)).to_integer().to_i64().unwrap(), z as i32)
}
