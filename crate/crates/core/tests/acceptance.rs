//! One line per acceptance criterion; exits non-zero if any fails.

mod common;

use std::process::ExitCode;
use std::time::{Duration, Instant};

use nsdiv::divider::{Divider, DividerConfig};
use nsdiv::fixed::{FixedPoint, QFormat};
use nsdiv::harness::{optimal_16bit, summarize, sweep, ErrorRow, SweepSpec};
use nsdiv::polyfit::{
    fit_correction, table_polynomial, FitSpec, QUARTIC_FACTORS, QUARTIC_FACTORS_ROUNDED, SUPPORTED_DEGREES,
};
use nsdiv::reference::{correction_exact, fractional_position, linear_approx};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use common::{naive_power_sum, rational_divide, ulp_distance};

const SEED: u64 = 0x5eed_d171;
const RANDOM_CASES: usize = 10_000;

type Criterion = (&'static str, fn() -> Outcome);

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome { pass, detail: detail.into() }
}

fn headline_sweep(degree: u32) -> Vec<ErrorRow> {
    sweep(&SweepSpec::real_poly(degree, 1.0, 256.0).exclusive_start()).expect("sweep")
}

fn c1_table_regeneration() -> Outcome {
    let start = Instant::now();
    let mut worst = Vec::new();
    let mut pass = true;
    for d in SUPPORTED_DEGREES {
        let fitted = fit_correction(&FitSpec::new(d)).expect("fit");
        let dev = fitted.max_deviation(&table_polynomial(d).unwrap(), 100_000);
        let bound = if d <= 8 { 1e-9 } else { 1e-7 };
        pass &= dev <= bound;
        worst.push(format!("d{d}={dev:.1e}"));
    }
    let elapsed = start.elapsed();
    pass &= elapsed <= Duration::from_secs(60);
    outcome(pass, format!("{} in {:.1}s", worst.join(" "), elapsed.as_secs_f64()))
}

fn c2_headline_error() -> Outcome {
    let rows = headline_sweep(2);
    let s = summarize(&rows).unwrap();
    let tail = rows.iter().filter(|r| r.x >= 1.6).map(|r| r.abs_err).fold(0.0, f64::max);
    let pass = (s.max_abs - 1.684e-3).abs() <= 5e-5 && tail < 1e-3;
    outcome(pass, format!("max {:.4e} at x={:.6}, max for x>=1.6 {:.4e}", s.max_abs, s.argmax_abs, tail))
}

fn c3_degree_scaling() -> Outcome {
    let maxima: Vec<f64> =
        SUPPORTED_DEGREES.iter().map(|&d| summarize(&headline_sweep(d)).unwrap().max_abs).collect();
    let ratios: Vec<f64> = maxima.windows(2).map(|w| w[0] / w[1]).collect();
    let pass = ratios.iter().all(|r| (20.0..=50.0).contains(r));
    let text: Vec<String> = ratios.iter().map(|r| format!("{r:.1}")).collect();
    outcome(pass, format!("ratios {}", text.join(" ")))
}

fn c4_quartic_factorization() -> Outcome {
    let table = table_polynomial(4).unwrap();
    let coeff_err = |f: &nsdiv::polyfit::FactoredDeg4| {
        let e = f.expand().unwrap();
        e.coeffs().iter().zip(table.coeffs()).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max)
    };
    let exact = coeff_err(&QUARTIC_FACTORS);
    let rounded = coeff_err(&QUARTIC_FACTORS_ROUNDED);
    outcome(exact <= 1e-9 && rounded <= 1e-4, format!("unrounded {exact:.2e}, rounded {rounded:.2e}"))
}

fn fixed_abs_err(d: &Divider, w: &FixedPoint, x: u32) -> f64 {
    let xf = FixedPoint::from_raw(x as i64, d.config().x_format).unwrap();
    let (r, _) = d.divide(w, &xf).unwrap();
    (r.to_f64() - 1.0 / x as f64).abs()
}

fn c5_fixed_envelope() -> Outcome {
    let d4 = Divider::new(DividerConfig::new(4)).unwrap();
    let d2 = Divider::new(DividerConfig::new(2)).unwrap();
    let w = FixedPoint::from_raw(1 << 16, d4.config().w_format).unwrap();

    let mut xs: Vec<u32> = (4..=1 << 15).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    xs.extend((0..4096).map(|_| rng.gen_range(4..=1u32 << 15)));
    let mut violations = Vec::new();
    for &x in &xs {
        let err = fixed_abs_err(&d4, &w, x);
        let opt = (optimal_16bit(x as f64).unwrap() - 1.0 / x as f64).abs();
        if err > 4.0 * opt {
            violations.push(x);
        }
    }
    violations.sort_unstable();
    violations.dedup();

    let (mut max2, mut max2_tail) = (0.0f64, 0.0f64);
    for x in 1..=u16::MAX as u32 {
        let e = fixed_abs_err(&d2, &w, x);
        max2 = max2.max(e);
        if x >= 256 {
            max2_tail = max2_tail.max(e);
        }
    }
    let deg2_ok = max2 <= 2e-3 && max2_tail <= 2f64.powi(-15);
    let shown: Vec<String> = violations.iter().take(4).map(|x| x.to_string()).collect();
    outcome(
        violations.is_empty() && deg2_ok,
        format!(
            "deg4: {} distinct x of {} checked above 4x optimal [{}]; deg2 max {:.4e}, max for x>=256 {:.3e}",
            violations.len(),
            xs.len(),
            shown.join(","),
            max2,
            max2_tail
        ),
    )
}

fn c6_oracle_equivalence() -> Outcome {
    let start = Instant::now();
    let mut mismatches = 0;
    for degree in [2, 4] {
        let cfg = DividerConfig { x_format: QFormat::unsigned(8, 0).unwrap(), ..DividerConfig::new(degree) };
        let d = Divider::new(cfg).unwrap();
        let w = FixedPoint::from_raw(1 << 16, cfg.w_format).unwrap();
        for x in 1..=255u64 {
            let (r, t) = d.divide(&w, &FixedPoint::from_raw(x as i64, cfg.x_format).unwrap()).unwrap();
            if (r.raw(), t.z) != rational_divide(degree, x, 1.0, 17, 16) {
                mismatches += 1;
            }
        }
    }
    let elapsed = start.elapsed();
    outcome(
        mismatches == 0 && elapsed < Duration::from_secs(1),
        format!("{mismatches} mismatches over 510 cases in {:.3}s", elapsed.as_secs_f64()),
    )
}

fn c7_property_suites() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED ^ 7);
    let mut failed = Vec::new();

    let polys: Vec<_> = SUPPORTED_DEGREES.iter().map(|&d| table_polynomial(d).unwrap()).collect();
    let horner = (0..RANDOM_CASES)
        .filter(|_| {
            let p = &polys[rng.gen_range(0..polys.len())];
            let a: f64 = rng.gen_range(0.0..=1.0);
            ulp_distance(p.eval(a), naive_power_sum(p.coeffs(), a)) > 2.0
        })
        .count();
    if horner > 0 {
        failed.push(format!("horner({horner})"));
    }

    let w = FixedPoint::from_raw(1 << 16, QFormat::unsigned(16, 16).unwrap()).unwrap();
    let dividers =
        [Divider::new(DividerConfig::new(2)).unwrap(), Divider::new(DividerConfig::new(4)).unwrap()];
    let xf = |x: u32| FixedPoint::from_raw(x as i64, QFormat::unsigned(16, 0).unwrap()).unwrap();
    let octave = (0..RANDOM_CASES)
        .filter(|_| {
            let k = rng.gen_range(0..16u32);
            let x = rng.gen_range(1..=65535u32 >> k);
            let d = &dividers[rng.gen_range(0..2)];
            let (r1, t1) = d.divide(&w, &xf(x)).unwrap();
            let (r2, t2) = d.divide(&w, &xf(x << k)).unwrap();
            !(t2.z == t1.z + k as i32
                && t2.m == t1.m
                && t2.a_signal == t1.a_signal
                && t2.correction == t1.correction
                && ((r1.raw() >> k) - r2.raw()).abs() <= 1)
        })
        .count();
    if octave > 0 {
        failed.push(format!("octave({octave})"));
    }

    let rel = (0..RANDOM_CASES)
        .filter(|_| {
            let x: f64 = rng.gen_range(1.0..1e6);
            let approx: f64 = rng.gen_range(0.0..1.0);
            let r = ErrorRow::new(x, approx, 1.0 / x);
            ulp_distance(r.rel_err, x * (1.0 / x - approx).abs()) > 1.0
        })
        .count();
    if rel > 0 {
        failed.push(format!("rel_err({rel})"));
    }

    let pow2 = (0..RANDOM_CASES)
        .filter(|_| {
            let x = 2f64.powi(rng.gen_range(-1000..1000));
            linear_approx(x, 3.0).unwrap() != 1.0 / x
        })
        .count();
    if pow2 > 0 {
        failed.push(format!("pow2({pow2})"));
    }

    let compose = (0..RANDOM_CASES)
        .filter(|_| {
            let x = 2f64.powf(rng.gen_range(-990.0..990.0));
            let y =
                correction_exact(fractional_position(x).unwrap()).unwrap() * linear_approx(x, 3.0).unwrap();
            ulp_distance(y, 1.0 / x) > 4.0
        })
        .count();
    if compose > 0 {
        failed.push(format!("composition({compose})"));
    }

    let detail = if failed.is_empty() {
        format!("5 suites x {RANDOM_CASES} cases")
    } else {
        format!("failing: {}", failed.join(" "))
    };
    outcome(failed.is_empty(), detail)
}

fn main() -> ExitCode {
    let criteria: [Criterion; 7] = [
        ("C1 table regeneration", c1_table_regeneration),
        ("C2 headline error", c2_headline_error),
        ("C3 degree scaling", c3_degree_scaling),
        ("C4 quartic factorization", c4_quartic_factorization),
        ("C5 fixed-point envelope", c5_fixed_envelope),
        ("C6 oracle equivalence", c6_oracle_equivalence),
        ("C7 property suites", c7_property_suites),
    ];
    let mut failures = 0;
    for (name, run) in criteria {
        let o = run();
        if !o.pass {
            failures += 1;
        }
        println!("[{}] {name}: {}", if o.pass { "PASS" } else { "FAIL" }, o.detail);
    }
    println!("acceptance: {} passed, {failures} failed", criteria.len() - failures);
    if failures == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
