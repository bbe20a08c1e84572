use std::fs;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use nsdiv::divider::{Divider, DividerConfig, DividerTrace};
use nsdiv::fixed::{FixedPoint, QFormat, Rounding};
use nsdiv::harness::{self, Grid, ModelParams, ModelRegistry, Reference, SummaryReport, SweepSpec};
use nsdiv::polyfit::{fit_correction, table_polynomial, CorrectionPolynomial, FitSpec};
use nsdiv::reference::corrected_reciprocal;
use nsdiv::vectors;

/// Bit-exact model of a piecewise-linear reciprocal divider with polynomial correction.
#[derive(Parser, Debug)]
#[command(name = "nsdiv", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Least-squares fit of the correction polynomial on Chebyshev nodes.
    Fit(FitArgs),
    /// Corrected reciprocal of one x, real-valued and fixed-point.
    Eval(EvalArgs),
    /// One division through the fixed-point datapath.
    Simulate(SimulateArgs),
    /// Error sweep written as CSV.
    Sweep(SweepArgs),
    /// Testbench stimulus/expected vectors.
    Vectors(VectorArgs),
    /// Error maxima of a sweep as JSON.
    Summary(SweepArgs),
}

#[derive(Args, Debug)]
struct FitArgs {
    #[arg(long)]
    degree: u32,
    /// Spacing of the angle grid the nodes are drawn from.
    #[arg(long, default_value_t = nsdiv::polyfit::DEFAULT_THETA_STEP)]
    theta_step: f64,
    /// Write the coefficient JSON here and print the deviation from the built-in table instead.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug, Clone)]
struct FormatArgs {
    /// Divisor input format.
    #[arg(long, default_value = "Q16.0")]
    x_format: QFormat,
    /// Dividend input format.
    #[arg(long, default_value = "Q16.16")]
    w_format: QFormat,
    /// Fractional bits of the internal datapath.
    #[arg(long, default_value_t = 17)]
    frac_bits: u32,
    /// Result format.
    #[arg(long, default_value = "Q1.16")]
    out_format: QFormat,
}

impl FormatArgs {
    fn config(&self, degree: u32) -> Result<DividerConfig> {
        let cfg = DividerConfig {
            degree,
            x_format: self.x_format,
            w_format: self.w_format,
            internal_frac_bits: self.frac_bits,
            out_format: self.out_format,
        };
        cfg.validate()?;
        Ok(cfg)
    }
}

#[derive(Args, Debug)]
struct EvalArgs {
    #[arg(long)]
    x: f64,
    #[arg(long, default_value_t = 2)]
    degree: u32,
    #[command(flatten)]
    formats: FormatArgs,
}

#[derive(Args, Debug)]
struct SimulateArgs {
    /// Dividend value, truncated onto the dividend format.
    #[arg(long, conflicts_with = "w_raw")]
    w: Option<f64>,
    /// Divisor value, truncated onto the divisor format.
    #[arg(long, conflicts_with = "x_raw", required_unless_present = "x_raw")]
    x: Option<f64>,
    /// Raw dividend as `<int>:<format>`, e.g. `0x10000:Q16.16`.
    #[arg(long)]
    w_raw: Option<FixedPoint>,
    /// Raw divisor as `<int>:<format>`, e.g. `0x6:Q16.0`.
    #[arg(long)]
    x_raw: Option<FixedPoint>,
    #[arg(long, default_value_t = 2)]
    degree: u32,
    /// Print every wire of the datapath.
    #[arg(long)]
    trace: bool,
    #[command(flatten)]
    formats: FormatArgs,
}

#[derive(ValueEnum, Debug, Clone, Copy)]
enum RefArg {
    Exact,
    Optimal16,
}

#[derive(Args, Debug)]
struct SweepArgs {
    /// Registered model: exact, fixed, optimal16, real-poly.
    #[arg(long, default_value = "real-poly")]
    model: String,
    #[arg(long, default_value_t = 2)]
    degree: u32,
    /// Coefficient JSON (from `fit`) replacing the table polynomial of `real-poly`.
    #[arg(long)]
    poly: Option<PathBuf>,
    #[arg(long, default_value_t = 1.0)]
    start: f64,
    #[arg(long, default_value_t = 256.0)]
    end: f64,
    /// Exclude `start` itself.
    #[arg(long)]
    start_exclusive: bool,
    #[arg(long, conflicts_with = "step")]
    per_octave: Option<u32>,
    /// Uniform spacing instead of a per-octave grid.
    #[arg(long)]
    step: Option<f64>,
    #[arg(long, value_enum, default_value_t = RefArg::Exact)]
    reference: RefArg,
    /// Output file; stdout if absent.
    #[arg(long)]
    out: Option<PathBuf>,
    #[command(flatten)]
    formats: FormatArgs,
}

impl SweepArgs {
    fn spec(&self) -> Result<SweepSpec> {
        let polynomial = match &self.poly {
            Some(p) => {
                Some(CorrectionPolynomial::load(p).with_context(|| format!("loading {}", p.display()))?)
            }
            None => None,
        };
        let degree = polynomial.as_ref().map_or(self.degree, |p| p.degree());
        let params = ModelParams { degree, polynomial, divider: self.formats.config(degree)? };
        let grid = match (self.step, self.per_octave) {
            (Some(s), _) => Grid::Step(s),
            (None, Some(n)) => Grid::PerOctave(n),
            (None, None) => Grid::PerOctave(harness::DEFAULT_POINTS_PER_OCTAVE),
        };
        let reference = match self.reference {
            RefArg::Exact => Reference::Exact,
            RefArg::Optimal16 => Reference::Optimal16,
        };
        let mut spec = SweepSpec::new(&self.model, params, self.start, self.end)
            .with_grid(grid)
            .with_reference(reference);
        spec.start_exclusive = self.start_exclusive;
        Ok(spec)
    }
}

#[derive(Args, Debug)]
struct VectorArgs {
    #[arg(long, default_value_t = 2)]
    degree: u32,
    /// Number of random (w, x) pairs.
    #[arg(long, default_value_t = 1000)]
    count: usize,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Every x of the divisor format with the dividend fixed at `--w`, instead of random pairs.
    #[arg(long)]
    all_x: bool,
    /// Dividend for `--all-x`.
    #[arg(long, default_value_t = 1.0)]
    w: f64,
    /// Output file; stdout if absent.
    #[arg(long)]
    out: Option<PathBuf>,
    #[command(flatten)]
    formats: FormatArgs,
}

fn emit(out: Option<&PathBuf>, text: &str) -> Result<()> {
    match out {
        Some(p) => fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(text.as_bytes())?;
            stdout.flush()?;
            Ok(())
        }
    }
}

fn pretty(v: &Value) -> Result<String> {
    Ok(serde_json::to_string_pretty(v)? + "\n")
}

fn wire(v: &FixedPoint) -> Value {
    json!({ "raw": v.raw(), "format": v.format().to_string(), "value": v.to_f64() })
}

fn trace_json(t: &DividerTrace) -> Value {
    let constants: serde_json::Map<String, Value> =
        t.constants.iter().map(|(n, v)| (n.clone(), wire(v))).collect();
    json!({
        "degree": t.degree,
        "z": t.z,
        "m": wire(&t.m),
        "a_signal": wire(&t.a_signal),
        "correction": wire(&t.correction),
        "y_l": wire(&t.y_l),
        "corrected": wire(&t.corrected),
        "w_shifted": wire(&t.w_shifted),
        "result": wire(&t.result),
        "constants": constants,
    })
}

fn require_x_at_least_one(x: f64) -> Result<()> {
    if !(x.is_finite() && x >= 1.0) {
        bail!("domain error: divider needs finite x >= 1, got {x}");
    }
    Ok(())
}

fn fit(args: &FitArgs) -> Result<()> {
    let spec = FitSpec::new(args.degree).with_step(args.theta_step);
    let poly = fit_correction(&spec)?;
    match &args.out {
        None => emit(None, &(poly.to_json()? + "\n")),
        Some(path) => {
            poly.save(path)?;
            let table = table_polynomial(args.degree)?;
            let report = json!({
                "degree": args.degree,
                "nodes": spec.node_count()?,
                "max_deviation_vs_table": poly.max_deviation(&table, 100_000),
                "max_error_vs_exact": poly.max_error_vs_exact(100_000),
            });
            emit(None, &pretty(&report)?)
        }
    }
}

fn eval(args: &EvalArgs) -> Result<()> {
    require_x_at_least_one(args.x)?;
    let poly = table_polynomial(args.degree)?;
    let cfg = args.formats.config(args.degree)?;
    let divider = Divider::new(cfg)?;
    let xq = FixedPoint::quantize(args.x, cfg.x_format, Rounding::Truncate)?;
    let fixed = divider.reciprocal(&xq)?;
    let report = json!({
        "x": args.x,
        "degree": args.degree,
        "exact": 1.0 / args.x,
        "real": corrected_reciprocal(args.x, &poly)?,
        "fixed_x": xq.to_f64(),
        "fixed": fixed.to_f64(),
        "fixed_raw": fixed.raw(),
        "fixed_format": fixed.format().to_string(),
    });
    emit(None, &pretty(&report)?)
}

fn simulate(args: &SimulateArgs) -> Result<()> {
    let mut formats = args.formats.clone();
    if let Some(x) = args.x_raw {
        formats.x_format = x.format();
    }
    if let Some(w) = args.w_raw {
        formats.w_format = w.format();
    }
    let cfg = formats.config(args.degree)?;
    let x = match (args.x, args.x_raw) {
        (_, Some(raw)) => raw,
        (Some(v), None) => {
            require_x_at_least_one(v)?;
            FixedPoint::quantize(v, cfg.x_format, Rounding::Truncate)?
        }
        (None, None) => bail!("one of --x or --x-raw is required"),
    };
    require_x_at_least_one(x.to_f64())?;
    let w = match (args.w, args.w_raw) {
        (_, Some(raw)) => raw,
        (Some(v), None) => FixedPoint::quantize(v, cfg.w_format, Rounding::Truncate)?,
        (None, None) => FixedPoint::quantize(1.0, cfg.w_format, Rounding::NearestEven)?,
    };
    let (result, trace) = Divider::new(cfg)?.divide(&w, &x)?;
    let report = if args.trace {
        let mut t = trace_json(&trace);
        t["x"] = wire(&x);
        t["w"] = wire(&w);
        t
    } else {
        json!({ "x": wire(&x), "w": wire(&w), "result": wire(&result), "exact": w.to_f64() / x.to_f64() })
    };
    emit(None, &pretty(&report)?)
}

fn sweep(args: &SweepArgs) -> Result<()> {
    let rows = harness::sweep(&args.spec()?)?;
    let mut buf = Vec::new();
    harness::write_csv(&rows, &mut buf)?;
    emit(args.out.as_ref(), std::str::from_utf8(&buf)?)
}

fn summary(args: &SweepArgs) -> Result<()> {
    let spec = args.spec()?;
    let rows = harness::sweep(&spec)?;
    let s = harness::summarize(&rows)?;
    let report = SummaryReport::new(&spec, &ModelRegistry::builtin(), &s)?;
    emit(args.out.as_ref(), &pretty(&serde_json::to_value(report)?)?)
}

fn vectors(args: &VectorArgs) -> Result<()> {
    let cfg = args.formats.config(args.degree)?;
    let divider = Divider::new(cfg)?;
    let inputs = if args.all_x {
        let w = FixedPoint::quantize(args.w, cfg.w_format, Rounding::Truncate)?;
        vectors::exhaustive_inputs(&cfg, w)?
    } else {
        vectors::random_inputs(&cfg, args.count, &mut ChaCha8Rng::seed_from_u64(args.seed))?
    };
    let vs = vectors::generate(&divider, &inputs)?;
    let header = format!(
        "# x:{} w:{} degree result:{} z  (internal Q.{})\n",
        cfg.x_format, cfg.w_format, cfg.out_format, cfg.internal_frac_bits
    );
    emit(args.out.as_ref(), &(header + &vectors::write_vectors(&vs)))
}

fn run(cli: Cli) -> Result<()> {
    match &cli.command {
        Command::Fit(a) => fit(a),
        Command::Eval(a) => eval(a),
        Command::Simulate(a) => simulate(a),
        Command::Sweep(a) => sweep(a),
        Command::Vectors(a) => vectors(a),
        Command::Summary(a) => summary(a),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
