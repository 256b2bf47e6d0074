use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, Context};
use clap::{Args, Parser, Subcommand};
use l1curve_core::curve::{eval_complex, eval_real, sample_grid, unit_grid, write_csv};
use l1curve_core::exact::rational::{format_rational, parse_rational, to_decimal};
use l1curve_core::model::{build_model_with_limits, BuildLimits};
use l1curve_core::verify::{run_suite, Suite, SuiteConfig};
use l1curve_core::{CurveModel, Error, OmegaSpec, Rational};
use num_complex::Complex;
use num_traits::{Signed, Zero};

/// Default output directory for files written without `-o`.
const OUT_DIR_ENV: &str = "L1CURVE_OUT_DIR";

#[derive(Parser)]
#[command(
    name = "l1curve",
    version,
    about = "Exact polynomial curves in L1[0, 1] that are isometric and nowhere differentiable"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build a model and write it as JSON.
    Build(BuildArgs),
    /// Evaluate F_t at a real x or complex z.
    Eval(EvalArgs),
    /// Run verification suites and write a report.
    Verify(VerifyArgs),
    /// Sample F_t on a grid and write CSV.
    Export(ExportArgs),
}

#[derive(Args)]
struct BuildArgs {
    /// constant:c, geometric:ρ, factorial-reciprocal or explicit-table:ω1,ω2,...
    #[arg(long, default_value = "constant:1")]
    omega: OmegaSpec,
    /// Number of direction-change levels R.
    #[arg(long, default_value_t = 3, value_parser = clap::value_parser!(u32).range(1..))]
    levels: u32,
    #[arg(long, default_value_t = BuildLimits::default().max_degree)]
    max_degree: usize,
    #[arg(long, default_value_t = BuildLimits::default().max_coeff_bits)]
    max_coeff_bits: u64,
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct EvalArgs {
    model: PathBuf,
    #[arg(long, value_parser = rational)]
    t: Rational,
    #[arg(long, value_parser = rational, conflicts_with = "z", required_unless_present = "z")]
    x: Option<Rational>,
    /// Complex point such as `0+1i`, `3/5-4/5i` or `i`.
    #[arg(long, value_parser = complex)]
    z: Option<Complex<Rational>>,
    /// Series terms kept; defaults to the model's level count.
    #[arg(long)]
    r_max: Option<u32>,
    /// Significand bits of the printed decimal.
    #[arg(long, default_value_t = 64, value_parser = clap::value_parser!(u32).range(64..))]
    precision: u32,
}

#[derive(Args)]
struct VerifyArgs {
    model: PathBuf,
    /// Restrict to these suites (repeatable).
    #[arg(long = "only", value_name = "SUITE")]
    only: Vec<Suite>,
    /// Parameters for the derivative, convergence and secant suites
    /// (repeatable or comma-separated).
    #[arg(long = "t", value_parser = rational, value_delimiter = ',')]
    ts: Vec<Rational>,
    /// Enclosure width relative to the scale 2^-n of each quantity.
    #[arg(long, value_parser = rational)]
    eps: Option<Rational>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    isometry_pairs: Option<usize>,
    /// Treat inconclusive verdicts as success.
    #[arg(long)]
    allow_inconclusive: bool,
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct ExportArgs {
    model: PathBuf,
    /// Comma-separated t values; may be empty.
    #[arg(long = "t", default_value = "0,1/4,1/2,3/4,1")]
    ts: String,
    #[arg(long, default_value_t = 101)]
    x_points: usize,
    #[arg(long)]
    r_max: Option<u32>,
    /// Output file, or `-` for stdout.
    #[arg(short, long)]
    output: Option<PathBuf>,
}

enum Failure {
    /// Bad flags or unusable input. Exit 2.
    Input(anyhow::Error),
    /// A failed check, a resource cap or an output error. Exit 1.
    Run(anyhow::Error),
}

impl From<Error> for Failure {
    fn from(err: Error) -> Self {
        match err {
            Error::ResourceLimit(_) => Failure::Run(err.into()),
            _ => Failure::Input(err.into()),
        }
    }
}

type CliResult<T> = Result<T, Failure>;

fn rational(s: &str) -> Result<Rational, String> {
    parse_rational(s.trim())
}

fn complex(s: &str) -> Result<Complex<Rational>, String> {
    let s: String = s.chars().filter(|c| !c.is_whitespace()).collect();
    let Some(body) = s.strip_suffix('i') else {
        return Ok(Complex::new(rational(&s)?, Rational::zero()));
    };
    // split at the last sign that is not a leading sign or an exponent sign
    let bytes = body.as_bytes();
    let cut = (1..bytes.len())
        .rev()
        .find(|&k| matches!(bytes[k], b'+' | b'-') && !matches!(bytes[k - 1], b'e' | b'E'));
    let (re, im) = match cut {
        Some(k) => (rational(&body[..k])?, &body[k..]),
        None => (Rational::zero(), body),
    };
    let im = match im {
        "" | "+" => Rational::from_integer(1.into()),
        "-" => Rational::from_integer((-1).into()),
        other => rational(other.strip_prefix('+').unwrap_or(other))?,
    };
    Ok(Complex::new(re, im))
}

fn default_path(output: Option<PathBuf>, name: &str) -> PathBuf {
    output.unwrap_or_else(|| {
        std::env::var_os(OUT_DIR_ENV)
            .map(PathBuf::from)
            .unwrap_or_default()
            .join(name)
    })
}

fn write_file(path: &Path, contents: &[u8]) -> CliResult<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir)
            .with_context(|| format!("creating {}", dir.display()))
            .map_err(Failure::Run)?;
    }
    fs::write(path, contents)
        .with_context(|| format!("writing {}", path.display()))
        .map_err(Failure::Run)
}

fn load_model(path: &Path) -> CliResult<CurveModel> {
    let text = fs::read_to_string(path)
        .with_context(|| format!("reading {}", path.display()))
        .map_err(Failure::Input)?;
    CurveModel::from_json(&text)
        .with_context(|| format!("loading {}", path.display()))
        .map_err(Failure::Input)
}

fn r_max_or_default(model: &CurveModel, r_max: Option<u32>) -> CliResult<u32> {
    let r = r_max.unwrap_or(model.levels());
    if r == 0 || r > model.levels() {
        return Err(Error::LevelIndexOutOfRange {
            r,
            levels: model.levels(),
        }
        .into());
    }
    Ok(r)
}

fn build(args: BuildArgs) -> CliResult<()> {
    let limits = BuildLimits {
        max_degree: args.max_degree,
        max_coeff_bits: args.max_coeff_bits,
    };
    let model = build_model_with_limits(args.omega, args.levels, limits)?;
    let path = default_path(args.output, "model.json");
    write_file(&path, model.to_json().as_bytes())?;

    println!("omega {}", model.omega);
    println!(
        "{:>4} {:>6} {:>8} {:>8} {:>12}",
        "r", "k", "n", "degree", "coeff_bits"
    );
    for e in model.schedule.entries() {
        let (degree, bits) = model.depth_stats(e.r as usize);
        println!(
            "{:>4} {:>6} {:>8} {:>8} {:>12}",
            e.r, e.k, e.n, degree, bits
        );
    }
    println!("wrote {}", path.display());
    Ok(())
}

fn digits_for_bits(bits: u32) -> usize {
    // ceil(bits * log10 2)
    ((bits as u64 * 30_103).div_ceil(100_000)) as usize
}

fn complex_decimal(z: &Complex<Rational>, digits: usize) -> String {
    let sign = if z.im.is_negative() { '-' } else { '+' };
    format!(
        "{} {sign} {}i",
        to_decimal(&z.re, digits),
        to_decimal(&z.im.abs(), digits)
    )
}

fn eval(args: EvalArgs) -> CliResult<()> {
    let model = load_model(&args.model)?;
    let r_max = r_max_or_default(&model, args.r_max)?;
    let digits = digits_for_bits(args.precision);
    let (value, anchor, truncation, error_bound) = match (&args.x, &args.z) {
        (Some(x), _) => {
            let res = eval_real(&model, &args.t, x, r_max)?;
            (
                to_decimal(&res.value, digits),
                res.anchor,
                res.truncation,
                res.error_bound,
            )
        }
        (None, Some(z)) => {
            let res = eval_complex(&model, &args.t, z, r_max)?;
            (
                complex_decimal(&res.value, digits),
                res.anchor,
                res.truncation,
                res.error_bound,
            )
        }
        (None, None) => return Err(Failure::Input(anyhow!("one of --x or --z is required"))),
    };
    println!("t = {}", format_rational(&args.t));
    println!(
        "anchor = {} (generation {})",
        format_rational(&anchor.value()),
        anchor.generation()
    );
    println!("r_max = {r_max}");
    println!("value = {value}");
    println!("truncation = {}", to_decimal(&truncation, 17));
    println!("error_bound = {}", to_decimal(&error_bound, 17));
    Ok(())
}

fn verify(args: VerifyArgs) -> CliResult<bool> {
    let model = load_model(&args.model)?;
    let mut config = SuiteConfig {
        seed: args.seed,
        ..SuiteConfig::default()
    };
    if !args.only.is_empty() {
        config.suites = args.only;
    }
    if !args.ts.is_empty() {
        config.ts = args.ts;
    }
    if let Some(eps) = args.eps {
        if eps <= Rational::zero() {
            return Err(Error::NonpositiveTolerance.into());
        }
        config.rel_eps = eps;
    }
    if let Some(pairs) = args.isometry_pairs {
        config.isometry_pairs = pairs;
    }
    let report = run_suite(&model, &config);
    let path = default_path(args.output, "report.json");
    write_file(&path, report.to_json().as_bytes())?;

    let s = &report.summary;
    println!(
        "{} checks: {} pass-exact, {} pass-enclosure, {} inconclusive, {} fail",
        s.total, s.pass_exact, s.pass_enclosure, s.inconclusive, s.fail
    );
    for rep in report.reports.iter().filter(|r| !r.verdict.is_pass()) {
        let params: Vec<String> = rep.params.iter().map(|(k, v)| format!("{k}={v}")).collect();
        println!(
            "{} {} [{}]: {}",
            rep.verdict.as_str(),
            rep.check,
            params.join(" "),
            rep.note.as_deref().unwrap_or("")
        );
    }
    println!("wrote {}", path.display());
    Ok(report.is_ok(args.allow_inconclusive))
}

fn export(args: ExportArgs) -> CliResult<()> {
    let model = load_model(&args.model)?;
    let r_max = r_max_or_default(&model, args.r_max)?;
    let ts = args
        .ts
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| rational(s).map_err(|e| Failure::Input(anyhow!("--t `{s}`: {e}"))))
        .collect::<CliResult<Vec<_>>>()?;
    let rows = sample_grid(&model, &ts, &unit_grid(args.x_points), r_max)?;
    let mut buf = Vec::new();
    write_csv(&rows, &mut buf).map_err(|e| Failure::Run(e.into()))?;
    let path = default_path(args.output, "samples.csv");
    if path == Path::new("-") {
        io::stdout()
            .write_all(&buf)
            .map_err(|e| Failure::Run(e.into()))
    } else {
        write_file(&path, &buf)
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Build(a) => build(a).map(|()| true),
        Command::Eval(a) => eval(a).map(|()| true),
        Command::Verify(a) => verify(a),
        Command::Export(a) => export(a).map(|()| true),
    };
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(Failure::Run(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
        Err(Failure::Input(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use l1curve_core::exact::rational::rat;

    #[test]
    fn complex_forms() {
        let c = |re, im| Complex::new(re, im);
        assert_eq!(complex("1+0i").unwrap(), c(rat(1, 1), rat(0, 1)));
        assert_eq!(complex("i").unwrap(), c(rat(0, 1), rat(1, 1)));
        assert_eq!(complex("-i").unwrap(), c(rat(0, 1), rat(-1, 1)));
        assert_eq!(complex("3/5-4/5i").unwrap(), c(rat(3, 5), rat(-4, 5)));
        assert_eq!(complex("-0.5 + 2i").unwrap(), c(rat(-1, 2), rat(2, 1)));
        assert_eq!(complex("1e-1+1e-1i").unwrap(), c(rat(1, 10), rat(1, 10)));
        assert_eq!(complex("2").unwrap(), c(rat(2, 1), rat(0, 1)));
        assert!(complex("1+xi").is_err());
    }

    #[test]
    fn precision_digits() {
        assert_eq!(digits_for_bits(64), 20);
        assert_eq!(digits_for_bits(53), 16);
    }
}
