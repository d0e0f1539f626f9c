//! `fractel` command-line tool: fixture verification, square-root
//! approximation profiles, exact basis matrices, digit-driven polynomial
//! evaluation, and a Horner comparison benchmark.
//!
//! Exit codes: 0 success (and verification PASS), 1 verification FAIL,
//! 2 usage or parse error, 3 I/O error.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand};

use fractel::approx::{build_sqrt_ifs, error_bound, relative_error_profile, SqrtMode};
use fractel::digit::{
    eval_digits, eval_digits_float, horner_compare, DigitNumber, FloatPrecision, JTable,
};
use fractel::error::FractelError;
use fractel::ifs::{rb_fixed_point, PiecewiseSample, DEFAULT_SAMPLE_GRID};
use fractel::poly::{basis_fractel, semigroup_member, stochastic_check, NamedBasis, SpaceKind};
use fractel::rational::{
    format_rational, parse_rational, rational_to_decimal, rational_to_f64, Rational,
};
use fractel::textio::{find_builtin_fixture, fmt_g17, parse_fixture_table, FixtureRecord};
use fractel::{verify_fractel, Interval, ScalarFunction};

#[derive(Parser)]
#[command(name = "fractel", version, about = "Self-referential function toolkit")]
struct Cli {
    /// Seed for randomized checks. Present for reproducibility of scripted
    /// runs; the built-in subcommands are deterministic regardless.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Verify a built-in fixture (ex4_1, ex4_4, ex4_5, ex4_6, sqrt_w1, ...)
    /// or every record of a fixture file.
    Verify {
        fixture: String,
        #[arg(long, default_value_t = 1000)]
        grid: usize,
        #[arg(long, default_value_t = 1e-10)]
        tol: f64,
        /// Output path (default: standard output).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Reconstruct a target function and emit its relative-error profile as
    /// CSV, with a trailing summary comment line.
    Approx {
        /// Target function; `sqrt` is the one that ships.
        target: String,
        /// Offset handling: exact, midpoint, mean, or trapezoid.
        #[arg(long, default_value = "midpoint")]
        rule: String,
        /// Contraction factor of the two refit pieces.
        #[arg(long, default_value_t = 0.5)]
        sigma: f64,
        #[arg(long, default_value_t = 60)]
        iterations: usize,
        /// Number of log-spaced profile points.
        #[arg(long, default_value_t = 1000)]
        grid: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Print the exact matrix of the substitution x -> sigma x + tau on a
    /// named polynomial basis (monomial, hat, chebyshev3, bspline3).
    Polybasis {
        basis: String,
        /// Rational slope, e.g. 1/2 or 0.5 (decimals are exact).
        sigma: String,
        /// Rational offset.
        tau: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Evaluate a polynomial at a base-B digit expansion, one matrix-vector
    /// product per digit.
    Polyeval {
        /// Comma-separated rational coefficients, lowest degree first.
        coeffs: String,
        /// Digit expansion such as 1.23 (single integer digit).
        digits: String,
        #[arg(long, default_value_t = 10)]
        base: u32,
        /// exact or float.
        #[arg(long, default_value = "exact")]
        mode: String,
        /// Fractional digits of the decimal rendering.
        #[arg(long, default_value_t = 17)]
        decimals: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Compare Horner and digit evaluation on polynomials from a file
    /// (per line: comma-separated rational coefficients, then the digit
    /// string), reporting relative errors and median evaluation times.
    Bench {
        poly_file: PathBuf,
        #[arg(long, default_value_t = 1000)]
        repetitions: usize,
        /// f64 or f32 (f32 rounds every intermediate to 24-bit significand).
        #[arg(long, default_value = "f64")]
        precision: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

enum CliError {
    Usage(String),
    Io(std::io::Error),
}

impl From<FractelError> for CliError {
    fn from(e: FractelError) -> Self {
        CliError::Usage(e.to_string())
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e)
    }
}

fn write_out(out: &Option<PathBuf>, content: &str) -> Result<(), CliError> {
    match out {
        Some(path) => std::fs::write(path, content)?,
        None => print!("{content}"),
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(code) => code,
        Err(CliError::Usage(message)) => {
            eprintln!("error: {message}");
            ExitCode::from(2)
        }
        Err(CliError::Io(e)) => {
            eprintln!("i/o error: {e}");
            ExitCode::from(3)
        }
    }
}

fn run(command: Command) -> Result<ExitCode, CliError> {
    match command {
        Command::Verify {
            fixture,
            grid,
            tol,
            out,
        } => cmd_verify(&fixture, grid, tol, &out),
        Command::Approx {
            target,
            rule,
            sigma,
            iterations,
            grid,
            out,
        } => cmd_approx(&target, &rule, sigma, iterations, grid, &out),
        Command::Polybasis {
            basis,
            sigma,
            tau,
            out,
        } => cmd_polybasis(&basis, &sigma, &tau, &out),
        Command::Polyeval {
            coeffs,
            digits,
            base,
            mode,
            decimals,
            out,
        } => cmd_polyeval(&coeffs, &digits, base, &mode, decimals, &out),
        Command::Bench {
            poly_file,
            repetitions,
            precision,
            out,
        } => cmd_bench(&poly_file, repetitions, &precision, &out),
    }
}

fn load_fixtures(fixture: &str) -> Result<Vec<FixtureRecord>, CliError> {
    if Path::new(fixture).is_file() {
        let text = std::fs::read_to_string(fixture)?;
        Ok(parse_fixture_table(&text)?)
    } else {
        Ok(vec![find_builtin_fixture(fixture)?])
    }
}

fn cmd_verify(
    fixture: &str,
    grid: usize,
    tol: f64,
    out: &Option<PathBuf>,
) -> Result<ExitCode, CliError> {
    let records = load_fixtures(fixture)?;
    let mut report = String::new();
    let mut all_pass = true;
    for rec in &records {
        let rep = verify_fractel(&rec.to_fractel()?, &rec.witness()?, grid, tol)?;
        all_pass &= rep.pass;
        let _ = writeln!(
            report,
            "{} max_residual={} {} (grid={grid}, tol={tol:e})",
            rec.name,
            fmt_g17(rep.max_residual),
            if rep.pass { "PASS" } else { "FAIL" },
        );
    }
    write_out(out, &report)?;
    Ok(if all_pass {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    })
}

fn cmd_approx(
    target: &str,
    rule: &str,
    sigma: f64,
    iterations: usize,
    grid: usize,
    out: &Option<PathBuf>,
) -> Result<ExitCode, CliError> {
    if target != "sqrt" {
        return Err(CliError::Usage(format!("unknown approximation target `{target}`")));
    }
    let mode = SqrtMode::parse(rule)
        .ok_or_else(|| CliError::Usage(format!("unknown rule `{rule}`")))?;
    let sys = build_sqrt_ifs(sigma, sigma, mode)?;
    let init = PiecewiseSample::zeros(Interval::unit(), DEFAULT_SAMPLE_GRID);
    let (_, rb) = rb_fixed_point(&sys.ifs, &init, iterations.max(1))?;
    let reference = ScalarFunction::sqrt(Interval::unit());
    let profile = relative_error_profile(&sys.ifs, &reference, grid);
    let bound = error_bound(&sys.lambda_deviations, sys.s_max)?;

    let first_change = rb.sup_changes.first().copied().unwrap_or(0.0);
    let last_change = rb.sup_changes.last().copied().unwrap_or(0.0);
    let ratio_estimate = if rb.sup_changes.len() >= 2 && first_change > 0.0 {
        (last_change / first_change).powf(1.0 / (rb.sup_changes.len() - 1) as f64)
    } else {
        0.0
    };
    let summary = format!(
        "# max_abs_e={} bound={} iterations={} final_sup_change={} ratio_estimate={}\n",
        fmt_g17(profile.max_abs),
        fmt_g17(bound),
        rb.iterations_run,
        fmt_g17(last_change),
        fmt_g17(ratio_estimate),
    );

    let mut csv = fractel::textio::profile_to_csv(&profile.rows);
    csv.push_str(&summary);
    write_out(out, &csv)?;
    if out.is_some() {
        print!("{summary}");
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_polybasis(
    basis: &str,
    sigma: &str,
    tau: &str,
    out: &Option<PathBuf>,
) -> Result<ExitCode, CliError> {
    let basis = NamedBasis::parse(basis)
        .ok_or_else(|| CliError::Usage(format!("unknown basis `{basis}`")))?;
    let sigma = parse_rational(sigma)?;
    let tau = parse_rational(tau)?;
    // the map must stay inside [0, 1] for the basis identity to make sense
    semigroup_member(&sigma, &tau, SpaceKind::PolyK)?;
    let bf = basis_fractel(&basis.basis_change(), &sigma, &tau)?;
    let mut text = String::new();
    for row in bf.matrix().to_text_rows() {
        text.push_str(&row);
        text.push('\n');
    }
    let _ = writeln!(text, "stochastic: {}", stochastic_check(bf.matrix()));
    write_out(out, &text)?;
    Ok(ExitCode::SUCCESS)
}

fn parse_coeffs(coeffs: &str) -> Result<Vec<Rational>, CliError> {
    coeffs
        .split(',')
        .map(|t| parse_rational(t).map_err(CliError::from))
        .collect()
}

fn cmd_polyeval(
    coeffs: &str,
    digits: &str,
    base: u32,
    mode: &str,
    decimals: usize,
    out: &Option<PathBuf>,
) -> Result<ExitCode, CliError> {
    let coeffs = parse_coeffs(coeffs)?;
    let x = DigitNumber::parse(digits, base)?;
    let table = JTable::new(base, coeffs.len().saturating_sub(1))?;
    let mut text = String::new();
    match mode {
        "exact" => {
            let state = eval_digits(&table, &coeffs, &x)?;
            let _ = writeln!(text, "value = {}", format_rational(state.value()));
            let _ = writeln!(
                text,
                "decimal = {}",
                rational_to_decimal(state.value(), decimals)
            );
            let rendered: Vec<String> = state.vector().iter().map(format_rational).collect();
            let _ = writeln!(text, "state = {}", rendered.join(" "));
        }
        "float" => {
            let coeffs_f: Vec<f64> = coeffs.iter().map(rational_to_f64).collect();
            let state = eval_digits_float(&table, &coeffs_f, &x, FloatPrecision::F64Like)?;
            let _ = writeln!(text, "value = {}", fmt_g17(state.value()));
            let rendered: Vec<String> = state.vector().iter().map(|v| fmt_g17(*v)).collect();
            let _ = writeln!(text, "state = {}", rendered.join(" "));
        }
        other => {
            return Err(CliError::Usage(format!("unknown mode `{other}`")));
        }
    }
    write_out(out, &text)?;
    Ok(ExitCode::SUCCESS)
}

struct BenchLine {
    id: String,
    coeffs: Vec<Rational>,
    digits: DigitNumber,
}

fn parse_bench_file(path: &Path) -> Result<Vec<BenchLine>, CliError> {
    let text = std::fs::read_to_string(path)?;
    let mut out = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let mut parts = line.split_whitespace();
        let coeffs_text = parts
            .next()
            .ok_or_else(|| usage_at(line_no, "missing coefficients"))?;
        let digits_text = parts
            .next()
            .ok_or_else(|| usage_at(line_no, "missing digit string"))?;
        if let Some(extra) = parts.next() {
            return Err(usage_at(line_no, format!("trailing token `{extra}`")));
        }
        let coeffs = parse_coeffs(coeffs_text)
            .map_err(|e| rewrap_at(line_no, e))?;
        let digits = DigitNumber::parse(digits_text, 10).map_err(|e| usage_at(line_no, e.to_string()))?;
        out.push(BenchLine {
            id: format!("p{line_no}"),
            coeffs,
            digits,
        });
    }
    Ok(out)
}

fn usage_at(line: usize, message: impl std::fmt::Display) -> CliError {
    CliError::Usage(format!("line {line}: {message}"))
}

fn rewrap_at(line: usize, e: CliError) -> CliError {
    match e {
        CliError::Usage(m) => usage_at(line, m),
        other => other,
    }
}

/// Median nanoseconds per evaluation over eight fixed chunks.
fn median_ns_per_eval(repetitions: usize, mut eval: impl FnMut()) -> f64 {
    let chunks = 8usize;
    let per_chunk = (repetitions / chunks).max(1);
    let mut means: Vec<f64> = (0..chunks)
        .map(|_| {
            let start = Instant::now();
            for _ in 0..per_chunk {
                eval();
            }
            start.elapsed().as_nanos() as f64 / per_chunk as f64
        })
        .collect();
    means.sort_by(f64::total_cmp);
    0.5 * (means[chunks / 2 - 1] + means[chunks / 2])
}

fn cmd_bench(
    poly_file: &Path,
    repetitions: usize,
    precision: &str,
    out: &Option<PathBuf>,
) -> Result<ExitCode, CliError> {
    let precision = match precision {
        "f64" => FloatPrecision::F64Like,
        "f32" => FloatPrecision::F32Like,
        other => {
            return Err(CliError::Usage(format!("unknown precision `{other}`")));
        }
    };
    let lines = parse_bench_file(poly_file)?;
    let mut csv = String::from("poly_id,x,method,value,rel_err,ns_per_eval\n");
    for line in &lines {
        let degree = line.coeffs.len().saturating_sub(1);
        let table = JTable::new(10, degree)?;
        let report = horner_compare(&table, &line.coeffs, &line.digits, precision)?;
        let coeffs_f: Vec<f64> = line.coeffs.iter().map(rational_to_f64).collect();
        let xf = line.digits.to_f64();

        let ns_exact = median_ns_per_eval(repetitions, || {
            let _ = eval_digits(&table, &line.coeffs, &line.digits);
        });
        let ns_horner = median_ns_per_eval(repetitions, || {
            let _ = std::hint::black_box(fractel::digit::horner_at_precision(
                std::hint::black_box(&coeffs_f),
                std::hint::black_box(xf),
                precision,
            ));
        });
        let ns_ifs = median_ns_per_eval(repetitions, || {
            let _ = eval_digits_float(&table, &coeffs_f, &line.digits, precision);
        });

        let x_text = line.digits.to_string();
        let _ = writeln!(
            csv,
            "{},{},exact,{},0,{}",
            line.id,
            x_text,
            format_rational(&report.exact_value),
            fmt_g17(ns_exact)
        );
        let _ = writeln!(
            csv,
            "{},{},horner,{},{},{}",
            line.id,
            x_text,
            fmt_g17(report.horner_value),
            fmt_g17(report.horner_rel_err),
            fmt_g17(ns_horner)
        );
        let _ = writeln!(
            csv,
            "{},{},digit_ifs,{},{},{}",
            line.id,
            x_text,
            fmt_g17(report.digit_ifs_value),
            fmt_g17(report.ifs_rel_err),
            fmt_g17(ns_ifs)
        );
    }
    write_out(out, &csv)?;
    Ok(ExitCode::SUCCESS)
}
