//! Command-line driver for the discretization experiments: quadrature
//! convergence orders, σ-function positivity audits, and dominant-eigenpair
//! studies. Every command validates its parameters first, renders the whole
//! output in memory and writes it in one step, so identical invocations
//! produce byte-identical files.
//!
//! Exit codes: 0 on success (scientific pass/fail is data, not an exit
//! status), 2 for usage errors, 3 for runtime failures.

use std::fmt::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use fredholm::{
    dominant_eigenpair, exact_laplace_dominant, pl_galerkin_scheme, run_eigen, uniform_grid,
    CollocationScheme, KernelFamily, MatrixKernel, MethodKind, MethodSpec, NystromOperator,
    OrthantCone, QuadratureRule, RuleFamily, ScalarKernel,
};

#[derive(Parser)]
#[command(
    name = "fredholm",
    version,
    about = "Discretize Fredholm integral operators, audit positivity, study dominant eigenpairs"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Empirical convergence order of a composite quadrature rule.
    Quad(QuadArgs),
    /// σ-function dump and positivity audit of a projection scheme.
    Audit(AuditArgs),
    /// Dominant eigenpair of a discretized kernel operator.
    Eigen(EigenArgs),
}

#[derive(Args)]
struct QuadArgs {
    /// Rule family: midpoint|trapezoid|milne|gauss6
    #[arg(long)]
    rule: Option<String>,
    /// Integrand: exp|sin|runge
    #[arg(long = "fn")]
    function: Option<String>,
    /// Left interval bound (default 0)
    #[arg(long, allow_negative_numbers = true)]
    a: Option<f64>,
    /// Right interval bound (default 1)
    #[arg(long, allow_negative_numbers = true)]
    b: Option<f64>,
    /// Comma-separated subinterval counts, strictly increasing
    #[arg(long = "n-list", value_delimiter = ',')]
    n_list: Vec<usize>,
    #[arg(long)]
    out: Option<PathBuf>,
    /// csv|json
    #[arg(long)]
    format: Option<String>,
    /// key=value file overriding the flags
    #[arg(long)]
    config: Option<PathBuf>,
}

#[derive(Args)]
struct AuditArgs {
    /// Scheme: hat|lagrange|quad-bspline|sinc|pl-galerkin
    #[arg(long)]
    scheme: Option<String>,
    /// Number of grid subintervals
    #[arg(long)]
    n: Option<usize>,
    /// Sample count for the σ minimum scan
    #[arg(long)]
    samples: Option<usize>,
    /// Left interval bound (default -1)
    #[arg(long, allow_negative_numbers = true)]
    a: Option<f64>,
    /// Right interval bound (default 1)
    #[arg(long, allow_negative_numbers = true)]
    b: Option<f64>,
    /// sinc strip parameter in (0, pi)
    #[arg(long)]
    delta: Option<f64>,
    /// sinc growth parameter
    #[arg(long = "alpha-growth")]
    alpha_growth: Option<f64>,
    /// Slack for the pass verdict
    #[arg(long)]
    tol: Option<f64>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    format: Option<String>,
    #[arg(long)]
    config: Option<PathBuf>,
}

#[derive(Args)]
struct EigenArgs {
    /// nystrom-{midpoint,trapezoid,milne,gauss6}|collocation-hat|collocation-lagrange|collocation-cubicpp|galerkin-pc
    #[arg(long)]
    method: Option<String>,
    /// gauss|cauchy|laplace|exp-sqrt|top-hat|tent|constant|laplace-system
    #[arg(long)]
    kernel: Option<String>,
    /// Dispersal rate (first component for laplace-system)
    #[arg(long)]
    alpha: Option<f64>,
    /// Second dispersal rate of laplace-system
    #[arg(long)]
    alpha2: Option<f64>,
    /// Value of the constant kernel
    #[arg(long, allow_negative_numbers = true)]
    value: Option<f64>,
    /// Left interval bound (default -1)
    #[arg(long, allow_negative_numbers = true)]
    a: Option<f64>,
    /// Right interval bound (default 1)
    #[arg(long, allow_negative_numbers = true)]
    b: Option<f64>,
    /// Symmetric interval [-L/2, L/2]; excludes --a/--b
    #[arg(long = "L")]
    length: Option<f64>,
    /// Resolution: node count for Nystrom methods, subintervals otherwise
    #[arg(long)]
    n: Option<usize>,
    /// Ascending resolutions for a convergence study
    #[arg(long = "n-list", value_delimiter = ',')]
    n_list: Vec<usize>,
    /// Reference eigenvalue ("auto" solves the Laplace-kernel ground truth)
    #[arg(long, allow_negative_numbers = true)]
    exact: Option<String>,
    /// Eigensolver tolerance
    #[arg(long)]
    tol: Option<f64>,
    /// Sample the Nystrom eigenfunction interpolant into this CSV
    #[arg(long = "interpolate-out")]
    interpolate_out: Option<PathBuf>,
    #[arg(long = "interpolate-samples")]
    interpolate_samples: Option<usize>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    format: Option<String>,
    #[arg(long)]
    config: Option<PathBuf>,
}

enum CliError {
    Usage(String),
    Runtime(String),
}

type CliResult<T> = Result<T, CliError>;

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Quad(args) => run_quad(args),
        Command::Audit(args) => run_audit(args),
        Command::Eigen(args) => run_eigen_cmd(args),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(CliError::Runtime(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(3)
        }
    }
}

/// 17 significant digits: round-trip exact for f64.
fn fmt17(v: f64) -> String {
    format!("{v:.16e}")
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum OutputFormat {
    Csv,
    Json,
}

fn parse_format(s: Option<&str>) -> CliResult<OutputFormat> {
    match s.unwrap_or("csv") {
        "csv" => Ok(OutputFormat::Csv),
        "json" => Ok(OutputFormat::Json),
        other => Err(usage(format!(
            "unknown format '{other}' (expected csv|json)"
        ))),
    }
}

/// Reads a `key=value` file; '#' starts a comment.
fn read_config(path: &PathBuf) -> CliResult<Vec<(String, String)>> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| usage(format!("cannot read config {}: {e}", path.display())))?;
    let mut pairs = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            return Err(usage(format!(
                "config line {} is not key=value: '{line}'",
                lineno + 1
            )));
        };
        pairs.push((key.trim().to_string(), value.trim().to_string()));
    }
    Ok(pairs)
}

fn parse_as<T: std::str::FromStr>(key: &str, value: &str) -> CliResult<T> {
    value
        .parse()
        .map_err(|_| usage(format!("config value for '{key}' is invalid: '{value}'")))
}

fn parse_n_list(key: &str, value: &str) -> CliResult<Vec<usize>> {
    value
        .split(',')
        .map(|tok| parse_as::<usize>(key, tok.trim()))
        .collect()
}

fn write_output(path: Option<&PathBuf>, content: &str) -> CliResult<()> {
    match path {
        Some(path) => std::fs::write(path, content)
            .map_err(|e| CliError::Runtime(format!("cannot write {}: {e}", path.display()))),
        None => {
            print!("{content}");
            Ok(())
        }
    }
}

// ---------------------------------------------------------------- quad ----

#[derive(Serialize)]
struct QuadRow {
    n: usize,
    h: f64,
    error: f64,
}

#[derive(Serialize)]
struct QuadReport {
    rule: String,
    function: String,
    a: f64,
    b: f64,
    rows: Vec<QuadRow>,
    slope: Option<f64>,
}

fn run_quad(mut args: QuadArgs) -> CliResult<()> {
    if let Some(path) = args.config.clone() {
        for (key, value) in read_config(&path)? {
            match key.as_str() {
                "rule" => args.rule = Some(value),
                "fn" => args.function = Some(value),
                "a" => args.a = Some(parse_as(&key, &value)?),
                "b" => args.b = Some(parse_as(&key, &value)?),
                "n-list" => args.n_list = parse_n_list(&key, &value)?,
                "out" => args.out = Some(PathBuf::from(value)),
                "format" => args.format = Some(value),
                other => return Err(usage(format!("unknown config key '{other}' for quad"))),
            }
        }
    }

    let rule: RuleFamily = args
        .rule
        .as_deref()
        .ok_or_else(|| usage("--rule is required"))?
        .parse()
        .map_err(|e| usage(format!("{e}")))?;
    let function = args
        .function
        .as_deref()
        .ok_or_else(|| usage("--fn is required"))?;
    let a = args.a.unwrap_or(0.0);
    let b = args.b.unwrap_or(1.0);
    if !(a < b) {
        return Err(usage(format!("need a < b, got [{a}, {b}]")));
    }
    let (f, exact): (fn(f64) -> f64, f64) = match function {
        "exp" => (f64::exp, b.exp() - a.exp()),
        "sin" => (f64::sin, a.cos() - b.cos()),
        "runge" => (
            |x| 1.0 / (1.0 + 25.0 * x * x),
            ((5.0 * b).atan() - (5.0 * a).atan()) / 5.0,
        ),
        other => {
            return Err(usage(format!(
                "unknown integrand '{other}' (expected exp|sin|runge)"
            )))
        }
    };
    if args.n_list.len() < 3 || args.n_list.windows(2).any(|w| w[0] >= w[1]) {
        return Err(usage(
            "--n-list must be strictly increasing with at least 3 entries",
        ));
    }
    let format = parse_format(args.format.as_deref())?;

    let mut rows = Vec::new();
    for &n in &args.n_list {
        let quad = QuadratureRule::compose(rule, a, b, n).map_err(|e| usage(format!("{e}")))?;
        let approx = quad
            .integrate(f)
            .map_err(|e| CliError::Runtime(format!("{e}")))?;
        rows.push(QuadRow {
            n,
            h: quad.step(),
            error: (approx - exact).abs(),
        });
    }
    let slope = match fredholm::estimate_order(rule, f, exact, a, b, &args.n_list) {
        Ok(slope) => Some(slope),
        Err(fredholm::Error::Saturated) => {
            eprintln!("note: all errors at rounding level; no slope fitted");
            None
        }
        Err(e) => return Err(CliError::Runtime(format!("{e}"))),
    };

    let content = match format {
        OutputFormat::Csv => {
            let mut out = String::from("n,h,error\n");
            for row in &rows {
                let _ = writeln!(out, "{},{},{}", row.n, fmt17(row.h), fmt17(row.error));
            }
            match slope {
                Some(s) => {
                    let _ = writeln!(out, "# slope,{}", fmt17(s));
                }
                None => out.push_str("# slope,\n"),
            }
            out
        }
        OutputFormat::Json => {
            let report = QuadReport {
                rule: rule.to_string(),
                function: function.to_string(),
                a,
                b,
                rows,
                slope,
            };
            serde_json::to_string_pretty(&report).map_err(|e| CliError::Runtime(format!("{e}")))?
                + "\n"
        }
    };
    write_output(args.out.as_ref(), &content)
}

// --------------------------------------------------------------- audit ----

#[derive(Serialize)]
struct AuditReport {
    scheme: String,
    n: usize,
    samples: usize,
    min_value: f64,
    argmin: f64,
    passes: bool,
    sigma: Vec<SigmaSample>,
}

#[derive(Serialize)]
struct SigmaSample {
    x: f64,
    values: Vec<f64>,
}

fn run_audit(mut args: AuditArgs) -> CliResult<()> {
    if let Some(path) = args.config.clone() {
        for (key, value) in read_config(&path)? {
            match key.as_str() {
                "scheme" => args.scheme = Some(value),
                "n" => args.n = Some(parse_as(&key, &value)?),
                "samples" => args.samples = Some(parse_as(&key, &value)?),
                "a" => args.a = Some(parse_as(&key, &value)?),
                "b" => args.b = Some(parse_as(&key, &value)?),
                "delta" => args.delta = Some(parse_as(&key, &value)?),
                "alpha-growth" => args.alpha_growth = Some(parse_as(&key, &value)?),
                "tol" => args.tol = Some(parse_as(&key, &value)?),
                "out" => args.out = Some(PathBuf::from(value)),
                "format" => args.format = Some(value),
                other => return Err(usage(format!("unknown config key '{other}' for audit"))),
            }
        }
    }

    let scheme_name = args
        .scheme
        .as_deref()
        .ok_or_else(|| usage("--scheme is required"))?;
    let n = args.n.ok_or_else(|| usage("--n is required"))?;
    let samples = args.samples.unwrap_or(2000);
    let a = args.a.unwrap_or(-1.0);
    let b = args.b.unwrap_or(1.0);
    let delta = args.delta.unwrap_or(1.0);
    let alpha_growth = args.alpha_growth.unwrap_or(1.0);
    let tol = args.tol.unwrap_or(1e-12);
    if !(a < b) {
        return Err(usage(format!("need a < b, got [{a}, {b}]")));
    }
    if samples < 2 {
        return Err(usage("--samples must be at least 2"));
    }
    let format = parse_format(args.format.as_deref())?;

    let sigma_row: Box<dyn Fn(f64) -> Vec<f64>> = match scheme_name {
        "hat" => {
            let scheme =
                CollocationScheme::hat(uniform_grid(a, b, n)).map_err(|e| usage(format!("{e}")))?;
            Box::new(move |x| scheme.sigma_row(x))
        }
        "lagrange" => {
            let scheme = CollocationScheme::lagrange(uniform_grid(a, b, n))
                .map_err(|e| usage(format!("{e}")))?;
            Box::new(move |x| scheme.sigma_row(x))
        }
        "quad-bspline" => {
            let scheme =
                CollocationScheme::quad_bspline(a, b, n).map_err(|e| usage(format!("{e}")))?;
            Box::new(move |x| scheme.sigma_row(x))
        }
        "sinc" => {
            let scheme = CollocationScheme::sinc(a, b, n, delta, alpha_growth)
                .map_err(|e| usage(format!("{e}")))?;
            Box::new(move |x| scheme.sigma_row(x))
        }
        "pl-galerkin" => {
            let scheme =
                pl_galerkin_scheme(uniform_grid(a, b, n)).map_err(|e| usage(format!("{e}")))?;
            Box::new(move |x| scheme.sigma_row(x))
        }
        other => {
            return Err(usage(format!(
                "unknown scheme '{other}' (expected hat|lagrange|quad-bspline|sinc|pl-galerkin)"
            )))
        }
    };

    let mut rows = Vec::with_capacity(samples);
    let mut min_value = f64::INFINITY;
    let mut argmin = a;
    for s in 0..samples {
        let x = a + (b - a) * s as f64 / (samples - 1) as f64;
        let values = sigma_row(x);
        let row_min = values.iter().copied().fold(f64::INFINITY, f64::min);
        if row_min < min_value {
            min_value = row_min;
            argmin = x;
        }
        rows.push(SigmaSample { x, values });
    }
    let passes = min_value >= -tol;

    let content = match format {
        OutputFormat::Csv => {
            let width = rows.first().map_or(0, |r| r.values.len());
            let mut out = String::from("x");
            for i in 1..=width {
                let _ = write!(out, ",sigma_{i}");
            }
            out.push('\n');
            for row in &rows {
                out.push_str(&fmt17(row.x));
                for v in &row.values {
                    out.push(',');
                    out.push_str(&fmt17(*v));
                }
                out.push('\n');
            }
            let _ = writeln!(out, "# min_value,argmin,passes");
            let _ = writeln!(out, "# {},{},{passes}", fmt17(min_value), fmt17(argmin));
            out
        }
        OutputFormat::Json => {
            let report = AuditReport {
                scheme: scheme_name.to_string(),
                n,
                samples,
                min_value,
                argmin,
                passes,
                sigma: rows,
            };
            serde_json::to_string_pretty(&report).map_err(|e| CliError::Runtime(format!("{e}")))?
                + "\n"
        }
    };
    write_output(args.out.as_ref(), &content)?;
    // summary line on stdout regardless of where the dump went
    if args.out.is_some() {
        println!("min_value,argmin,passes");
        println!("{},{},{passes}", fmt17(min_value), fmt17(argmin));
    }
    Ok(())
}

// --------------------------------------------------------------- eigen ----

#[derive(Serialize)]
struct EigenRow {
    method: String,
    n: usize,
    lambda_hat: Option<f64>,
    error: Option<f64>,
    sign_changes: Option<usize>,
    positivity_pass: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    failure: Option<String>,
}

#[derive(Serialize)]
struct EigenCliReport {
    method: String,
    kernel: String,
    a: f64,
    b: f64,
    tol: f64,
    exact: Option<f64>,
    rows: Vec<EigenRow>,
    slope: Option<f64>,
}

fn run_eigen_cmd(mut args: EigenArgs) -> CliResult<()> {
    if let Some(path) = args.config.clone() {
        for (key, value) in read_config(&path)? {
            match key.as_str() {
                "method" => args.method = Some(value),
                "kernel" => args.kernel = Some(value),
                "alpha" => args.alpha = Some(parse_as(&key, &value)?),
                "alpha2" => args.alpha2 = Some(parse_as(&key, &value)?),
                "value" => args.value = Some(parse_as(&key, &value)?),
                "a" => args.a = Some(parse_as(&key, &value)?),
                "b" => args.b = Some(parse_as(&key, &value)?),
                "L" => args.length = Some(parse_as(&key, &value)?),
                "n" => args.n = Some(parse_as(&key, &value)?),
                "n-list" => args.n_list = parse_n_list(&key, &value)?,
                "exact" => args.exact = Some(value),
                "tol" => args.tol = Some(parse_as(&key, &value)?),
                "interpolate-out" => args.interpolate_out = Some(PathBuf::from(value)),
                "interpolate-samples" => args.interpolate_samples = Some(parse_as(&key, &value)?),
                "out" => args.out = Some(PathBuf::from(value)),
                "format" => args.format = Some(value),
                other => return Err(usage(format!("unknown config key '{other}' for eigen"))),
            }
        }
    }

    let kind: MethodKind = args
        .method
        .as_deref()
        .ok_or_else(|| usage("--method is required"))?
        .parse()
        .map_err(|e| usage(format!("{e}")))?;
    let kernel_name = args
        .kernel
        .as_deref()
        .ok_or_else(|| usage("--kernel is required"))?;
    let alpha = args.alpha.unwrap_or(1.0);
    let alpha2 = args.alpha2.unwrap_or(2.0);
    let (a, b) = match (args.length, args.a, args.b) {
        (Some(_), Some(_), _) | (Some(_), _, Some(_)) => {
            return Err(usage("--L excludes --a/--b"));
        }
        (Some(l), None, None) => {
            if !(l > 0.0) {
                return Err(usage("--L must be positive"));
            }
            (-0.5 * l, 0.5 * l)
        }
        (None, a, b) => (a.unwrap_or(-1.0), b.unwrap_or(1.0)),
    };
    if !(a < b) {
        return Err(usage(format!("need a < b, got [{a}, {b}]")));
    }
    let tol = args.tol.unwrap_or(1e-5);
    if !(tol > 0.0) {
        return Err(usage("--tol must be positive"));
    }

    let (kernel, cone) = build_kernel(kernel_name, alpha, alpha2, args.value)?;
    let exact = match args.exact.as_deref() {
        None => None,
        Some("auto") => Some(auto_exact(kernel_name, b - a, alpha, alpha2)?),
        Some(text) => Some(
            text.parse::<f64>()
                .map_err(|_| usage(format!("--exact must be 'auto' or a number, got '{text}'")))?,
        ),
    };

    let n_values: Vec<usize> = match (args.n, args.n_list.is_empty()) {
        (Some(_), false) => return Err(usage("--n excludes --n-list")),
        (Some(n), true) => vec![n],
        (None, false) => {
            if args.n_list.windows(2).any(|w| w[0] >= w[1]) {
                return Err(usage("--n-list must be strictly increasing"));
            }
            args.n_list.clone()
        }
        (None, true) => return Err(usage("one of --n or --n-list is required")),
    };
    let format = parse_format(args.format.as_deref())?;

    let interpolate_samples = args.interpolate_samples.unwrap_or(1000);
    if args.interpolate_out.is_some() {
        if !matches!(kind, MethodKind::Nystrom(_)) {
            return Err(usage("--interpolate-out needs a nystrom method"));
        }
        if n_values.len() != 1 {
            return Err(usage("--interpolate-out needs a single --n"));
        }
        if interpolate_samples < 2 {
            return Err(usage("--interpolate-samples must be at least 2"));
        }
    }

    let mut rows = Vec::new();
    for &n in &n_values {
        let method = MethodSpec::new(kind, n);
        match run_eigen(&method, &kernel, &cone, a, b, exact, tol) {
            Ok(report) => rows.push(EigenRow {
                method: kind.to_string(),
                n,
                lambda_hat: Some(report.lambda_hat),
                error: report.error_vs_exact,
                sign_changes: Some(report.sign_changes),
                positivity_pass: Some(report.positivity_pass),
                failure: None,
            }),
            Err(fredholm::Error::NoConvergence {
                iterations,
                last_estimate,
            }) => {
                eprintln!(
                    "note: n={n} did not converge after {iterations} iterations (last estimate {last_estimate:e})"
                );
                rows.push(EigenRow {
                    method: kind.to_string(),
                    n,
                    lambda_hat: None,
                    error: None,
                    sign_changes: None,
                    positivity_pass: None,
                    failure: Some("no convergence".into()),
                });
            }
            Err(e) => return Err(usage(format!("{e}"))),
        }
    }

    let slope = if n_values.len() >= 2 {
        let points: Vec<(f64, f64)> = rows
            .iter()
            .filter_map(|row| {
                row.error
                    .filter(|&e| e > 0.0)
                    .map(|e| ((1.0 / row.n as f64).ln(), e.ln()))
            })
            .collect();
        if points.len() >= 2 {
            Some(least_squares_slope(&points))
        } else {
            None
        }
    } else {
        None
    };

    let content = match format {
        OutputFormat::Csv => {
            let mut out = String::from("method,n,lambda_hat,error,sign_changes,positivity_pass\n");
            for row in &rows {
                let _ = writeln!(
                    out,
                    "{},{},{},{},{},{}",
                    row.method,
                    row.n,
                    row.lambda_hat.map(fmt17).unwrap_or_default(),
                    row.error.map(fmt17).unwrap_or_default(),
                    row.sign_changes.map(|s| s.to_string()).unwrap_or_default(),
                    row.positivity_pass
                        .map(|p| p.to_string())
                        .unwrap_or_default(),
                );
            }
            if n_values.len() >= 2 {
                match slope {
                    Some(s) => {
                        let _ = writeln!(out, "# slope,{}", fmt17(s));
                    }
                    None => out.push_str("# slope,\n"),
                }
            }
            out
        }
        OutputFormat::Json => {
            let report = EigenCliReport {
                method: kind.to_string(),
                kernel: kernel_name.to_string(),
                a,
                b,
                tol,
                exact,
                rows,
                slope,
            };
            serde_json::to_string_pretty(&report).map_err(|e| CliError::Runtime(format!("{e}")))?
                + "\n"
        }
    };
    write_output(args.out.as_ref(), &content)?;

    if let Some(path) = &args.interpolate_out {
        let MethodKind::Nystrom(family) = kind else {
            unreachable!("validated above");
        };
        let content =
            interpolant_csv(family, &kernel, a, b, n_values[0], interpolate_samples, tol)?;
        write_output(Some(path), &content)?;
    }
    Ok(())
}

/// Samples the Nyström eigenfunction interpolant on a uniform grid.
fn interpolant_csv(
    family: RuleFamily,
    kernel: &MatrixKernel,
    a: f64,
    b: f64,
    nodes: usize,
    samples: usize,
    tol: f64,
) -> CliResult<String> {
    let subintervals = family
        .subintervals_for_nodes(nodes)
        .map_err(|e| usage(format!("{e}")))?;
    let rule =
        QuadratureRule::compose(family, a, b, subintervals).map_err(|e| usage(format!("{e}")))?;
    let op = NystromOperator::assemble(kernel.clone(), rule)
        .map_err(|e| CliError::Runtime(format!("{e}")))?;
    let pair = dominant_eigenpair(&op.matrix, tol, 50_000)
        .map_err(|e| CliError::Runtime(format!("{e}")))?;
    let d = kernel.dim();
    let mut out = String::from("x");
    for i in 1..=d {
        let _ = write!(out, ",u_{i}");
    }
    out.push('\n');
    for s in 0..samples {
        let x = a + (b - a) * s as f64 / (samples - 1) as f64;
        let values = op
            .interpolate_eigenfunction(&pair, x)
            .map_err(|e| CliError::Runtime(format!("{e}")))?;
        out.push_str(&fmt17(x));
        for v in values {
            out.push(',');
            out.push_str(&fmt17(v));
        }
        out.push('\n');
    }
    Ok(out)
}

fn build_kernel(
    name: &str,
    alpha: f64,
    alpha2: f64,
    value: Option<f64>,
) -> CliResult<(MatrixKernel, OrthantCone)> {
    if name == "constant" {
        return Ok((
            MatrixKernel::scalar(ScalarKernel::constant(value.unwrap_or(1.0))),
            OrthantCone::all_plus(1),
        ));
    }
    if name == "laplace-system" {
        let coupling = ScalarKernel::new(|x, y| 1.0 + x * x + y * y, "1 + x^2 + y^2");
        let kernel = MatrixKernel::laplace_system(alpha, alpha2, coupling)
            .map_err(|e| usage(format!("{e}")))?;
        return Ok((kernel, OrthantCone::south_east()));
    }
    let family: KernelFamily = name.parse().map_err(|e| usage(format!("{e}")))?;
    let kernel = ScalarKernel::dispersal(family, alpha).map_err(|e| usage(format!("{e}")))?;
    Ok((MatrixKernel::scalar(kernel), OrthantCone::all_plus(1)))
}

fn auto_exact(kernel: &str, length: f64, alpha: f64, alpha2: f64) -> CliResult<f64> {
    match kernel {
        "laplace" => Ok(exact_laplace_dominant(length, alpha)
            .map_err(|e| usage(format!("{e}")))?
            .1),
        "laplace-system" => {
            let first = exact_laplace_dominant(length, alpha)
                .map_err(|e| usage(format!("{e}")))?
                .1;
            let second = exact_laplace_dominant(length, alpha2)
                .map_err(|e| usage(format!("{e}")))?
                .1;
            Ok(first.max(second))
        }
        other => Err(usage(format!(
            "--exact auto has a closed form only for the laplace kernels, not '{other}'"
        ))),
    }
}

fn least_squares_slope(points: &[(f64, f64)]) -> f64 {
    let n = points.len() as f64;
    let mean_x = points.iter().map(|p| p.0).sum::<f64>() / n;
    let mean_y = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = points.iter().map(|p| (p.0 - mean_x).powi(2)).sum();
    let sxy: f64 = points.iter().map(|p| (p.0 - mean_x) * (p.1 - mean_y)).sum();
    sxy / sxx
}
