#![allow(clippy::neg_cmp_op_on_partial_ord)]

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde::Serialize;
use serde_json::json;

use bmcarpet::carpet::has_uniform_fibres;
use bmcarpet::curve::{check_csv, curve, format_g12, to_csv_string};
use bmcarpet::oracle::{oracle_report, OracleReport, Theta};
use bmcarpet::{Carpet, CarpetSpec, DimPair, Error, RateFunction};

const UNIFORM_NOTICE: &str = "uniform vertical fibres: bounds coincide";

#[derive(Parser)]
#[command(name = "bmcarpet", version, about = "Intermediate-dimension bounds for Bedford-McMullen carpets")]
struct Cli {
    /// Emit JSON instead of text or CSV.
    #[arg(long, global = true)]
    json: bool,
    /// Write output to this file instead of stdout.
    #[arg(long, global = true, value_name = "PATH")]
    out: Option<PathBuf>,
    /// Number of theta grid points for `curve`.
    #[arg(long, global = true, default_value_t = 200)]
    grid: usize,
    /// Fill the upper3 column of `curve` (slower).
    #[arg(long, global = true)]
    include_three_scale: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Dimensions and carpet constants.
    Dims { spec: PathBuf },
    /// Bound curves over theta in [0, 1] as CSV.
    Curve { spec: PathBuf },
    /// Rate function values I(x) and maximizing lambda.
    Rate {
        spec: PathBuf,
        #[arg(long = "x", required = true, num_args = 1.., allow_negative_numbers = true)]
        x: Vec<f64>,
    },
    /// Exact Good/Bad counts and cover costs at level K.
    Oracle {
        spec: PathBuf,
        /// Theta in [log_n m, 1); `p/q` and plain decimals are taken as exact rationals.
        #[arg(long)]
        theta: String,
        #[arg(long = "K", alias = "k")]
        k: u64,
        /// Cost exponent; defaults to the two-scale upper bound at theta.
        #[arg(long)]
        s: Option<f64>,
        /// Threshold; defaults to the solution Delta0(theta).
        #[arg(long)]
        delta0: Option<f64>,
    },
    /// Validate the ordering hdim <= lower_env <= upper2 <= bdim in a curve CSV.
    Check { csv: PathBuf },
}

enum Failure {
    Lib(Error),
    CheckFailed,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Lib(e)
    }
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::InvalidSpec(_) | Error::Json(_) => 2,
        Error::Io(_) => 3,
        _ => 4,
    }
}

fn with_path(path: &Path, e: Error) -> Error {
    match e {
        Error::Io(io) => Error::Io(std::io::Error::new(io.kind(), format!("{}: {io}", path.display()))),
        other => other,
    }
}

fn load(path: &Path) -> Result<Carpet, Error> {
    Carpet::new(CarpetSpec::from_path(path).map_err(|e| with_path(path, e))?)
}

fn emit(out: Option<&Path>, text: &str) -> Result<(), Error> {
    match out {
        Some(p) => std::fs::write(p, text).map_err(|e| with_path(p, e.into()))?,
        None => print!("{text}"),
    }
    Ok(())
}

fn to_json<T: Serialize>(v: &T) -> Result<String, Error> {
    Ok(serde_json::to_string_pretty(v)? + "\n")
}

fn aligned(rows: &[(&str, String)]) -> String {
    let width = rows.iter().map(|(k, _)| k.len()).max().unwrap_or(0);
    rows.iter().fold(String::new(), |mut s, (k, v)| {
        let _ = writeln!(s, "{k:<width$}  {v}");
        s
    })
}

fn cmd_dims(cli: &Cli, spec: &Path) -> Result<String, Error> {
    let carpet = load(spec)?;
    let d = DimPair::of(&carpet);
    let uniform = has_uniform_fibres(&carpet);
    if cli.json {
        return to_json(&json!({
            "N": carpet.n_maps(),
            "M": carpet.n_cols(),
            "colCounts": carpet.col_counts(),
            "hausdorffDim": d.hausdorff,
            "boxDim": d.box_dim,
            "gap": d.gap(),
            "uniformFibres": uniform,
            "c": carpet.c(),
            "meanLogN": carpet.mean_log_n(),
            "r": carpet.r(),
            "notice": uniform.then_some(UNIFORM_NOTICE),
        }));
    }
    let counts = carpet.col_counts().iter().map(u64::to_string).collect::<Vec<_>>().join(",");
    let mut text = aligned(&[
        ("N", carpet.n_maps().to_string()),
        ("M", carpet.n_cols().to_string()),
        ("colCounts", counts),
        ("dim_H", format_g12(d.hausdorff)),
        ("dim_B", format_g12(d.box_dim)),
        ("gap", format_g12(d.gap())),
        ("uniformFibres", uniform.to_string()),
        ("c", format_g12(carpet.c())),
        ("meanLogN", format_g12(carpet.mean_log_n())),
        ("r", format_g12(carpet.r())),
    ]);
    if uniform {
        text.push_str(UNIFORM_NOTICE);
        text.push('\n');
    }
    Ok(text)
}

fn cmd_curve(cli: &Cli, spec: &Path) -> Result<String, Error> {
    let carpet = load(spec)?;
    let points = curve(&RateFunction::new(&carpet), cli.grid, cli.include_three_scale)?;
    if cli.json {
        to_json(&points)
    } else {
        to_csv_string(&points)
    }
}

fn cmd_rate(cli: &Cli, spec: &Path, xs: &[f64]) -> Result<String, Error> {
    let carpet = load(spec)?;
    let rate = RateFunction::new(&carpet);
    let evals = xs.iter().map(|&x| rate.eval(x)).collect::<Result<Vec<_>, _>>()?;
    if cli.json {
        return to_json(&evals);
    }
    let mut text = format!("{:<20}{:<20}{}\n", "x", "I(x)", "lambda*");
    for e in &evals {
        let _ = writeln!(text, "{:<20}{:<20}{}", format_g12(e.x), format_g12(e.value), format_g12(e.lambda_star));
    }
    Ok(text)
}

fn oracle_text(r: &OracleReport) -> String {
    let c = &r.counts;
    let big = |v: &Option<num_bigint::BigUint>| v.as_ref().map_or("-".to_string(), |x| x.to_string());
    aligned(&[
        ("theta", format!("{} ({})", r.theta, format_g12(r.theta_value))),
        ("K", c.scales.k.to_string()),
        ("L(K)", c.scales.level_k.to_string()),
        ("k2 = floor(K/theta)", c.scales.k2.to_string()),
        ("L(k2)", c.scales.level_k2.to_string()),
        ("window W", c.scales.window.to_string()),
        ("delta0", format_g12(c.delta0)),
        ("s", format_g12(r.cost.s)),
        ("log10 #D", format_g12(c.log10_bad_windows)),
        ("log10 #Good", format_g12(c.log10_good_count)),
        ("log10 #Bad", format_g12(c.log10_bad_count)),
        ("log10 #total", format_g12(c.log10_total_count)),
        ("#Good", big(&c.exact_good_count)),
        ("#Bad", big(&c.exact_bad_count)),
        ("log10 cost Bad", format_g12(r.cost.log10_cost_bad)),
        ("log10 cost Good", format_g12(r.cost.log10_cost_good)),
        ("log10 cost total", format_g12(r.cost.log10_cost_total)),
        ("badExponent", format_g12(r.bad_exponent)),
        ("asymptoticBadExponent", format_g12(r.asymptotic_bad_exponent)),
        ("|difference|", format_g12((r.bad_exponent - r.asymptotic_bad_exponent).abs())),
    ])
}

fn cmd_oracle(
    cli: &Cli,
    spec: &Path,
    theta: &str,
    k: u64,
    s: Option<f64>,
    delta0: Option<f64>,
) -> Result<String, Error> {
    let carpet = load(spec)?;
    let theta: Theta = theta.parse()?;
    let report = oracle_report(&RateFunction::new(&carpet), k, theta, s, delta0)?;
    if cli.json {
        to_json(&report)
    } else {
        Ok(oracle_text(&report))
    }
}

fn cmd_check(cli: &Cli, csv: &Path) -> Result<(String, bool), Error> {
    let text = std::fs::read_to_string(csv).map_err(|e| with_path(csv, e.into()))?;
    let report = check_csv(&text)?;
    let out = if cli.json {
        to_json(&json!({ "rows": report.rows, "ok": report.ok(), "violations": report.violations }))?
    } else {
        let mut s = String::new();
        for v in &report.violations {
            let _ = writeln!(s, "violation: {v}");
        }
        let _ = writeln!(
            s,
            "{} rows, {} violations: {}",
            report.rows,
            report.violations.len(),
            if report.ok() { "ok" } else { "FAILED" }
        );
        s
    };
    Ok((out, report.ok()))
}

fn run(cli: &Cli) -> Result<(), Failure> {
    let out = cli.out.as_deref();
    let text = match &cli.command {
        Command::Dims { spec } => cmd_dims(cli, spec)?,
        Command::Curve { spec } => cmd_curve(cli, spec)?,
        Command::Rate { spec, x } => cmd_rate(cli, spec, x)?,
        Command::Oracle { spec, theta, k, s, delta0 } => cmd_oracle(cli, spec, theta, *k, *s, *delta0)?,
        Command::Check { csv } => {
            let (text, ok) = cmd_check(cli, csv)?;
            emit(out, &text)?;
            return if ok { Ok(()) } else { Err(Failure::CheckFailed) };
        }
    };
    emit(out, &text)?;
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::CheckFailed) => ExitCode::from(1),
        Err(Failure::Lib(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
