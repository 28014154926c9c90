//! Command-line front end.

use std::path::Path;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::SeedableRng;
use serde::Serialize;
use serde_json::{json, Value};
use thiserror::Error;

use crate::cutset::PathError;
use crate::detect::{detect, DetectError, DetectMethod};
use crate::instance::{
    generate, random_instance, verify_certificate, DiffSetSequence, DifferenceBounds,
    InstanceError, ProblemInstance, RandomSpec,
};
use crate::optimize::{
    construct_extremal, explore_digraph, BoundReport, ConstructError, ExploreError,
};
use crate::wythoff::{analyze_rows, grundy_table, matrix_csv, period_table_csv, WythoffError};

#[derive(Debug, Parser)]
#[command(
    name = "nimseq",
    version,
    about = "Periodicity of mex sequences with periodic obstructions"
)]
#[command(allow_negative_numbers = true)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// Output format; defaults to csv for `wythoff` and json elsewhere.
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    /// Timing and progress on stderr.
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    pub verbose: u8,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Text,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Print the first terms of a sequence.
    #[command(allow_negative_numbers = true)]
    Gen(GenArgs),
    /// Certify preperiod, period and difference period.
    #[command(allow_negative_numbers = true)]
    Detect(DetectArgs),
    /// Period table (or value matrix) of the first Wythoff rows.
    #[command(allow_negative_numbers = true)]
    Wythoff(WythoffArgs),
    /// Period and preperiod constants for a pair of bounds.
    #[command(allow_negative_numbers = true)]
    Bound(BoundArgs),
    /// An instance whose period reaches the period constant.
    #[command(allow_negative_numbers = true)]
    Construct(BoundsArgs),
    /// Components of the optimized cut-set digraph.
    #[command(allow_negative_numbers = true)]
    Explore(ExploreArgs),
}

#[derive(Debug, Clone, Args)]
pub struct InstanceArgs {
    /// Instance JSON: a file path, `-` for stdin, or the JSON text itself.
    #[arg(short, long)]
    pub input: Option<String>,
    /// Random instance from this seed when no input is given.
    #[arg(long)]
    pub rand_seed: Option<u64>,
    /// Largest obstruction period of a random instance.
    #[arg(long, default_value_t = 4, value_parser = clap::value_parser!(u64).range(1..))]
    pub p: u64,
    /// Replaces the seed values of the instance.
    #[arg(long, value_delimiter = ',')]
    pub seed_values: Option<Vec<i64>>,
}

#[derive(Debug, Args)]
pub struct GenArgs {
    #[command(flatten)]
    pub instance: InstanceArgs,
    /// Number of terms.
    #[arg(short = 'n', long, default_value_t = 40)]
    pub len: usize,
}

#[derive(Debug, Args)]
pub struct DetectArgs {
    #[command(flatten)]
    pub instance: InstanceArgs,
    #[arg(long, value_enum, default_value = "cuts")]
    pub method: MethodArg,
    /// Positions to scan before giving up.
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    pub budget: Option<u64>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum MethodArg {
    Cuts,
    Window,
}

impl From<MethodArg> for DetectMethod {
    fn from(m: MethodArg) -> Self {
        match m {
            MethodArg::Cuts => DetectMethod::Cuts,
            MethodArg::Window => DetectMethod::Window,
        }
    }
}

#[derive(Debug, Args)]
pub struct WythoffArgs {
    /// Number of rows, starting from row 0.
    #[arg(long, default_value_t = 4, value_parser = clap::value_parser!(u64).range(1..))]
    pub rows: u64,
    /// Print the value matrix with this many columns instead of the table.
    #[arg(long)]
    pub cols: Option<usize>,
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    pub budget: Option<u64>,
}

#[derive(Debug, Clone, Args)]
pub struct BoundsArgs {
    #[arg(long)]
    pub mu: i64,
    #[arg(long)]
    pub nu: i64,
}

#[derive(Debug, Args)]
pub struct BoundArgs {
    /// Bounds of an instance file instead of `--mu`/`--nu`.
    #[arg(short, long, conflicts_with_all = ["mu", "nu"])]
    pub input: Option<String>,
    #[arg(long, required_unless_present = "input")]
    pub mu: Option<i64>,
    #[arg(long, required_unless_present = "input")]
    pub nu: Option<i64>,
    #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u64).range(1..))]
    pub p: u64,
    /// Seed values, used for the excess `K̂`.
    #[arg(long, value_delimiter = ',')]
    pub seed_values: Option<Vec<i64>>,
}

#[derive(Debug, Args)]
pub struct ExploreArgs {
    #[arg(long)]
    pub rows: usize,
    #[command(flatten)]
    pub bounds: BoundsArgs,
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("invalid input: {0}")]
    Input(String),
    #[error("budget exhausted: {0}")]
    Budget(String),
    #[error("{0}")]
    Failed(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Budget(_) => 2,
            CliError::Input(_) | CliError::Failed(_) => 1,
        }
    }
}

impl From<InstanceError> for CliError {
    fn from(e: InstanceError) -> Self {
        match e {
            InstanceError::Budget(_) => CliError::Budget(e.to_string()),
            _ => CliError::Input(e.to_string()),
        }
    }
}

impl From<DetectError> for CliError {
    fn from(e: DetectError) -> Self {
        match e {
            _ if e.is_budget() => CliError::Budget(e.to_string()),
            DetectError::Instance(i) => i.into(),
            _ => CliError::Failed(e.to_string()),
        }
    }
}

impl From<WythoffError> for CliError {
    fn from(e: WythoffError) -> Self {
        match e {
            WythoffError::Detect { ref source, .. } if source.is_budget() => {
                CliError::Budget(e.to_string())
            }
            _ => CliError::Failed(e.to_string()),
        }
    }
}

impl From<ConstructError> for CliError {
    fn from(e: ConstructError) -> Self {
        match e {
            ConstructError::Path(PathError::Detect(d)) => d.into(),
            ConstructError::Degenerate | ConstructError::Instance(InstanceError::Domain { .. }) => {
                CliError::Input(e.to_string())
            }
            _ => CliError::Failed(e.to_string()),
        }
    }
}

impl From<ExploreError> for CliError {
    fn from(e: ExploreError) -> Self {
        match e {
            ExploreError::Budget(_) => CliError::Budget(e.to_string()),
            _ => CliError::Input(e.to_string()),
        }
    }
}

/// Reads a path, `-` for stdin, or inline JSON.
fn read_json(arg: &str) -> Result<String, CliError> {
    let t = arg.trim_start();
    if t.starts_with('{') || t.starts_with('[') {
        return Ok(arg.to_string());
    }
    if arg == "-" {
        return std::io::read_to_string(std::io::stdin())
            .map_err(|e| CliError::Input(e.to_string()));
    }
    std::fs::read_to_string(Path::new(arg)).map_err(|e| CliError::Input(format!("{arg}: {e}")))
}

pub fn parse_instance(text: &str) -> Result<ProblemInstance, CliError> {
    let inst: ProblemInstance =
        serde_json::from_str(text).map_err(|e| CliError::Input(e.to_string()))?;
    crate::instance::validate_instance(&inst)?;
    Ok(inst)
}

fn load_instance(args: &InstanceArgs) -> Result<ProblemInstance, CliError> {
    let mut inst = match (&args.input, args.rand_seed) {
        (Some(i), _) => parse_instance(&read_json(i)?)?,
        (None, Some(seed)) => {
            let mut rng = rand::rngs::StdRng::seed_from_u64(seed);
            let spec = RandomSpec {
                max_p: args.p as usize,
                ..RandomSpec::default()
            };
            random_instance(&mut rng, &spec)
        }
        (None, None) => {
            return Err(CliError::Input(
                "give an instance with --input or a --rand-seed".into(),
            ))
        }
    };
    if let Some(seed) = &args.seed_values {
        inst.seed = crate::instance::Seed(seed.clone());
        crate::instance::validate_instance(&inst)?;
    }
    Ok(inst)
}

fn to_json<T: Serialize>(v: &T) -> String {
    serde_json::to_string_pretty(v).expect("serializable")
}

fn scalar(v: &Value) -> String {
    match v {
        Value::Null => String::new(),
        Value::String(s) => s.clone(),
        Value::Array(a) => a.iter().map(scalar).collect::<Vec<_>>().join(";"),
        other => other.to_string(),
    }
}

fn csv_field(s: String) -> String {
    if s.contains([',', ';', '"']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s
    }
}

/// Header and one line from the top-level fields of an object.
fn object_csv(v: &Value) -> String {
    let Value::Object(map) = v else {
        return format!("{}\n", scalar(v));
    };
    let keys: Vec<&str> = map.keys().map(String::as_str).collect();
    let vals: Vec<String> = map.values().map(|v| csv_field(scalar(v))).collect();
    format!("{}\n{}\n", keys.join(","), vals.join(","))
}

fn object_text(v: &Value) -> String {
    let Value::Object(map) = v else {
        return format!("{}\n", scalar(v));
    };
    let width = map.keys().map(String::len).max().unwrap_or(0);
    map.iter()
        .map(|(k, v)| {
            let s = match v {
                Value::Array(a) => a.iter().map(scalar).collect::<Vec<_>>().join(" "),
                Value::Object(_) => v.to_string(),
                _ => scalar(v),
            };
            format!("{k:<width$}  {s}\n")
        })
        .collect()
}

fn emit<T: Serialize>(v: &T, format: Format) -> String {
    let value = serde_json::to_value(v).expect("serializable");
    match format {
        Format::Json => to_json(&value) + "\n",
        Format::Csv => object_csv(&value),
        Format::Text => object_text(&value),
    }
}

/// Runs one command and returns the document to print.
pub fn run(cli: &Cli) -> Result<String, CliError> {
    let start = Instant::now();
    let out = dispatch(cli);
    if cli.verbose > 0 {
        let status = if out.is_ok() { "ok" } else { "failed" };
        eprintln!("nimseq: {status} in {:.3}s", start.elapsed().as_secs_f64());
    }
    out
}

fn dispatch(cli: &Cli) -> Result<String, CliError> {
    let fmt = |default| cli.format.unwrap_or(default);
    match &cli.command {
        Command::Gen(a) => {
            let inst = load_instance(&a.instance)?;
            let values = generate(&inst, a.len)?;
            Ok(match fmt(Format::Json) {
                Format::Json => serde_json::to_string(&values).expect("serializable") + "\n",
                Format::Csv => {
                    values
                        .iter()
                        .map(i64::to_string)
                        .collect::<Vec<_>>()
                        .join(",")
                        + "\n"
                }
                Format::Text => {
                    values
                        .iter()
                        .map(i64::to_string)
                        .collect::<Vec<_>>()
                        .join(" ")
                        + "\n"
                }
            })
        }
        Command::Detect(a) => {
            let inst = load_instance(&a.instance)?;
            let budget = a.budget.map(|b| b as usize);
            let cert = detect(&inst, a.method.into(), budget)?;
            if !verify_certificate(&inst, &cert)?.valid {
                return Err(CliError::Failed("certificate failed verification".into()));
            }
            Ok(emit(&cert, fmt(Format::Json)))
        }
        Command::Wythoff(a) => {
            if let Some(cols) = a.cols {
                let table = grundy_table(a.rows as usize, cols);
                return Ok(match fmt(Format::Csv) {
                    Format::Json => serde_json::to_string(&table).expect("serializable") + "\n",
                    Format::Csv => matrix_csv(&table),
                    Format::Text => table
                        .iter()
                        .map(|r| r.iter().map(|v| format!("{v:>3}")).collect::<String>() + "\n")
                        .collect(),
                });
            }
            let rows = analyze_rows(a.rows as usize - 1, a.budget.map(|b| b as usize))?;
            let table: Vec<Value> = rows
                .iter()
                .map(|r| {
                    json!({
                        "y": r.row_y,
                        "preperiod": r.certificate.preperiod,
                        "period": r.certificate.period,
                        "diff_period": r.certificate.diff_period,
                    })
                })
                .collect();
            Ok(match fmt(Format::Csv) {
                Format::Json => to_json(&table) + "\n",
                Format::Csv => period_table_csv(&rows),
                Format::Text => table.iter().map(object_line).collect(),
            })
        }
        Command::Bound(a) => {
            let (bounds, p, seed) = match &a.input {
                Some(i) => {
                    let mut inst = parse_instance(&read_json(i)?)?;
                    if let Some(s) = &a.seed_values {
                        inst.seed = crate::instance::Seed(s.clone());
                    }
                    (inst.bounds(), inst.p(), inst)
                }
                None => {
                    let (mu, nu) = (a.mu.expect("required"), a.nu.expect("required"));
                    let inst = ProblemInstance::new(
                        DiffSetSequence::new(vec![Default::default(); a.p as usize]),
                        a.seed_values.clone().unwrap_or_default(),
                    );
                    (DifferenceBounds::new(mu, nu), a.p as usize, inst)
                }
            };
            crate::instance::validate_instance(&seed)?;
            let k_hat = seed.seed_excess()?.max(0) as u64;
            Ok(emit(
                &BoundReport::new(&bounds, p, k_hat),
                fmt(Format::Json),
            ))
        }
        Command::Construct(b) => {
            if b.mu >= 0 || b.nu <= 0 {
                return Err(CliError::Input(format!(
                    "construct needs mu < 0 < nu (got {}, {})",
                    b.mu, b.nu
                )));
            }
            let c = construct_extremal(b.mu, b.nu)?;
            Ok(emit(&c, fmt(Format::Json)))
        }
        Command::Explore(a) => {
            let s = explore_digraph(a.rows, a.bounds.mu, a.bounds.nu)?;
            Ok(emit(&s, fmt(Format::Json)))
        }
    }
}

fn object_line(v: &Value) -> String {
    let Value::Object(map) = v else {
        return scalar(v) + "\n";
    };
    map.iter()
        .map(|(k, v)| format!("{k}={}", scalar(v)))
        .collect::<Vec<_>>()
        .join(" ")
        + "\n"
}
