//! `padic-gp`: batch front end for the p-adic invariant library.
//!
//! One process runs one subcommand against one JSON job file (an object for
//! a single job, an array for a batch) and prints a single JSON envelope on
//! standard output. Output is byte-stable for fixed input: object keys are
//! sorted, all arithmetic is exact, and the only environment-dependent datum
//! (the crate version) sits in an isolated header field.
//!
//! Exit codes: 0 success, 2 invalid input (including malformed JSON, with a
//! pointer to the offending field), 1 internal invariant failure.

mod commands;
mod schema;

use std::io::Read;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use gp_core::{Error, Result};
use serde_json::{json, Value};

use commands::Defaults;
use schema::Ctx;

#[derive(Parser)]
#[command(
    name = "padic-gp",
    version,
    about = "Exact p-adic quadratic-form invariants, conjugacy parameters, \
             transfer factors and Gross-Prasad multiplicity predictions"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Default prime for jobs that omit the "p" field.
    #[arg(long, global = true)]
    p: Option<u64>,

    /// Default anisotropic scale for jobs that omit the "nu0" field
    /// (an integer or "a/b" fraction).
    #[arg(long, global = true)]
    nu0: Option<String>,

    /// Job file; "-" reads standard input. An object is one job, an array a
    /// batch answered in order.
    #[arg(long, global = true)]
    job: Option<PathBuf>,

    /// Root-number table file for gp-predict jobs without an inline table.
    #[arg(long, global = true)]
    table: Option<PathBuf>,

    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Text,
}

#[derive(Subcommand, Clone, Copy)]
enum Command {
    /// Hilbert symbol (a, b) over Q_p.
    Hilbert,
    /// Canonical square-class representative of a rational.
    Squareclass,
    /// All quadratic forms of a given dimension and discriminant.
    Classify,
    /// Invariants of an eigenvalue family: dimension, discriminant,
    /// regularity, sign-group orders.
    XiInspect,
    /// Endoscopic transfer factor (odd, even or twisted mode).
    TransferFactor,
    /// Admissible class parameters of an ambient space over a family.
    ParamFiber,
    /// Component group of a self-dual parameter.
    Compgroup,
    /// Multiplicity prediction for a pair of parameters on a space pair.
    GpPredict,
    /// Local root numbers: Gauss sums, sp-corrections, pairs, tables.
    Rootnum,
    /// Run every brute-force oracle against its closed form.
    Selftest,
}

impl Command {
    fn name(self) -> &'static str {
        match self {
            Command::Hilbert => "hilbert",
            Command::Squareclass => "squareclass",
            Command::Classify => "classify",
            Command::XiInspect => "xi-inspect",
            Command::TransferFactor => "transfer-factor",
            Command::ParamFiber => "param-fiber",
            Command::Compgroup => "compgroup",
            Command::GpPredict => "gp-predict",
            Command::Rootnum => "rootnum",
            Command::Selftest => "selftest",
        }
    }
}

fn main() {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(output) => println!("{output}"),
        Err(e) => {
            eprintln!("error: {e}");
            std::process::exit(if e.is_internal() { 1 } else { 2 });
        }
    }
}

fn run(cli: &Cli) -> Result<String> {
    let defaults = Defaults {
        p: cli.p,
        nu0: match &cli.nu0 {
            Some(s) => Some(schema::parse_rational(s).ok_or_else(|| {
                Error::Validation(format!("--nu0 {s}: not a rational number"))
            })?),
            None => None,
        },
        table: match &cli.table {
            Some(path) => {
                let value = load_json(path)?;
                Some(commands::table_from_value(&value)?)
            }
            None => None,
        },
    };

    let job_value = match &cli.job {
        Some(path) if path.as_os_str() == "-" => {
            let mut buf = String::new();
            std::io::stdin()
                .read_to_string(&mut buf)
                .map_err(|e| Error::Validation(format!("reading stdin: {e}")))?;
            parse_json(&buf, "<stdin>")?
        }
        Some(path) => load_json(path)?,
        // Selftest has a sensible default job; everything else needs data.
        None if matches!(cli.command, Command::Selftest) => json!({}),
        None => {
            return Err(Error::Validation(
                "this command needs a job file: pass --job <path> (or --job - for stdin)".into(),
            ))
        }
    };

    let root = Ctx::root(&job_value);
    let results = commands::execute(cli.command.name(), &root, &defaults)?;
    let envelope = json!({
        "command": cli.command.name(),
        "version": env!("CARGO_PKG_VERSION"),
        "results": results,
    });
    Ok(match cli.format {
        Format::Json => serde_json::to_string_pretty(&envelope).expect("envelope serializes"),
        Format::Text => render_text(&envelope),
    })
}

fn load_json(path: &Path) -> Result<Value> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Validation(format!("reading {}: {e}", path.display())))?;
    parse_json(&text, &path.display().to_string())
}

fn parse_json(text: &str, source: &str) -> Result<Value> {
    serde_json::from_str(text)
        .map_err(|e| Error::schema("/", format!("{source}: invalid JSON: {e}")))
}

/// Line-oriented rendering of the same envelope: header fields first, then
/// one `[index] key = value` line per result field, keys in sorted order.
fn render_text(envelope: &Value) -> String {
    let mut lines = Vec::new();
    lines.push(format!(
        "command = {}",
        envelope["command"].as_str().unwrap_or("?")
    ));
    lines.push(format!(
        "version = {}",
        envelope["version"].as_str().unwrap_or("?")
    ));
    if let Some(results) = envelope["results"].as_array() {
        for (i, result) in results.iter().enumerate() {
            match result {
                Value::Object(map) => {
                    for (key, value) in map {
                        lines.push(format!("[{i}] {key} = {value}"));
                    }
                }
                other => lines.push(format!("[{i}] {other}")),
            }
        }
    }
    lines.join("\n")
}
