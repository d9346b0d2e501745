//! `np`: reproducible verification runs over nested-partition monoids.
//!
//! Exit codes: 0 pass, 1 falsified identity, 2 infeasible or unsupported
//! construction, 3 bad input.

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use nested_partitions::cli::{
    cmd_closure, cmd_enumerate, cmd_rank, cmd_verify, CliOptions, RankMethod, Report, VerifyWhat,
};
use nested_partitions::partition::{Endomorphism, PartitionType};

#[derive(Parser)]
#[command(
    name = "np",
    about = "Endomorphism monoids of uniformly nested partitions: enumeration, verification suites, and rank certificates",
    disable_help_subcommand = true
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// Partition type as comma-separated level sizes, e.g. "3,3".
    #[arg(long = "type", value_name = "N1,...,Nk")]
    ty: String,
    /// Worker threads for closures and pair scans.
    #[arg(long, default_value_t = default_workers())]
    workers: usize,
    /// Element bound for closures and enumerations.
    #[arg(long, default_value_t = default_bound())]
    bound: u64,
    /// Emit the report as JSON instead of text.
    #[arg(long)]
    json: bool,
    /// Write the report to a file instead of stdout.
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Monoid size, per-level invertible counts, and strata.
    Enumerate {
        #[command(flatten)]
        common: Common,
    },
    /// Run one of the verification suites.
    Verify {
        /// Which suite to run.
        what: What,
        #[command(flatten)]
        common: Common,
    },
    /// Rank certificates.
    Rank {
        #[command(flatten)]
        common: Common,
        /// brute: exact exhaustive search; certified: lower bound plus the
        /// constructed generating set.
        #[arg(long, value_enum)]
        method: Method,
    },
    /// Closure of endomorphisms read from a JSON file (an array of
    /// endomorphism objects, all of one type).
    Closure {
        /// Path to the generator file.
        #[arg(long, value_name = "FILE")]
        gens: PathBuf,
        /// Worker threads.
        #[arg(long, default_value_t = default_workers())]
        workers: usize,
        /// Element bound.
        #[arg(long, default_value_t = default_bound())]
        bound: u64,
        /// Emit JSON instead of text.
        #[arg(long)]
        json: bool,
        /// Write the report to a file.
        #[arg(long, value_name = "PATH")]
        out: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum What {
    Decomposition,
    Predicates,
    Step,
    #[value(name = "wreath-iso")]
    WreathIso,
    Coprime,
    Strannaya,
    Generators,
}

impl From<What> for VerifyWhat {
    fn from(w: What) -> VerifyWhat {
        match w {
            What::Decomposition => VerifyWhat::Decomposition,
            What::Predicates => VerifyWhat::Predicates,
            What::Step => VerifyWhat::Step,
            What::WreathIso => VerifyWhat::WreathIso,
            What::Coprime => VerifyWhat::Coprime,
            What::Strannaya => VerifyWhat::Strannaya,
            What::Generators => VerifyWhat::Generators,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum Method {
    Brute,
    Certified,
}

fn default_workers() -> usize {
    std::env::var("NP_WORKERS")
        .ok()
        .and_then(|v| v.parse().ok())
        .unwrap_or(1)
}

fn default_bound() -> u64 {
    std::env::var("NP_BOUND")
        .ok()
        .and_then(|v| v.parse().ok())
        .unwrap_or(nested_partitions::rank::DEFAULT_CLOSURE_BOUND)
}

fn parse_type(s: &str) -> Result<PartitionType, String> {
    let levels: Result<Vec<u32>, _> = s.split(',').map(|p| p.trim().parse::<u32>()).collect();
    let levels = levels.map_err(|_| format!("cannot parse type {s:?}: expected N1,...,Nk"))?;
    PartitionType::new(&levels).map_err(|e| e.to_string())
}

fn emit(report: &Report, json: bool, out: Option<&PathBuf>) -> Result<u8, String> {
    let rendered = if json {
        report.to_json_string()
    } else {
        report.render_text()
    };
    match out {
        Some(path) => fs::write(path, rendered).map_err(|e| e.to_string())?,
        None => print!("{rendered}"),
    }
    Ok(report.exit_code())
}

fn run() -> Result<u8, (u8, String)> {
    let cli = Cli::try_parse().map_err(|e| (3u8, e.to_string()))?;
    let bad_input = |m: String| (3u8, m);
    let run_error = |e: nested_partitions::Error| (2u8, e.to_string());
    match cli.command {
        Command::Enumerate { common } => {
            let ty = parse_type(&common.ty).map_err(bad_input)?;
            let opts = CliOptions {
                workers: common.workers,
                bound: common.bound,
            };
            let report = cmd_enumerate(&ty, &opts).map_err(run_error)?;
            emit(&report, common.json, common.out.as_ref()).map_err(bad_input)
        }
        Command::Verify { what, common } => {
            let ty = parse_type(&common.ty).map_err(bad_input)?;
            let opts = CliOptions {
                workers: common.workers,
                bound: common.bound,
            };
            let report = cmd_verify(what.into(), &ty, &opts).map_err(run_error)?;
            emit(&report, common.json, common.out.as_ref()).map_err(bad_input)
        }
        Command::Rank { common, method } => {
            let ty = parse_type(&common.ty).map_err(bad_input)?;
            let opts = CliOptions {
                workers: common.workers,
                bound: common.bound,
            };
            let method = match method {
                Method::Brute => RankMethod::Brute,
                Method::Certified => RankMethod::Certified,
            };
            let report = cmd_rank(&ty, method, &opts).map_err(run_error)?;
            emit(&report, common.json, common.out.as_ref()).map_err(bad_input)
        }
        Command::Closure {
            gens,
            workers,
            bound,
            json,
            out,
        } => {
            let text = fs::read_to_string(&gens)
                .map_err(|e| bad_input(format!("cannot read {}: {e}", gens.display())))?;
            let parsed: Vec<Endomorphism> = serde_json::from_str(&text)
                .map_err(|e| bad_input(format!("cannot parse {}: {e}", gens.display())))?;
            let opts = CliOptions { workers, bound };
            let report = cmd_closure(&parsed, &opts).map_err(|e| match e {
                nested_partitions::Error::TypeMismatch { .. }
                | nested_partitions::Error::InvalidInput(_) => bad_input(e.to_string()),
                other => run_error(other),
            })?;
            emit(&report, json, out.as_ref()).map_err(bad_input)
        }
    }
}

fn main() -> ExitCode {
    match run() {
        Ok(code) => ExitCode::from(code),
        Err((code, message)) => {
            eprintln!("{message}");
            ExitCode::from(code)
        }
    }
}
