//! Batch experiment runner behind the `nsmimo` binary.
//!
//! Exit codes: 0 success, 1 invalid input, 2 runtime failure, 3 a check
//! suite failed.

pub mod checks;
pub mod output;
pub mod plan;
pub mod presets;
pub mod runner;

use std::ffi::OsString;
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;

use clap::{Parser, Subcommand};

use crate::complexity::op_counts;
use crate::preconditioners::KindTag;
use crate::Error;

use checks::{run_check, CheckOptions, CheckSuite};
use output::{write_csv, Row};
use plan::{parse_norm_mode, parse_plan, RhoUnit};
use presets::{preset_plans, Preset, PresetOptions};
use runner::run_plan;

pub const EXIT_OK: i32 = 0;
pub const EXIT_VALIDATION: i32 = 1;
pub const EXIT_RUNTIME: i32 = 2;
pub const EXIT_CHECK_FAILED: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "nsmimo", version, about = "Neumann-series precoding experiments for the massive MIMO downlink")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    /// Master seed (overrides a plan file's `seed`).
    #[arg(long, global = true)]
    pub seed: Option<u64>,

    /// Monte Carlo trials (overrides the plan or suite default).
    #[arg(long, global = true)]
    pub trials: Option<usize>,

    /// Output CSV path; stdout when absent.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,

    /// Omit the `# generated` comment line.
    #[arg(long, global = true)]
    pub no_timestamp: bool,

    /// Power normalization: `per` (each draw) or `stat` (batch mean).
    #[arg(long, global = true)]
    pub norm_mode: Option<String>,

    /// Unit of plan/preset SNR values: `linear` or `dB`.
    #[arg(long, global = true)]
    pub rho_unit: Option<String>,

    /// Worker threads for the trial loop (default: all cores).
    #[arg(long, global = true)]
    pub threads: Option<usize>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run a `key = value` plan file.
    Sweep { plan: PathBuf },
    /// Run a built-in figure preset.
    Preset {
        #[arg(value_parser = Preset::ALL.map(|p| p.name()))]
        name: String,
    },
    /// Run oracle suites: moments, edges, inverses, dualcode (comma or space separated).
    Check {
        #[arg(required = true)]
        names: Vec<String>,
    },
    /// Print operation counts of every NS scheme at `K` users.
    Complexity { k: u64 },
}

fn exit_code(e: &Error) -> i32 {
    match e {
        Error::NonIntegerEffectiveDimension { .. }
        | Error::OverloadedSystem { .. }
        | Error::BadRange { .. }
        | Error::Plan(_) => EXIT_VALIDATION,
        _ => EXIT_RUNTIME,
    }
}

fn width(cli: &Cli) -> crate::Result<usize> {
    match cli.threads {
        Some(0) => Err(Error::range("threads", 0.0, "threads ≥ 1")),
        Some(n) => Ok(n),
        None => Ok(std::thread::available_parallelism().map_or(1, |n| n.get())),
    }
}

fn emit(rows: &[Row], out: Option<&PathBuf>, timestamp: bool) -> crate::Result<()> {
    match out {
        Some(path) => write_csv(BufWriter::new(File::create(path)?), rows, timestamp)?,
        None => write_csv(io::stdout().lock(), rows, timestamp)?,
    }
    Ok(())
}

fn execute(cli: &Cli) -> crate::Result<i32> {
    let threads = width(cli)?;
    let norm_mode = cli.norm_mode.as_deref().map(parse_norm_mode).transpose()?;
    let rho_unit: Option<RhoUnit> = cli.rho_unit.as_deref().map(str::parse).transpose()?;
    let timestamp = !cli.no_timestamp;

    match &cli.command {
        Command::Sweep { plan } => {
            let mut plan = parse_plan(&std::fs::read_to_string(plan)?)?;
            if let Some(s) = cli.seed {
                plan.seed = s;
            }
            if let Some(t) = cli.trials {
                plan.trials = t;
            }
            if let Some(m) = norm_mode {
                plan.norm_mode = m;
            }
            if let Some(u) = rho_unit {
                plan.rho_unit = u;
            }
            let out = cli.out.clone().or_else(|| plan.out.clone());
            let rows = run_plan(&plan, threads)?;
            emit(&rows, out.as_ref(), timestamp)?;
        }
        Command::Preset { name } => {
            let defaults = PresetOptions::default();
            let opts = PresetOptions {
                trials: cli.trials.unwrap_or(defaults.trials),
                seed: cli.seed.unwrap_or(defaults.seed),
                norm_mode: norm_mode.unwrap_or(defaults.norm_mode),
                rho_unit: rho_unit.unwrap_or(defaults.rho_unit),
            };
            let mut rows = Vec::new();
            for plan in preset_plans(name.parse()?, &opts) {
                rows.extend(run_plan(&plan, threads)?);
            }
            emit(&rows, cli.out.as_ref(), timestamp)?;
        }
        Command::Check { names } => {
            let suites: Vec<CheckSuite> = names
                .iter()
                .flat_map(|n| n.split(','))
                .map(str::trim)
                .filter(|n| !n.is_empty())
                .map(str::parse)
                .collect::<crate::Result<_>>()?;
            let opts = CheckOptions {
                trials: cli.trials,
                seed: cli.seed.unwrap_or(1),
                width: threads,
            };
            let mut out: Box<dyn Write> = match &cli.out {
                Some(p) => Box::new(BufWriter::new(File::create(p)?)),
                None => Box::new(io::stdout().lock()),
            };
            let mut failed = false;
            for suite in suites {
                for line in run_check(suite, &opts)? {
                    failed |= !line.pass();
                    writeln!(out, "{line}")?;
                }
            }
            out.flush()?;
            if failed {
                return Ok(EXIT_CHECK_FAILED);
            }
        }
        Command::Complexity { k } => {
            let mut text = String::from("scheme,K,mults,divs,extrapolated\n");
            for tag in KindTag::ALL {
                let r = op_counts(tag, *k)?;
                text += &format!("{},{k},{},{},{}\n", tag.name(), r.mults, r.divs, r.extrapolated);
            }
            match &cli.out {
                Some(p) => std::fs::write(p, text)?,
                None => io::stdout().lock().write_all(text.as_bytes())?,
            }
        }
    }
    Ok(EXIT_OK)
}

/// Parses `args` (including the program name) and runs the command,
/// returning the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_VALIDATION } else { EXIT_OK };
        }
    };
    match execute(&cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}
