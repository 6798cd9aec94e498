//! Command-line interface: a single `sweep` subcommand that runs a
//! Monte-Carlo grid and emits the results as CSV (to a file with `--out`,
//! otherwise to stdout).

use std::path::PathBuf;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::error::Result;
use crate::schemes::Scheme;
use crate::sim::{render_csv, run_sweep, SweepSpec};

/// Top-level argument structure.
#[derive(Debug, Parser)]
#[command(
    name = "scfb",
    version,
    about = "Link-level simulator for superimposed one-bit channel feedback"
)]
pub struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run a Monte-Carlo sweep over scheme × SNR × rho × c and write one
    /// CSV row per grid point.
    Sweep(SweepArgs),
}

/// Scheme names as they appear on the command line.
#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum SchemeArg {
    /// Superimposed feedback with support indicator.
    PropSca,
    /// Superimposed feedback without support indicator.
    PropBiht,
    /// Time-division baseline.
    Tdm,
}

impl From<SchemeArg> for Scheme {
    fn from(value: SchemeArg) -> Self {
        match value {
            SchemeArg::PropSca => Scheme::PropSca,
            SchemeArg::PropBiht => Scheme::PropBiht,
            SchemeArg::Tdm => Scheme::Tdm,
        }
    }
}

/// SNR grid in dB, accepted either as `start:step:stop` or as a
/// comma-separated list.
#[derive(Debug, Clone, PartialEq)]
struct SnrGrid(Vec<f64>);

impl FromStr for SnrGrid {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        let parse = |t: &str| {
            t.trim()
                .parse::<f64>()
                .map_err(|_| format!("invalid number {t:?} in SNR grid"))
        };
        if s.contains(':') {
            let parts: Vec<&str> = s.split(':').collect();
            if parts.len() != 3 {
                return Err("range form must be start:step:stop".into());
            }
            let (start, step, stop) = (parse(parts[0])?, parse(parts[1])?, parse(parts[2])?);
            if !step.is_finite() || step <= 0.0 {
                return Err("SNR step must be positive".into());
            }
            if stop < start {
                return Err("SNR stop must not be below start".into());
            }
            let mut grid = Vec::new();
            let mut k = 0u32;
            loop {
                let v = start + f64::from(k) * step;
                if v > stop + 1e-9 * step {
                    break;
                }
                grid.push(v);
                k += 1;
            }
            Ok(SnrGrid(grid))
        } else {
            let grid = s
                .split(',')
                .map(parse)
                .collect::<std::result::Result<_, _>>()?;
            Ok(SnrGrid(grid))
        }
    }
}

#[derive(Debug, Args)]
struct SweepArgs {
    /// Scheme to simulate (repeat the flag for several).
    #[arg(long = "scheme", value_enum, required = true)]
    schemes: Vec<SchemeArg>,

    /// SNR grid in dB: "start:step:stop" or a comma-separated list.
    #[arg(long = "snr-db", default_value = "0:2:10")]
    snr_db: SnrGrid,

    /// Feedback power fraction rho (repeatable).
    #[arg(long = "rho", default_value = "0.2")]
    rho: Vec<f64>,

    /// Sampling rate c = M/N (repeatable).
    #[arg(long = "c", default_value = "2.0")]
    c: Vec<f64>,

    /// Number of transmit antennas N.
    #[arg(long, default_value_t = 64)]
    n: usize,

    /// Uplink data length P in symbols.
    #[arg(long, default_value_t = 1024)]
    p: usize,

    /// Channel sparsity.
    #[arg(long, default_value_t = 8)]
    sparsity: usize,

    /// Trials per grid point.
    #[arg(long, default_value_t = 2000)]
    trials: usize,

    /// Master seed; identical invocations produce identical CSV bytes.
    #[arg(long, default_value_t = 1)]
    seed: u64,

    /// Reconstruction iteration budget.
    #[arg(long, default_value_t = 100)]
    itermax: usize,

    /// Scale the spread frame to unit per-chip power.
    #[arg(long)]
    normalize_spread: bool,

    /// Output CSV path; omit to print the CSV to stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

impl SweepArgs {
    fn to_spec(&self) -> Result<SweepSpec> {
        let schemes = self.schemes.iter().map(|&s| s.into()).collect();
        let mut spec = SweepSpec::new(
            schemes,
            self.snr_db.0.clone(),
            self.rho.clone(),
            self.c.clone(),
            self.trials,
            self.seed,
        )?
        .with_dimensions(self.n, self.p, self.sparsity)
        .with_itermax(self.itermax)
        .with_normalize_spread(self.normalize_spread);
        if let Some(out) = &self.out {
            spec = spec.with_output(out);
        }
        Ok(spec)
    }
}

/// Executes a parsed command line.
pub fn run(cli: &Cli) -> Result<()> {
    match &cli.command {
        Command::Sweep(args) => {
            let spec = args.to_spec()?;
            let records = run_sweep(&spec)?;
            if args.out.is_none() {
                print!("{}", render_csv(&records));
            }
            Ok(())
        }
    }
}
