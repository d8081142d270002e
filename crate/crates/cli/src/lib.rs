//! `whitham-lab`: command-line driver for the whitham-core experiments.
//!
//! Exit codes: 0 success, 1 a check failed or the run stopped on an error, 2 usage error.

pub mod commands;
pub mod config;
pub mod manifest;
pub mod output;
pub mod suites;

use std::ffi::OsString;
use std::fmt;
use std::path::PathBuf;

use clap::{Parser, Subcommand};

use crate::commands::Suite;
use crate::suites::ResonanceOptions;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Outcome {
    Passed,
    Failed,
}

/// Bad arguments or unusable input files; maps to exit code 2.
#[derive(Debug)]
pub struct UsageError(pub String);

impl fmt::Display for UsageError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

#[derive(Parser, Debug)]
#[command(name = "whitham-lab", version, about = "Numerical laboratory for the modified Whitham equation")]
struct Cli {
    /// Worker threads for parallel scans (results do not depend on it).
    #[arg(long, global = true, default_value_t = 1)]
    jobs: usize,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Integrate the equation from a key = value config file.
    Simulate {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Accumulate the phase correction over the snapshots of a simulate directory.
    Scattering {
        /// Output directory of a `simulate` run.
        #[arg(long)]
        sim: PathBuf,
        /// Frequency band LO:HI for the convergence report.
        #[arg(long, default_value = "0.7:3")]
        band: String,
        #[arg(long, default_value_t = 4.0)]
        weight: f64,
        #[arg(long, default_value_t = 0.1)]
        alpha: f64,
        /// Exit 1 unless the increments behave as expected.
        #[arg(long)]
        check: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Fit the decay exponent of sup |(|∂|^β) e^{-tL∂} f| for a fixed profile.
    DecayFit {
        #[arg(long, default_value_t = 0.0)]
        beta: f64,
        /// Smooth band LO:HI profile; default is a low-band Gaussian.
        #[arg(long)]
        band: Option<String>,
        /// T0:T1:COUNT (geometric) or a comma-separated list.
        #[arg(long, default_value = "10:1000:24")]
        times: String,
        #[arg(long, default_value_t = 1 << 16)]
        n: usize,
        #[arg(long, default_value = "16384pi")]
        period: String,
        /// Exit 1 if the exponent is outside LO:HI.
        #[arg(long, allow_hyphen_values = true)]
        expect: Option<String>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Sample the resonance lower bounds.
    ResonanceCheck {
        #[arg(long = "box", default_value_t = 10.0)]
        bound: f64,
        #[arg(long, default_value_t = 1_000_000)]
        samples: usize,
        #[arg(long, default_value_t = 100_000)]
        four_samples: usize,
        #[arg(long, default_value_t = -10, allow_hyphen_values = true)]
        k_min: i32,
        #[arg(long, default_value_t = 12, allow_hyphen_values = true)]
        k_max: i32,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Tabulate Λ and its first three derivatives as CSV.
    SymbolTable {
        #[arg(long, default_value = "-5:5", allow_hyphen_values = true)]
        range: String,
        #[arg(long, default_value_t = 0.01)]
        step: f64,
        #[arg(long, default_value = "whitham")]
        symbol: String,
        #[arg(long)]
        fkdv_alpha: Option<String>,
        /// Write symbol_table.csv and a manifest here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run a self-check suite.
    Verify {
        #[arg(long, value_enum)]
        suite: Suite,
        /// Sample count for the resonance and identity suites.
        #[arg(long)]
        samples: Option<usize>,
        /// Random instances for the multiplier suite.
        #[arg(long, default_value_t = 100)]
        trials: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

/// Parses `argv` (program name first), runs the command and returns the exit code.
pub fn dispatch<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    let pool = match rayon::ThreadPoolBuilder::new().num_threads(cli.jobs.max(1)).build() {
        Ok(p) => p,
        Err(e) => {
            eprintln!("error: cannot start {} worker threads: {e}", cli.jobs);
            return 2;
        }
    };
    match pool.install(|| run(cli.command)) {
        Ok(Outcome::Passed) => 0,
        Ok(Outcome::Failed) => 1,
        Err(e) => {
            eprintln!("error: {e:#}");
            if e.downcast_ref::<UsageError>().is_some() {
                2
            } else {
                1
            }
        }
    }
}

fn usage<T>(r: anyhow::Result<T>) -> anyhow::Result<T> {
    r.map_err(|e| match e.downcast::<UsageError>() {
        Ok(u) => u.into(),
        Err(e) => UsageError(format!("{e:#}")).into(),
    })
}

fn run(cmd: Command) -> anyhow::Result<Outcome> {
    match cmd {
        Command::Simulate { config, out } => commands::simulate(&config, out.as_deref()),
        Command::Scattering {
            sim,
            band,
            weight,
            alpha,
            check,
            out,
        } => commands::scattering(&commands::ScatteringArgs {
            sim: &sim,
            band: usage(commands::parse_band_arg(&band))?,
            weight,
            alpha,
            check,
            out: out.as_deref(),
        }),
        Command::DecayFit {
            beta,
            band,
            times,
            n,
            period,
            expect,
            out,
        } => commands::decay_fit(&commands::DecayArgs {
            beta,
            band: usage(band.as_deref().map(commands::parse_range).transpose())?,
            times: &times,
            n,
            period: usage(config::parse_number(&period))?,
            expect: usage(expect.as_deref().map(commands::parse_range).transpose())?,
            out: out.as_deref(),
        }),
        Command::ResonanceCheck {
            bound,
            samples,
            four_samples,
            k_min,
            k_max,
            seed,
            out,
        } => {
            if k_min > k_max {
                return Err(UsageError(format!("--k-min {k_min} exceeds --k-max {k_max}")).into());
            }
            let opts = ResonanceOptions {
                bound,
                samples,
                four_samples,
                k_min,
                k_max,
                seed,
            };
            commands::resonance_check(&opts, out.as_deref())
        }
        Command::SymbolTable {
            range,
            step,
            symbol,
            fkdv_alpha,
            out,
        } => commands::symbol_table(&commands::TableArgs {
            range: usage(commands::parse_range(&range))?,
            step,
            symbol: &symbol,
            fkdv_alpha: fkdv_alpha.as_deref(),
            out: out.as_deref(),
        }),
        Command::Verify {
            suite,
            samples,
            trials,
            seed,
            out,
        } => commands::verify(&commands::VerifyArgs {
            suite,
            samples,
            trials,
            seed,
            out: out.as_deref(),
        }),
    }
}
