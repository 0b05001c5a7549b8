//! Command-line front end for `cellplan`: scenario files, commands and CSV
//! output. The `cellplan` binary is a thin wrapper around [`run`].

pub mod commands;
pub mod config;
pub mod table;

use std::io::Write;
use std::path::PathBuf;

use cellplan::{Architecture, Rounding};
use clap::{Args, Parser, Subcommand, ValueEnum};

pub use commands::{CliError, CommandOutput, Range, Status, ValidateArgs};
pub use config::{load_config, parse_config, ScenarioConfig};
pub use table::ResultTable;

#[derive(Debug, Parser)]
#[command(
    name = "cellplan",
    version,
    about = "Downlink dimensioning for stationary + mobile BTS public-safety networks"
)]
pub struct Cli {
    /// Echo the effective configuration, defaults included, to stderr.
    #[arg(long, global = true)]
    pub verbose: bool,
    /// Worker threads (0 = one per core). Output does not depend on it.
    #[arg(long, global = true, default_value_t = 0)]
    pub threads: usize,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ArchArg {
    Conv,
    Tdrs,
    Fdrs,
}

impl From<ArchArg> for Architecture {
    fn from(a: ArchArg) -> Self {
        match a {
            ArchArg::Conv => Architecture::Conventional,
            ArchArg::Tdrs => Architecture::ProposedTdrs,
            ArchArg::Fdrs => Architecture::ProposedFdrs,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum RoundArg {
    Ceil,
    Floor,
}

#[derive(Debug, Args)]
pub struct Common {
    /// TOML scenario file; reference-system defaults when omitted.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Write the CSV here instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct RangeArgs {
    #[arg(long)]
    pub lmin: Option<f64>,
    #[arg(long)]
    pub lmax: Option<f64>,
    #[arg(long)]
    pub step: Option<f64>,
}

impl From<&RangeArgs> for Range {
    fn from(r: &RangeArgs) -> Self {
        Range {
            min: r.lmin,
            max: r.lmax,
            step: r.step,
        }
    }
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Throughput versus cell side length.
    Sweep {
        /// Architecture (default: the configured `sharing.mode`).
        #[arg(long, value_enum)]
        arch: Option<ArchArg>,
        #[command(flatten)]
        range: RangeArgs,
        #[command(flatten)]
        common: Common,
    },
    /// Largest side length meeting the throughput requirements.
    Feasible {
        /// Architecture (default: the configured `sharing.mode`).
        #[arg(long, value_enum)]
        arch: Option<ArchArg>,
        #[command(flatten)]
        range: RangeArgs,
        #[command(flatten)]
        common: Common,
    },
    /// Stationary and mobile BTS counts relative to a conventional network.
    Fleet {
        #[arg(long, value_enum, default_value = "ceil")]
        round: RoundArg,
        #[command(flatten)]
        common: Common,
    },
    /// Compare closed forms with the Monte Carlo fading oracle.
    Validate {
        /// Restrict to one architecture (default: all three).
        #[arg(long, value_enum)]
        arch: Option<ArchArg>,
        #[arg(long)]
        trials: Option<u64>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long, default_value_t = 3.0)]
        sigma: f64,
        /// Side length (default: geometry.side_length_m).
        #[arg(long)]
        side: Option<f64>,
        /// Also check every per-UE success probability.
        #[arg(long)]
        per_ue: bool,
        #[command(flatten)]
        common: Common,
    },
    /// Closed-form rates for one architecture at one side length.
    Report {
        /// Architecture (default: the configured `sharing.mode`).
        #[arg(long, value_enum)]
        arch: Option<ArchArg>,
        #[arg(long)]
        side: Option<f64>,
        #[command(flatten)]
        common: Common,
    },
}

impl Command {
    fn common(&self) -> &Common {
        match self {
            Command::Sweep { common, .. }
            | Command::Feasible { common, .. }
            | Command::Fleet { common, .. }
            | Command::Validate { common, .. }
            | Command::Report { common, .. } => common,
        }
    }
}

fn pick(arch: Option<ArchArg>, cfg: &ScenarioConfig) -> Architecture {
    arch.map_or_else(|| cfg.default_architecture(), Into::into)
}

pub fn execute(cli: &Cli, cfg: &ScenarioConfig) -> Result<CommandOutput, CliError> {
    match &cli.command {
        Command::Sweep { arch, range, .. } => {
            commands::cmd_sweep(cfg, pick(*arch, cfg), range.into())
        }
        Command::Feasible { arch, range, .. } => {
            commands::cmd_feasible(cfg, pick(*arch, cfg), range.into())
        }
        Command::Fleet { round, .. } => commands::cmd_fleet(
            cfg,
            match round {
                RoundArg::Ceil => Rounding::Ceil,
                RoundArg::Floor => Rounding::Floor,
            },
        ),
        Command::Validate {
            arch,
            trials,
            seed,
            sigma,
            side,
            per_ue,
            ..
        } => commands::cmd_validate(
            cfg,
            &ValidateArgs {
                architectures: arch.map(|a| vec![a.into()]).unwrap_or_default(),
                side: *side,
                trials: *trials,
                seed: *seed,
                sigma: *sigma,
                per_ue: *per_ue,
                parallel: cli.threads != 1,
            },
        ),
        Command::Report { arch, side, .. } => commands::cmd_report(cfg, pick(*arch, cfg), *side),
    }
}

/// Runs a parsed command line and returns the process exit code.
pub fn run(cli: &Cli, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32 {
    let common = cli.command.common();
    let cfg = match &common.config {
        Some(path) => load_config(path),
        None => Ok(ScenarioConfig::default()),
    };
    let cfg = match cfg {
        Ok(c) => c,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            return 1;
        }
    };
    if cli.verbose {
        let _ = writeln!(stderr, "# effective configuration\n{}", cfg.to_toml());
    }

    let pool = match rayon_pool(cli.threads) {
        Ok(p) => p,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            return 1;
        }
    };
    let output = match pool.install(|| execute(cli, &cfg)) {
        Ok(o) => o,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            return 1;
        }
    };
    for note in &output.notes {
        let _ = writeln!(stderr, "{note}");
    }

    let written = match &common.out {
        Some(path) => std::fs::File::create(path)
            .map_err(|e| e.to_string())
            .and_then(|f| {
                output
                    .table
                    .write_csv(std::io::BufWriter::new(f))
                    .map_err(|e| e.to_string())
            }),
        None => output
            .table
            .write_csv(&mut *stdout)
            .map_err(|e| e.to_string()),
    };
    if let Err(e) = written {
        let _ = writeln!(stderr, "error: cannot write output: {e}");
        return 1;
    }
    output.status.exit_code()
}

fn rayon_pool(threads: usize) -> Result<rayon::ThreadPool, rayon::ThreadPoolBuildError> {
    rayon::ThreadPoolBuilder::new().num_threads(threads).build()
}
