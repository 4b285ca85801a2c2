mod commands;
mod document;

use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use commands::{BoundaryArgs, CliError, EmitKind};
use seqrac_core::optimizer::DEFAULT_SEED;

/// Simulate, optimize and certify sequential qubit random access codes.
#[derive(Parser)]
#[command(name = "seqrac", version)]
struct Cli {
    /// Seed for randomized commands.
    #[arg(long, global = true, env = "SEQRAC_SEED")]
    seed: Option<u64>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Witnesses, distribution and membership of a strategy document.
    Evaluate { file: PathBuf },

    /// CSV trace of the trade-off boundary.
    Boundary {
        #[arg(long, default_value_t = 21)]
        points: usize,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Also run the see-saw search at every point.
        #[arg(long)]
        with_seesaw: bool,
        /// Search over generic strategies instead of the reduced family.
        #[arg(long, requires = "with_seesaw")]
        generic: bool,
        #[arg(long, default_value_t = 32)]
        restarts: usize,
    },

    /// Sharpness interval compatible with an observed witness pair.
    Certify {
        #[arg(long, allow_hyphen_values = true)]
        wab: f64,
        #[arg(long, allow_hyphen_values = true)]
        wac: f64,
    },

    /// Canonical strategy under visibility noise.
    Noise {
        #[arg(long, default_value_t = std::f64::consts::FRAC_1_SQRT_2)]
        eta: f64,
        #[arg(long, default_value_t = 1.0)]
        va: f64,
        #[arg(long, default_value_t = 1.0)]
        vb: f64,
        #[arg(long, default_value_t = 1.0)]
        vc: f64,
    },

    /// CSV of witnesses along a chain of sequential parties.
    Sequence {
        #[arg(long)]
        parties: Option<usize>,
        /// Comma-separated sharpness per party; a single value applies to all.
        #[arg(long, value_delimiter = ',')]
        eta_profile: Vec<f64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },

    /// Exhaustive search over deterministic one-bit strategies.
    Classical,

    /// Random sampling of the inequalities behind the boundary.
    Checks {
        #[arg(long, default_value_t = 10_000)]
        samples: usize,
        /// Points per axis of the trigonometric grid.
        #[arg(long, default_value_t = 100)]
        grid: usize,
    },

    /// Write a strategy document.
    Emit {
        #[command(subcommand)]
        kind: EmitCommand,
        #[arg(long, global = true)]
        out: Option<PathBuf>,
    },
}

#[derive(Subcommand)]
enum EmitCommand {
    /// Square preparations with Lüders instruments of the given sharpness.
    Canonical {
        #[arg(long, default_value_t = std::f64::consts::FRAC_1_SQRT_2)]
        eta: f64,
    },
    /// Alice sends her first bit, which Bob and Charlie relay and output.
    Classical,
}

fn sharpness_profile(parties: Option<usize>, profile: Vec<f64>) -> Result<Vec<f64>, CliError> {
    match (parties, profile.len()) {
        (None, 0) => Ok(vec![1.0; 4]),
        (Some(n), 0) => Ok(vec![1.0; n]),
        (None, _) => Ok(profile),
        (Some(n), 1) => Ok(vec![profile[0]; n]),
        (Some(n), len) if len == n => Ok(profile),
        (Some(n), len) => Err(CliError::Usage(format!(
            "--eta-profile has {len} entries but --parties is {n}"
        ))),
    }
}

fn run(cli: Cli, out: &mut dyn Write) -> Result<(), CliError> {
    let seed = cli.seed.unwrap_or(DEFAULT_SEED);
    match cli.command {
        Command::Evaluate { file } => commands::evaluate(&file, out),
        Command::Boundary {
            points,
            out: path,
            with_seesaw,
            generic,
            restarts,
        } => commands::boundary(
            &BoundaryArgs {
                points,
                out: path.as_deref(),
                with_seesaw,
                generic,
                restarts,
                seed,
            },
            out,
        ),
        Command::Certify { wab, wac } => commands::certify(wab, wac, out),
        Command::Noise { eta, va, vb, vc } => commands::noise(eta, [va, vb, vc], out),
        Command::Sequence {
            parties,
            eta_profile,
            out: path,
        } => commands::sequence(
            sharpness_profile(parties, eta_profile)?,
            path.as_deref(),
            out,
        ),
        Command::Classical => commands::classical(out),
        Command::Checks { samples, grid } => commands::checks(samples, grid, seed, out),
        Command::Emit { kind, out: path } => {
            let kind = match kind {
                EmitCommand::Canonical { eta } => EmitKind::Canonical(eta),
                EmitCommand::Classical => EmitKind::Classical,
            };
            commands::emit(kind, path.as_deref(), out)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    let stdout = io::stdout();
    let mut out = stdout.lock();
    let result = run(cli, &mut out);
    let _ = out.flush();
    match result {
        Ok(()) => ExitCode::SUCCESS,
        // the reader went away, e.g. `seqrac evaluate doc.json | head`
        Err(CliError::Io(e)) if e.kind() == io::ErrorKind::BrokenPipe => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
