//! `accredit` — accreditation of hybrid analogue-digital quantum
//! simulations against configurable error channels.
//!
//! Exit codes: 0 success, 2 parse error, 3 validation error, 4 capacity.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use accredit_cli::commands;

#[derive(Parser)]
#[command(name = "accredit", version, about = "Accredited analogue quantum simulation")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct OutArg {
    /// Write the JSON report here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Execute the accreditation protocol described by a config file.
    Run {
        /// TOML config with hamiltonian/target/protocol/error/seed sections.
        #[arg(long)]
        config: PathBuf,
        /// Override the master seed from the config.
        #[arg(long)]
        seed: Option<u64>,
        /// Worker threads (default: ACCREDIT_THREADS or all cores).
        /// Affects speed, never results.
        #[arg(long)]
        threads: Option<usize>,
        #[command(flatten)]
        out: OutArg,
    },
    /// Print the trap count for an accuracy/confidence pair.
    Ntraps {
        #[arg(long)]
        theta: f64,
        #[arg(long)]
        alpha: f64,
        #[command(flatten)]
        out: OutArg,
    },
    /// Synthesize and verify a time-inversion circuit for a Pauli-sum fixture.
    InvertCheck {
        /// Fixture file: one `<coeff> <letters>` term per line.
        #[arg(long)]
        fixture: PathBuf,
        /// Evolution duration for the numeric check.
        #[arg(long, default_value_t = 1.3)]
        t: f64,
        #[command(flatten)]
        out: OutArg,
    },
    /// Brute-force oracle computations.
    #[command(subcommand)]
    Oracle(OracleCommand),
}

#[derive(Subcommand)]
enum OracleCommand {
    /// Variation distance between two distribution files.
    Vd {
        left: PathBuf,
        right: PathBuf,
        #[command(flatten)]
        out: OutArg,
    },
    /// Exact (or Monte-Carlo) trap-failure probability for a config.
    PInco {
        #[arg(long)]
        config: PathBuf,
        /// Switch to Monte-Carlo over randomness draws with this many draws.
        #[arg(long)]
        mc_draws: Option<usize>,
        #[arg(long)]
        seed: Option<u64>,
        #[command(flatten)]
        out: OutArg,
    },
    /// Pauli-twirl a configured channel and report its chi diagonality.
    Twirl {
        #[arg(long)]
        config: PathBuf,
        /// Attachment point to twirl (default: first configured channel).
        #[arg(long)]
        attach: Option<String>,
        #[command(flatten)]
        out: OutArg,
    },
    /// Monte-Carlo detection rate of the configured errors.
    Detect {
        #[arg(long)]
        config: PathBuf,
        #[arg(long, default_value_t = 10_000)]
        samples: usize,
        #[arg(long)]
        seed: Option<u64>,
        #[command(flatten)]
        out: OutArg,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Run {
            config,
            seed,
            threads,
            out,
        } => commands::cmd_run(&config, seed, threads, out.out.as_deref()),
        Command::Ntraps { theta, alpha, out } => {
            commands::cmd_ntraps(theta, alpha, out.out.as_deref())
        }
        Command::InvertCheck { fixture, t, out } => {
            commands::cmd_invert_check(&fixture, t, out.out.as_deref())
        }
        Command::Oracle(cmd) => match cmd {
            OracleCommand::Vd { left, right, out } => {
                commands::cmd_oracle_vd(&left, &right, out.out.as_deref())
            }
            OracleCommand::PInco {
                config,
                mc_draws,
                seed,
                out,
            } => commands::cmd_oracle_p_inco(&config, mc_draws, seed, out.out.as_deref()),
            OracleCommand::Twirl {
                config,
                attach,
                out,
            } => commands::cmd_oracle_twirl(&config, attach.as_deref(), out.out.as_deref()),
            OracleCommand::Detect {
                config,
                samples,
                seed,
                out,
            } => commands::cmd_oracle_detect(&config, samples, seed, out.out.as_deref()),
        },
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("accredit: {e}");
            ExitCode::from(e.kind.code())
        }
    }
}
