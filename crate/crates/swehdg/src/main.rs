use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use swehdg::commands::{self, CommandArgs};

#[derive(Parser)]
#[command(name = "swehdg", version, about = "Structure-preserving HDG solver for linear shallow water")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Convergence of the vector-Laplacian initialization
    ConvergeInit(Args),
    /// Convergence of the full scheme against the standing wave
    Converge(Args),
    /// Single run with a conserved-quantity time series
    Run(Args),
    /// Energy of the Hamiltonian and the dissipative scheme side by side
    CompareDissipative(Args),
}

#[derive(clap::Args)]
struct Args {
    #[arg(long)]
    config: PathBuf,
    #[arg(long, default_value = "out")]
    out: PathBuf,
    #[arg(long)]
    threads: Option<usize>,
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::new().filter_or("SWEHDG_LOG", "info")).init();
    let cli = Cli::parse();
    let (run, args): (fn(&CommandArgs) -> anyhow::Result<()>, Args) = match cli.command {
        Command::ConvergeInit(a) => (commands::converge_init, a),
        Command::Converge(a) => (commands::converge, a),
        Command::Run(a) => (commands::run, a),
        Command::CompareDissipative(a) => (commands::compare_dissipative, a),
    };
    let args = CommandArgs { config: args.config, out: args.out, threads: args.threads };
    match run(&args) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            log::error!("{e:#}");
            ExitCode::FAILURE
        }
    }
}
