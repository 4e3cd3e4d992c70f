use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use curveprop::{run, ExperimentKind};

#[derive(Parser)]
#[command(name = "curveprop", version, about = "Propagators e^{itP(D)} along curves: reproducible experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate e^{itP(D)}f(γ(x,t)) at sample points and times.
    Propagate(Common),
    /// Fit the convergence rate of the error as t → 0.
    RateFit(Common),
    /// Maximal-function growth sweep over band-limited data.
    Maximal(Common),
    /// Check the lower bound for the shift curve.
    LowerBound(Common),
    /// Energies of the frequency decomposition pieces.
    Decompose(Common),
    /// Off-diagonal decay of the localized kernel.
    KernelDecay(Common),
}

#[derive(Args)]
struct Common {
    #[arg(long)]
    config: PathBuf,
    /// Output directory (default: the config's out_dir, else ./<command>).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Worker threads; 0 means one per core.
    #[arg(long, env = "CURVEPROP_THREADS", default_value_t = 0)]
    threads: usize,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (kind, args) = match cli.command {
        Command::Propagate(a) => (ExperimentKind::Propagate, a),
        Command::RateFit(a) => (ExperimentKind::RateFit, a),
        Command::Maximal(a) => (ExperimentKind::Maximal, a),
        Command::LowerBound(a) => (ExperimentKind::LowerBound, a),
        Command::Decompose(a) => (ExperimentKind::Decompose, a),
        Command::KernelDecay(a) => (ExperimentKind::KernelDecay, a),
    };
    match run(kind, &args.config, args.out.as_deref(), args.threads) {
        Ok(summary) => {
            println!("{}", summary.display());
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("curveprop {}: {e}", kind.name());
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
