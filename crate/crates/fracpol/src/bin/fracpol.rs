//! Batch CLI over the fracpol library.

use clap::{Args, Parser, Subcommand};
use fracpol::cli::{self, CliConfig};
use std::path::PathBuf;

#[derive(Parser)]
#[command(name = "fracpol", version, about = "Eigenvalue experiments for the fractional p-Laplacian on rasterized domains")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args)]
struct RunArgs {
    /// JSON experiment config.
    #[arg(long)]
    config: PathBuf,
    /// Output directory for artifacts.
    #[arg(long, default_value = ".")]
    out: PathBuf,
    /// Dotted-path overrides applied after the file parse, e.g. --set frac.s=0.6
    #[arg(long = "set")]
    set: Vec<String>,
    /// Also write the rasterized mask(s) in the portable text format.
    #[arg(long)]
    dump_mask: bool,
}

#[derive(Subcommand)]
enum Cmd {
    /// Compute the first eigenvalue and eigenfunction on one domain.
    Solve(RunArgs),
    /// Eigenvalue sweep as the hole translates along e1.
    #[command(name = "sweep-t")]
    SweepT(RunArgs),
    /// Eigenvalue sweep as the hole rotates about a point.
    #[command(name = "sweep-rot")]
    SweepRot(RunArgs),
    /// Compare the eigenvalue against its polarized domain.
    #[command(name = "fk-check")]
    FkCheck(RunArgs),
    /// Run the randomized set/function property suites.
    Props(RunArgs),
}

fn main() {
    if let Ok(threads) = std::env::var("FRACPOL_THREADS") {
        if let Ok(n) = threads.trim().parse::<usize>() {
            if n > 0 {
                rayon::ThreadPoolBuilder::new()
                    .num_threads(n)
                    .build_global()
                    .ok();
            }
        }
    }
    let cli = Cli::parse();
    let (sub, args) = match cli.cmd {
        Cmd::Solve(a) => (cli::Subcommand::Solve, a),
        Cmd::SweepT(a) => (cli::Subcommand::SweepT, a),
        Cmd::SweepRot(a) => (cli::Subcommand::SweepRot, a),
        Cmd::FkCheck(a) => (cli::Subcommand::FkCheck, a),
        Cmd::Props(a) => (cli::Subcommand::Props, a),
    };
    let code = cli::run(&CliConfig {
        subcommand: sub,
        config_path: args.config,
        out_dir: args.out,
        overrides: args.set,
        dump_mask: args.dump_mask,
    });
    std::process::exit(code);
}
