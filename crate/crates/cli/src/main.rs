mod artifacts;
mod commands;
mod settings;
mod template;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

#[derive(Parser, Debug)]
#[command(name = "strip", version, about = "Least-energy solutions of the Neumann problem on a strip")]
struct Cli {
    /// TOML run configuration; built-in defaults when omitted.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory (overrides `output_dir`).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Worker threads (overrides `workers`).
    #[arg(long, global = true)]
    workers: Option<usize>,
    /// Seed for random test fields (overrides `seed`).
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Radial ground state of the cross-section problem.
    GroundState,
    /// Principal eigenvalue, critical length and the linearized spectrum at `L`.
    Eigen,
    /// Multistart minimization of the quotient at `L`.
    SolveStrip,
    /// Bifurcation diagram over the `L` schedule.
    Sweep,
    /// Pitchfork coefficient and its check against solved points.
    Pitchfork,
    /// Sobolev constants and the instanton test-function quotient.
    CriticalConstants,
    /// Runs the acceptance checks and prints one line per criterion.
    Validate {
        /// Comma-separated criterion numbers; all when omitted.
        #[arg(long, value_delimiter = ',')]
        criteria: Vec<usize>,
    },
    /// Prints a configuration template with every default.
    Template,
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    if let Command::Template = cli.command {
        print!("{}", template::render(&strip_core::config::RunConfig::default()));
        return ExitCode::SUCCESS;
    }
    let cfg = match settings::load(cli.config.as_deref(), cli.out, cli.workers, cli.seed) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e:#}");
            return ExitCode::from(2);
        }
    };
    let pool = rayon::ThreadPoolBuilder::new().num_threads(cfg.workers).build();
    let pool = match pool {
        Ok(p) => p,
        Err(e) => {
            eprintln!("error: cannot start worker pool: {e}");
            return ExitCode::FAILURE;
        }
    };
    match pool.install(|| commands::run(&cli.command, &cfg)) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
