use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use wmdim::commands::{run_with_threads, Command, Overrides, Params};
use wmdim::config::{load_config, RunConfig};
use wmdim::{CliError, CliResult};

#[derive(Parser, Debug)]
#[command(name = "wmdim", version, about = "Weighted entropy and mean dimension on factor towers")]
struct Cli {
    #[command(subcommand)]
    command: Cmd,

    /// JSON config with the tower and parameters.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Times, comma separated (e.g. 2,4,8).
    #[arg(long, global = true, value_delimiter = ',')]
    n: Option<Vec<u64>>,

    /// Scales as p/q, comma separated, decreasing.
    #[arg(long, global = true, value_delimiter = ',')]
    eps: Option<Vec<String>>,

    /// Cover construction: faithful or tight.
    #[arg(long, global = true)]
    mode: Option<String>,

    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// Seed for sampled certification.
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Sampled same-cell pairs per cover cell.
    #[arg(long, global = true)]
    samples: Option<usize>,

    /// Power m for the power-rule probe (entropy).
    #[arg(long, global = true)]
    power: Option<u64>,

    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
}

#[derive(Subcommand, Debug, Clone, Copy)]
enum Cmd {
    /// Check the tower's structure.
    Validate,
    /// Window lengths ceil(A_i n).
    Windows,
    /// Distance enclosures between the configured points.
    Distance,
    /// Spanning/packing or cover/grid counts per (n, eps).
    Count,
    /// Weighted entropy per n.
    Entropy,
    /// Slope bracket for the weighted metric mean dimension.
    Mmdim,
    /// Order, mesh and D bounds of the configured covers.
    CoverBounds,
    /// Orbit capacity of the configured graph.
    Ocap,
    /// Reproduction and audit of the two-level cube example.
    Example51,
}

impl From<Cmd> for Command {
    fn from(c: Cmd) -> Self {
        match c {
            Cmd::Validate => Command::Validate,
            Cmd::Windows => Command::Windows,
            Cmd::Distance => Command::Distance,
            Cmd::Count => Command::Count,
            Cmd::Entropy => Command::Entropy,
            Cmd::Mmdim => Command::Mmdim,
            Cmd::CoverBounds => Command::CoverBounds,
            Cmd::Ocap => Command::Ocap,
            Cmd::Example51 => Command::Example51,
        }
    }
}

fn execute(cli: &Cli) -> CliResult<()> {
    let config = match &cli.config {
        Some(path) => load_config(path)?,
        None => RunConfig::default(),
    };
    let overrides = Overrides {
        n: cli.n.clone(),
        eps: cli.eps.clone(),
        mode: cli.mode.clone(),
        seed: cli.seed,
        samples: cli.samples,
        power: cli.power,
    };
    let params = Params::resolve(&config, &overrides)?;
    let threads = cli.threads.unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()));
    let text = run_with_threads(cli.command.into(), &config, &params, threads.max(1))?;
    match &cli.out {
        Some(path) => std::fs::write(path, text)
            .map_err(|source| CliError::Io { path: path.display().to_string(), source }),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            let code = if err.use_stderr() { 64 } else { 0 };
            let _ = err.print();
            return ExitCode::from(code);
        }
    };
    match execute(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(err.exit_code() as u8)
        }
    }
}
