use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use sparsedisc_cli::error::CliError;
use sparsedisc_cli::report::report;
use sparsedisc_cli::runner::{run, Overrides};

#[derive(Parser)]
#[command(name = "sparsedisc", version, about = "Sampling discretization and sparse recovery experiments")]
struct Cli {
    /// Override the config seed.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Worker threads for parallel sections.
    #[arg(long, global = true)]
    max_cpu: Option<usize>,
    /// Cap on enumerated supports.
    #[arg(long, global = true)]
    cap: Option<u64>,
    /// Output directory.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Run one experiment config.
    Run { config: PathBuf },
    /// Merge the runs under a directory into summary tables.
    Report { dir: PathBuf },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = cli.max_cpu {
        if n == 0 {
            eprintln!("error: --max-cpu must be positive");
            return ExitCode::from(2);
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .expect("thread pool is configured once");
    }
    let result: Result<(), CliError> = match &cli.command {
        Cmd::Run { config } => {
            let ov = Overrides {
                seed: cli.seed,
                cap: cli.cap,
                out: cli.out.clone(),
            };
            run(config, &ov).map(|(dir, m)| {
                println!("{} -> {} ({} files)", m.command, dir.display(), m.outputs.len() + 1);
            })
        }
        Cmd::Report { dir } => {
            let out = cli.out.clone().unwrap_or_else(|| dir.clone());
            report(dir, &out).map(|s| {
                for sk in &s.skipped {
                    eprintln!("warning: skipped {}: {}", sk.dir, sk.reason);
                }
                println!("{} runs summarized in {}", s.runs.len(), out.display());
            })
        }
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            match (&cli.command, &e) {
                (Cmd::Run { config }, CliError::Validation { line, message }) => {
                    eprintln!("error: {}:{line}: {message}", config.display())
                }
                _ => eprintln!("error: {e}"),
            }
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
