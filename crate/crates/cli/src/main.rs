use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use herzlab::{catalog_listing, execute, exit_code, load_config, summary};

/// Variable-exponent Herz-Morrey laboratory.
#[derive(Parser)]
#[command(name = "herzlab", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run an experiment config and write its reports.
    ///
    /// Exit status: 0 pass (or withheld), 2 fail, 1 configuration or
    /// numerical error.
    Run {
        config: PathBuf,
        /// Dotted-path override, e.g. `inputs.spec.rel_tol=1e-6`.
        #[arg(long = "set", value_name = "KEY=VALUE")]
        overrides: Vec<String>,
    },
    /// List the verification experiments (`norm` and `operator` are also
    /// accepted by `run`).
    List,
    /// Check a config against the schema without running it.
    Validate {
        config: PathBuf,
        #[arg(long = "set", value_name = "KEY=VALUE")]
        overrides: Vec<String>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::List => {
            print!("{}", catalog_listing());
            ExitCode::SUCCESS
        }
        Command::Validate { config, overrides } => match load_config(&config, &overrides) {
            Ok(cfg) => {
                println!("{}: ok ({})", config.display(), cfg.experiment);
                ExitCode::SUCCESS
            }
            Err(e) => {
                eprintln!("error: {e}");
                ExitCode::from(1)
            }
        },
        Command::Run { config, overrides } => {
            let result = load_config(&config, &overrides).and_then(|cfg| execute(&cfg));
            match result {
                Ok((report, files)) => {
                    print!("{}", summary(&report));
                    for f in files {
                        println!("wrote {}", f.display());
                    }
                    ExitCode::from(exit_code(&report) as u8)
                }
                Err(e) => {
                    eprintln!("error: {e}");
                    ExitCode::from(1)
                }
            }
        }
    }
}
