use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use agd::dsl::{export_extension, load_model, run};

#[derive(Parser)]
#[command(name = "agd", version, about = "Exact checks for Lie algebroid adjustment data")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Subcommand)]
enum Command {
    /// Load a model and run its tasks.
    Check {
        file: PathBuf,
        /// Only run tasks whose names match this glob.
        #[arg(long)]
        task: Option<String>,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
    },
    /// Build a declared extension and write it as a model file.
    Export {
        file: PathBuf,
        #[arg(long)]
        extension: String,
        #[arg(short, long)]
        out: PathBuf,
    },
    /// Print the sign and index conventions.
    Conventions,
}

fn main() -> ExitCode {
    match Cli::parse().command {
        Command::Check { file, task, format } => {
            let model = match load_model(&file) {
                Ok(m) => m,
                Err(e) => {
                    eprintln!("{}: {e}", file.display());
                    return ExitCode::from(2);
                }
            };
            let report = match run(&model, task.as_deref()) {
                Ok(r) => r,
                Err(e) => {
                    eprintln!("invalid task filter: {e}");
                    return ExitCode::from(2);
                }
            };
            for w in &report.warnings {
                eprintln!("warning: {w}");
            }
            match format {
                Format::Text => println!("{report}"),
                Format::Json => println!("{}", report.to_json()),
            }
            ExitCode::from(report.exit_code() as u8)
        }
        Command::Export { file, extension, out } => {
            let model = match load_model(&file) {
                Ok(m) => m,
                Err(e) => {
                    eprintln!("{}: {e}", file.display());
                    return ExitCode::from(2);
                }
            };
            match export_extension(&model, &extension, &out) {
                Ok(()) => ExitCode::SUCCESS,
                Err(e) => {
                    eprintln!("{e}");
                    ExitCode::from(1)
                }
            }
        }
        Command::Conventions => {
            print!("{}", agd::conventions::SHEET);
            ExitCode::SUCCESS
        }
    }
}
