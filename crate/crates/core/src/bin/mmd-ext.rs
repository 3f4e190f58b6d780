use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use mmd_extension::cli::{exit_code, run_experiment, ExperimentConfig, RunReport, OUTPUT_DIR_ENV};
use mmd_extension::io::read_json;

#[derive(Parser)]
#[command(name = "mmd-ext", version, about = "Run Whitney/reflection/extension experiments from a JSON config")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run every enabled experiment and write the report and tables.
    Run { config: PathBuf },
    /// Check the config against the parameter regime without running.
    Validate { config: PathBuf },
    /// Print the summary of an existing report.
    Report {
        #[arg(long)]
        summary: PathBuf,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let code = match cli.command {
        Command::Run { config } => run(&config),
        Command::Validate { config } => match ExperimentConfig::load(&config).and_then(|c| c.validate()) {
            Ok(()) => {
                println!("{}: ok", config.display());
                0
            }
            Err(e) => {
                eprintln!("{}: {e}", config.display());
                2
            }
        },
        Command::Report { summary } => match read_json::<RunReport>(&summary) {
            Ok(r) => {
                print_summary(&r);
                if r.all_pass() { 0 } else { 1 }
            }
            Err(e) => {
                eprintln!("{}: {e}", summary.display());
                2
            }
        },
    };
    ExitCode::from(code as u8)
}

fn run(path: &Path) -> i32 {
    let config = match ExperimentConfig::load(path) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("{}: {e}", path.display());
            return 2;
        }
    };
    let out = std::env::var_os(OUTPUT_DIR_ENV).map(PathBuf::from).unwrap_or_else(|| config.output_dir.clone());
    let result = run_experiment(&config, &out);
    match &result {
        Ok(r) => {
            print_summary(r);
            println!("wrote {}", out.join("report.json").display());
        }
        Err(e) => eprintln!("error: {e}"),
    }
    exit_code(&result)
}

fn print_summary(r: &RunReport) {
    let names: Vec<&str> = r.experiments.iter().map(|e| e.name()).collect();
    println!("experiments: {}", names.join(", "));
    println!("checks: {} total, {} passed, {} failed", r.summary.total, r.summary.passed, r.summary.failed);
    for f in r.failures() {
        println!("  FAIL {} measured={} {}", f.check, mmd_extension::io::cell(f.measured), f.notes);
    }
}
