//! Runs a JSON experiment config through the same pipeline as the `mmd-ext`
//! binary and prints the summary.
//!
//!     cargo run --release --example run_config -- configs/half_grid_full.json [out-dir]

use std::path::PathBuf;

use mmd_extension::cli::{execute, ExperimentConfig};

fn main() -> mmd_extension::Result<()> {
    let mut args = std::env::args().skip(1);
    let path = args.next().map(PathBuf::from).unwrap_or_else(|| {
        PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("configs/geometry_path.json")
    });
    let config = ExperimentConfig::load(&path)?;
    config.validate()?;
    let run = execute(&config)?;
    for (name, report) in run.sections.iter().map(|s| (s.experiment.name(), &s.report)) {
        let sum = report.summary();
        println!("{name:<16} {:>4} checks, {:>4} failed", sum.total, sum.failed);
    }
    if let Some(dir) = args.next() {
        run.write(&PathBuf::from(&dir))?;
        println!("wrote {dir}");
    }
    println!("all pass: {}", run.report.all_pass());
    Ok(())
}
