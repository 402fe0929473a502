//! The file-driven pipeline: parse a config, generate inputs, simulate every
//! algorithm, then summarize the report CSVs and draw SVG plots.
//!
//!     cargo run --release --example config_pipeline -- configs/desk.conf out/pipeline

use std::path::PathBuf;

use hcmvne::cli::{cmd_generate, cmd_report, cmd_simulate, RunConfig};

fn main() -> hcmvne::Result<()> {
    let root = PathBuf::from(env!("CARGO_MANIFEST_DIR"));
    let mut args = std::env::args().skip(1).map(PathBuf::from);
    let conf = args.next().unwrap_or_else(|| root.join("configs/desk.conf"));
    let out = args.next().unwrap_or_else(|| PathBuf::from("out/pipeline"));

    let text = std::fs::read_to_string(&conf).map_err(|e| hcmvne::Error::io(&conf, e))?;
    let mut cfg = RunConfig::parse(&text)?;
    cfg.repetitions = 1;
    cfg.out = out.clone();

    let g = cmd_generate(&cfg)?;
    println!("inputs: {} and {}", g.substrate.display(), g.manifest.display());
    cfg.substrate_file = Some(g.substrate);
    cfg.manifest_file = Some(g.manifest);

    let runs = cmd_simulate(&cfg, 3)?;
    let reports: Vec<PathBuf> = runs.iter().map(|r| r.report.clone()).collect();
    print!("{}", cmd_report(&reports, Some(&out))?);
    println!("plots in {}", out.display());
    Ok(())
}
