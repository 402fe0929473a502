//! The batch commands behind the `hcmvne` binary: generate, embed, simulate
//! and report.

mod config;
pub mod plot;

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::Serialize;

use crate::embedding::{Algorithm, EmbedOutcome, EmbedParams};
use crate::error::{Error, Result};
use crate::network::{cost, revenue, SubstrateNetwork, VnRequest};
use crate::simulation::{
    read_report_csv, run_simulation, write_report_csv, write_request_log, SimSettings,
};
use crate::workload::brite::{self, load_substrate, load_vn, save_substrate};
use crate::workload::manifest::{read_manifest, write_manifest};
use crate::workload::{generate_substrate, generate_workload};

pub use config::{derive_seeds, Preset, RunConfig};

pub const LOCK_FILE: &str = "config.lock";
pub const SUBSTRATE_FILE: &str = "substrate.brite";
pub const WORKLOAD_DIR: &str = "workload";

/// Process exit status for an error: 2 for usage and configuration
/// problems, 1 for everything else.
pub fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Config(_) | Error::Params(_) => 2,
        _ => 1,
    }
}

fn create_dir(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))
}

fn write_lock(cfg: &RunConfig) -> Result<PathBuf> {
    create_dir(&cfg.out)?;
    let path = cfg.out.join(LOCK_FILE);
    brite::write_file(&path, &cfg.lock_text())?;
    Ok(path)
}

#[derive(Debug)]
pub struct Generated {
    pub substrate: PathBuf,
    pub manifest: PathBuf,
    pub lock: PathBuf,
}

/// Writes the substrate, one BRITE file per request, the manifest and
/// `config.lock` under `cfg.out`.
pub fn cmd_generate(cfg: &RunConfig) -> Result<Generated> {
    let lock = write_lock(cfg)?;
    let sn = generate_substrate(&cfg.substrate)?;
    let substrate = cfg.out.join(SUBSTRATE_FILE);
    save_substrate(&substrate, &sn)?;
    let workload = generate_workload(&cfg.workload)?;
    let manifest = write_manifest(&cfg.out.join(WORKLOAD_DIR), &workload)?;
    log::info!(
        "wrote {} ({} nodes, {} links) and {} requests",
        substrate.display(),
        sn.node_count(),
        sn.link_count(),
        workload.len()
    );
    Ok(Generated {
        substrate,
        manifest,
        lock,
    })
}

/// The substrate and requests a run works on: loaded when the config names
/// files, generated otherwise.
pub fn load_inputs(cfg: &RunConfig) -> Result<(SubstrateNetwork, Vec<VnRequest>)> {
    let sn = match &cfg.substrate_file {
        Some(p) => load_substrate(p)?,
        None => generate_substrate(&cfg.substrate)?,
    };
    let workload = match &cfg.manifest_file {
        Some(p) => read_manifest(p)?,
        None => generate_workload(&cfg.workload)?,
    };
    Ok((sn, workload))
}

#[derive(Debug, Serialize)]
pub struct EmbedReport {
    pub algorithm: Algorithm,
    pub outcome: EmbedOutcome,
    pub revenue: String,
    pub cost: Option<String>,
}

impl EmbedReport {
    pub fn human(&self) -> String {
        let mut s = String::new();
        let o = &self.outcome;
        let _ = writeln!(s, "algorithm: {}", self.algorithm);
        match &o.map {
            Some(m) => {
                let _ = writeln!(
                    s,
                    "embedded: {} coarsened nodes on {} hosts, {} backtracks",
                    o.coarsened_nodes,
                    m.hosts().len(),
                    o.backtracks
                );
                for (v, h) in m.node_map.iter().enumerate() {
                    let _ = writeln!(s, "  node {v} -> {h}");
                }
                for (l, p) in m.link_map.iter().enumerate() {
                    let path: Vec<String> = p.iter().map(ToString::to_string).collect();
                    let _ = writeln!(s, "  link {l} -> [{}]", path.join(" "));
                }
                let _ = writeln!(
                    s,
                    "revenue {}  cost {}",
                    self.revenue,
                    self.cost.as_deref().unwrap_or("-")
                );
            }
            None => {
                let reason = o.failure.map(|r| r.to_string()).unwrap_or_default();
                let _ = writeln!(s, "rejected: {reason} after {} backtracks", o.backtracks);
            }
        }
        s
    }

    pub fn json(&self) -> String {
        serde_json::to_string(self).expect("plain data serializes")
    }
}

/// Embeds one virtual network on one substrate without modifying either file.
pub fn cmd_embed(
    substrate: &Path,
    vn: &Path,
    algorithm: Algorithm,
    params: &EmbedParams,
) -> Result<EmbedReport> {
    let sn = load_substrate(substrate)?;
    let graph = load_vn(vn)?;
    let outcome = algorithm.embed(&graph, &sn, params);
    let vnr = VnRequest::new(0, graph, 0, 1)?;
    let cost = match &outcome.map {
        Some(m) => Some(cost(&vnr, m)?.to_string()),
        None => None,
    };
    Ok(EmbedReport {
        algorithm,
        revenue: revenue(&vnr).to_string(),
        cost,
        outcome,
    })
}

#[derive(Clone, Debug)]
pub struct RunOutput {
    pub seed: u64,
    pub algorithm: Algorithm,
    pub report: PathBuf,
    pub requests: PathBuf,
    pub acceptance: f64,
    pub avg_revenue: f64,
    pub rc_ratio: f64,
}

pub fn report_file_name(algorithm: Algorithm) -> String {
    format!("report_{algorithm}.csv")
}

pub fn request_log_name(algorithm: Algorithm) -> String {
    format!("requests_{algorithm}.csv")
}

/// Runs every configured algorithm on every repetition, `jobs` at a time.
/// One repetition writes to `out`; several write to `out/seed_<seed>`.
pub fn cmd_simulate(cfg: &RunConfig, jobs: usize) -> Result<Vec<RunOutput>> {
    write_lock(cfg)?;
    let reps: Vec<RunConfig> = (0..cfg.repetitions).map(|i| cfg.repetition(i)).collect();
    let inputs: Vec<(RunConfig, PathBuf, SubstrateNetwork, Vec<VnRequest>)> = reps
        .into_iter()
        .map(|r| {
            let dir = if cfg.repetitions == 1 {
                cfg.out.clone()
            } else {
                cfg.out.join(format!("seed_{}", r.seed))
            };
            create_dir(&dir)?;
            let (sn, w) = load_inputs(&r)?;
            Ok((r, dir, sn, w))
        })
        .collect::<Result<_>>()?;
    let tasks: Vec<(usize, Algorithm)> = (0..inputs.len())
        .flat_map(|i| cfg.algorithms.iter().map(move |&a| (i, a)))
        .collect();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs.max(1))
        .build()
        .map_err(|e| Error::Params(e.to_string()))?;
    pool.install(|| {
        tasks
            .par_iter()
            .map(|&(i, algorithm)| {
                let (r, dir, sn, workload) = &inputs[i];
                let settings = SimSettings {
                    algorithm,
                    params: r.embed,
                    horizon: r.horizon,
                    sample_interval: r.sample_interval,
                };
                let rep = run_simulation(&mut sn.clone(), workload, &settings)?;
                let report = dir.join(report_file_name(algorithm));
                let requests = dir.join(request_log_name(algorithm));
                write_report_csv(&rep, &report)?;
                write_request_log(&rep, &requests)?;
                let last = rep.last();
                Ok(RunOutput {
                    seed: r.seed,
                    algorithm,
                    report,
                    requests,
                    acceptance: last.acceptance_ratio(),
                    avg_revenue: last.average_revenue(),
                    rc_ratio: last.revenue_cost_ratio(),
                })
            })
            .collect()
    })
}

/// Endpoint table for report CSVs, in the order given. With `plot_dir`, also
/// writes one SVG per metric there.
pub fn cmd_report(files: &[PathBuf], plot_dir: Option<&Path>) -> Result<String> {
    let mut series = Vec::new();
    for f in files {
        let rows = read_report_csv(f)?;
        let name = f
            .file_stem()
            .map(|s| s.to_string_lossy().trim_start_matches("report_").to_string())
            .unwrap_or_else(|| f.display().to_string());
        series.push((name, rows));
    }
    let width = series.iter().map(|(n, _)| n.len()).max().unwrap_or(0).max(9);
    let mut t = String::new();
    let _ = writeln!(
        t,
        "{:<width$}  {:>8}  {:>10}  {:>12}  {:>8}",
        "run", "time", "acceptance", "avg_revenue", "rc_ratio"
    );
    for (name, rows) in &series {
        match rows.last() {
            Some(r) => {
                let _ = writeln!(
                    t,
                    "{name:<width$}  {:>8}  {:>10.4}  {:>12.2}  {:>8.4}",
                    r.time, r.acceptance_ratio, r.avg_revenue, r.rc_ratio
                );
            }
            None => {
                let _ = writeln!(t, "{name:<width$}  (no rows)");
            }
        }
    }
    if let Some(dir) = plot_dir {
        create_dir(dir)?;
        type Pick = fn(&crate::simulation::ReportRow) -> f64;
        let metrics: [(&str, &str, Pick); 3] = [
            ("acceptance_ratio", "Acceptance ratio", |r| r.acceptance_ratio),
            ("avg_revenue", "Average revenue", |r| r.avg_revenue),
            ("rc_ratio", "Revenue / cost", |r| r.rc_ratio),
        ];
        for (file, title, pick) in metrics {
            let lines: Vec<(String, Vec<(f64, f64)>)> = series
                .iter()
                .map(|(n, rows)| (n.clone(), rows.iter().map(|r| (r.time as f64, pick(r))).collect()))
                .collect();
            brite::write_file(&dir.join(format!("{file}.svg")), &plot::line_chart(title, &lines))?;
        }
    }
    Ok(t)
}
