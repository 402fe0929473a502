//! Generates a desk-sized substrate and workload, writes them as BRITE files
//! with a manifest, and reads everything back.
//!
//!     cargo run --example generate_topologies -- /tmp/hcm-topo 42

use std::path::PathBuf;

use hcmvne::workload::brite::{load_substrate, save_substrate};
use hcmvne::workload::manifest::{read_manifest, write_manifest};
use hcmvne::workload::{generate_substrate, generate_workload, SubstrateParams, WorkloadParams};

fn main() -> hcmvne::Result<()> {
    let mut args = std::env::args().skip(1);
    let dir = PathBuf::from(args.next().unwrap_or_else(|| "out/topologies".into()));
    let seed: u64 = args.next().map_or(1, |s| s.parse().expect("seed is an integer"));

    let sn = generate_substrate(&SubstrateParams::desk_scale(seed))?;
    let workload = generate_workload(&WorkloadParams::desk_scale(seed.wrapping_add(1)))?;
    println!(
        "substrate: {} nodes, {} links, connected {}, cpu {}",
        sn.node_count(),
        sn.link_count(),
        sn.is_connected(),
        sn.nodes().iter().map(|n| n.total_cpu).sum::<hcmvne::Amount>()
    );
    let nodes: usize = workload.iter().map(|r| r.graph.node_count()).sum();
    println!(
        "workload: {} requests, {nodes} virtual nodes, last arrival {}",
        workload.len(),
        workload.last().map_or(0, |r| r.arrival)
    );

    let sub_path = dir.join("substrate.brite");
    std::fs::create_dir_all(&dir).map_err(|e| hcmvne::Error::io(&dir, e))?;
    save_substrate(&sub_path, &sn)?;
    let manifest = write_manifest(&dir.join("workload"), &workload)?;
    assert_eq!(load_substrate(&sub_path)?, sn);
    assert_eq!(read_manifest(&manifest)?, workload);
    println!("wrote {} and {}", sub_path.display(), manifest.display());
    Ok(())
}
