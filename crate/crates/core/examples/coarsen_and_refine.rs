//! Heavy-clique coarsening of a random request, then boundary refinement of
//! a deliberately poor partition, step by step.
//!
//!     cargo run --example coarsen_and_refine

use hcmvne::coarsening::{coarsen_counting_rounds, Caps, CoarsenedGraph};
use hcmvne::refinement::{optimize_traced, RefineAction};
use hcmvne::workload::{generate_vn, LinkTarget, WaxmanParams, WaxmanShape};
use hcmvne::{Amount, VirtualNetwork};

fn show(label: &str, cg: &CoarsenedGraph<'_>) {
    println!("{label}: {} groups, crossing bandwidth {}", cg.node_count(), cg.crossing_bandwidth());
    for n in cg.nodes() {
        println!("  {:?} cpu {} external {}", n.members, n.cpu, n.external_bw);
    }
}

fn main() -> hcmvne::Result<()> {
    let u = Amount::from_units;
    let waxman = WaxmanParams {
        node_count: 10,
        target: LinkTarget::Density(0.5),
        shape: WaxmanShape::default(),
    };
    let vn = generate_vn(&waxman, &[u(500), u(1000), u(2000), u(2500)], (u(1), u(50)), 7)?;
    let caps = Caps { cpu_max: u(5320), bw_max: u(400) };
    let (cg, rounds) = coarsen_counting_rounds(&vn, caps);
    show(&format!("coarsened in {rounds} rounds"), &cg);

    // Two triangles whose joining link outweighs their internal links.
    let mut tri = VirtualNetwork::new();
    for _ in 0..6 {
        tri.add_node(u(10))?;
    }
    for (a, b) in [(0, 1), (1, 2), (2, 0), (3, 4), (4, 5), (5, 3)] {
        tri.add_link(a, b, u(10))?;
    }
    tri.add_link(0, 3, u(50))?;
    let start = CoarsenedGraph::from_groups(&tri, Caps { cpu_max: u(40), bw_max: u(1000) }, vec![vec![0, 1, 2], vec![3, 4, 5]]);
    show("before refinement", &start);
    let (refined, trace) = optimize_traced(&start);
    for s in &trace.steps {
        let what = match s.action {
            RefineAction::Move { node, from, to } => format!("move {node} {from}->{to}"),
            RefineAction::Swap { node, partner, from, to } => format!("swap {node}<->{partner} ({from}/{to})"),
        };
        println!("  sweep {}: {what}, crossing {} -> {}", s.sweep, s.crossing_before, s.crossing_after);
    }
    show(&format!("after {} sweeps", trace.sweeps), &refined);
    Ok(())
}
