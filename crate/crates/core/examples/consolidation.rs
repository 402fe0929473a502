//! Two triangles joined by one link, on three servers where only two can
//! hold a whole triangle. Plain search needs six distinct hosts and fails;
//! coarsening packs each triangle onto one server.
//!
//!     cargo run --example consolidation

use hcmvne::embedding::{Algorithm, EmbedParams};
use hcmvne::network::{cost, SubstrateNetwork, VirtualNetwork, VnRequest};
use hcmvne::Amount;

fn main() -> hcmvne::Result<()> {
    let u = Amount::from_units;
    let mut vn = VirtualNetwork::new();
    for _ in 0..6 {
        vn.add_node(u(10))?;
    }
    for (a, b) in [(0, 1), (1, 2), (2, 0), (3, 4), (4, 5), (5, 3), (0, 3)] {
        vn.add_link(a, b, u(5))?;
    }

    let mut sn = SubstrateNetwork::new();
    for cpu in [30, 30, 5] {
        sn.add_node(u(cpu));
    }
    sn.add_link(0, 1, u(100))?;
    sn.add_link(1, 2, u(100))?;

    let req = VnRequest::new(0, vn.clone(), 0, 1)?;
    for a in Algorithm::ALL {
        let out = a.embed(&vn, &sn, &EmbedParams::default());
        match &out.map {
            Some(m) => println!(
                "{a:<10} ok: hosts {:?}, {} links routed, cost {}",
                m.node_map,
                m.routed_links(),
                cost(&req, m)?
            ),
            None => println!("{a:<10} failed: {}", out.failure.expect("failure reason")),
        }
    }
    Ok(())
}
