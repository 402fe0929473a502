//! A request whose first placement strands its second node, showing how the
//! backtrack budget decides between recovery and rejection.
//!
//!     cargo run --example backtracking

use hcmvne::embedding::{Algorithm, BacktrackLimit, EmbedParams};
use hcmvne::{Amount, SubstrateNetwork, VirtualNetwork};

fn main() -> hcmvne::Result<()> {
    let u = Amount::from_units;
    let mut sn = SubstrateNetwork::new();
    for cpu in [200, 40, 60, 5] {
        sn.add_node(u(cpu));
    }
    sn.add_link(0, 1, u(1))?;
    sn.add_link(1, 2, u(100))?;
    sn.add_link(2, 3, u(100))?;
    sn.add_link(0, 3, u(100))?;
    let mut vn = VirtualNetwork::new();
    vn.add_node(u(50))?;
    vn.add_node(u(30))?;
    vn.add_link(0, 1, u(10))?;

    for limit in [BacktrackLimit::Fixed(0), BacktrackLimit::PerNode(3), BacktrackLimit::Unlimited] {
        let p = EmbedParams { max_hops: 1, max_backtrack: limit, ..EmbedParams::default() };
        let out = Algorithm::NoCoarsen.embed(&vn, &sn, &p);
        match &out.map {
            Some(m) => println!("limit {limit:<4} ok after {} backtracks: hosts {:?}", out.backtracks, m.node_map),
            None => println!(
                "limit {limit:<4} failed after {} backtracks: {}",
                out.backtracks,
                out.failure.expect("failure reason")
            ),
        }
    }
    Ok(())
}
