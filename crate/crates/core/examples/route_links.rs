//! Hop-limited, bandwidth-aware routing of single virtual links on a ring.
//!
//!     cargo run --example route_links

use hcmvne::embedding::{feasible_hops, route_virtual_link};
use hcmvne::{Amount, SubstrateNetwork};

fn main() -> hcmvne::Result<()> {
    let u = Amount::from_units;
    let mut sn = SubstrateNetwork::new();
    for _ in 0..6 {
        sn.add_node(u(100));
    }
    for (i, bw) in [80, 20, 80, 80, 80, 80].into_iter().enumerate() {
        sn.add_link(i, (i + 1) % 6, u(bw))?;
    }
    let r = sn.residuals();
    for (bw, hops) in [(10, 3), (50, 3), (50, 4)] {
        let dist = feasible_hops(&sn, &r, u(bw), 0, hops);
        println!("bw {bw}, at most {hops} hops: hop counts from node 0 {dist:?}");
        match route_virtual_link(&sn, &r, u(bw), 0, 3, hops) {
            Some(path) => println!("  0 -> 3 over links {path:?}"),
            None => println!("  0 -> 3 unreachable"),
        }
    }
    Ok(())
}
