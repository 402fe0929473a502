//! Hop-limited, bandwidth-filtered breadth-first search on the substrate.

use crate::amount::Amount;
use crate::network::{LinkId, NodeId, Path, Residuals, SubstrateNetwork};

/// Hop distance from `from` to every node over links with residual
/// bandwidth of at least `bw`, up to `max_hops`. `None` means unreachable.
pub fn feasible_hops(
    sn: &SubstrateNetwork,
    residuals: &Residuals,
    bw: Amount,
    from: NodeId,
    max_hops: usize,
) -> Vec<Option<usize>> {
    let mut dist = vec![None; sn.node_count()];
    dist[from] = Some(0);
    let mut frontier = vec![from];
    for depth in 1..=max_hops {
        let mut next = Vec::new();
        for &u in &frontier {
            for (l, w) in sn.neighbors(u) {
                if dist[w].is_none() && residuals.bw[l] >= bw {
                    dist[w] = Some(depth);
                    next.push(w);
                }
            }
        }
        if next.is_empty() {
            break;
        }
        frontier = next;
    }
    dist
}

/// A minimum-hop path from `from` to `to` of at most `max_hops` links, each
/// with residual bandwidth of at least `bw`. Among equal-hop predecessors
/// the lowest node id wins. `from == to` yields the empty path.
pub fn route_virtual_link(
    sn: &SubstrateNetwork,
    residuals: &Residuals,
    bw: Amount,
    from: NodeId,
    to: NodeId,
    max_hops: usize,
) -> Option<Path> {
    if from == to {
        return Some(Vec::new());
    }
    let mut parent: Vec<Option<(NodeId, LinkId)>> = vec![None; sn.node_count()];
    let mut seen = vec![false; sn.node_count()];
    seen[from] = true;
    let mut frontier = vec![from];
    'search: for _ in 0..max_hops {
        let mut next = Vec::new();
        for &u in &frontier {
            for (l, w) in sn.neighbors(u) {
                if !seen[w] && residuals.bw[l] >= bw {
                    seen[w] = true;
                    parent[w] = Some((u, l));
                    next.push(w);
                }
            }
        }
        if seen[to] {
            break 'search;
        }
        if next.is_empty() {
            return None;
        }
        next.sort_unstable();
        frontier = next;
    }
    if !seen[to] {
        return None;
    }
    let mut path = Vec::new();
    let mut at = to;
    while at != from {
        let (prev, l) = parent[at].expect("reached nodes have parents");
        path.push(l);
        at = prev;
    }
    path.reverse();
    Some(path)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn amt(u: i64) -> Amount {
        Amount::from_units(u)
    }

    /// 0-1 direct (thin), 0-2-1 detour (fat), 1-3.
    fn diamond() -> SubstrateNetwork {
        let mut sn = SubstrateNetwork::new();
        for _ in 0..4 {
            sn.add_node(amt(10));
        }
        sn.add_link(0, 1, amt(5)).unwrap(); // 0
        sn.add_link(0, 2, amt(50)).unwrap(); // 1
        sn.add_link(2, 1, amt(50)).unwrap(); // 2
        sn.add_link(1, 3, amt(50)).unwrap(); // 3
        sn
    }

    #[test]
    fn direct_link_when_it_fits() {
        let sn = diamond();
        let r = sn.residuals();
        assert_eq!(route_virtual_link(&sn, &r, amt(5), 0, 1, 2), Some(vec![0]));
    }

    #[test]
    fn detour_when_direct_is_too_thin() {
        let sn = diamond();
        let r = sn.residuals();
        assert_eq!(route_virtual_link(&sn, &r, amt(6), 0, 1, 2), Some(vec![1, 2]));
        assert_eq!(route_virtual_link(&sn, &r, amt(6), 0, 1, 1), None);
        assert_eq!(route_virtual_link(&sn, &r, amt(6), 0, 3, 2), None);
        assert_eq!(route_virtual_link(&sn, &r, amt(6), 0, 3, 3), Some(vec![1, 2, 3]));
        assert_eq!(route_virtual_link(&sn, &r, amt(60), 0, 2, 3), None);
    }

    #[test]
    fn same_endpoint_is_empty_path() {
        let sn = diamond();
        assert_eq!(route_virtual_link(&sn, &sn.residuals(), amt(1000), 2, 2, 0), Some(vec![]));
    }

    #[test]
    fn lowest_id_parent_breaks_ties() {
        // 0 reaches 3 through either 1 or 2; links added so 2 is seen first.
        let mut sn = SubstrateNetwork::new();
        for _ in 0..4 {
            sn.add_node(amt(1));
        }
        sn.add_link(0, 2, amt(1)).unwrap(); // 0
        sn.add_link(0, 1, amt(1)).unwrap(); // 1
        sn.add_link(2, 3, amt(1)).unwrap(); // 2
        sn.add_link(1, 3, amt(1)).unwrap(); // 3
        let r = sn.residuals();
        assert_eq!(route_virtual_link(&sn, &r, amt(1), 0, 3, 2), Some(vec![1, 3]));
    }

    #[test]
    fn hop_distances() {
        let sn = diamond();
        let r = sn.residuals();
        assert_eq!(
            feasible_hops(&sn, &r, amt(6), 0, 2),
            vec![Some(0), Some(2), Some(1), None]
        );
        assert_eq!(
            feasible_hops(&sn, &r, amt(1), 0, 2),
            vec![Some(0), Some(1), Some(1), Some(2)]
        );
    }
}
