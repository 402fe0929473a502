//! Random instances and brute-force oracles shared by the integration tests.
#![allow(dead_code)]

use std::collections::{BTreeSet, VecDeque};

use itertools::Itertools;
use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use hcmvne::coarsening::CoarsenedGraph;
use hcmvne::embedding::{CandidateBandwidth, EmbedParams};
use hcmvne::network::{LinkId, NodeId, Residuals, SubstrateNetwork, VirtualNetwork};
use hcmvne::Amount;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn units(u: i64) -> Amount {
    Amount::from_units(u)
}

fn amount_in<R: Rng>(rng: &mut R, lo: i64, hi: i64) -> Amount {
    Amount::from_hundredths(rng.random_range(lo * 100..=hi * 100))
}

/// Connected VN with `1..=max_nodes` nodes: a random tree plus extra links.
pub fn random_vn<R: Rng>(rng: &mut R, max_nodes: usize) -> VirtualNetwork {
    let n = rng.random_range(1..=max_nodes);
    let mut vn = VirtualNetwork::new();
    for _ in 0..n {
        let cpu = *[5, 10, 20, 40].choose(rng).unwrap();
        vn.add_node(units(cpu)).unwrap();
    }
    for v in 1..n {
        let u = rng.random_range(0..v);
        vn.add_link(u, v, amount_in(rng, 1, 30)).unwrap();
    }
    let extra_p: f64 = rng.random_range(0.0..0.7);
    for a in 0..n {
        for b in a + 1..n {
            if vn.link_between(a, b).is_none() && rng.random_bool(extra_p) {
                vn.add_link(a, b, amount_in(rng, 1, 30)).unwrap();
            }
        }
    }
    vn
}

/// Random substrate with `2..=max_nodes` nodes; not necessarily connected.
pub fn random_substrate<R: Rng>(rng: &mut R, max_nodes: usize) -> SubstrateNetwork {
    let n = rng.random_range(2..=max_nodes);
    let mut sn = SubstrateNetwork::new();
    for _ in 0..n {
        sn.add_node(amount_in(rng, 10, 120));
    }
    let p: f64 = rng.random_range(0.3..0.9);
    for a in 0..n {
        for b in a + 1..n {
            if rng.random_bool(p) {
                sn.add_link(a, b, amount_in(rng, 5, 80)).unwrap();
            }
        }
    }
    sn
}

/// Every simple path from `from` to `to` with at most `max_hops` links, each
/// link with residual bandwidth of at least `bw`. Paths are node sequences.
pub fn all_feasible_paths(
    sn: &SubstrateNetwork,
    r: &Residuals,
    bw: Amount,
    from: NodeId,
    to: NodeId,
    max_hops: usize,
) -> Vec<Vec<NodeId>> {
    fn walk(
        sn: &SubstrateNetwork,
        r: &Residuals,
        bw: Amount,
        to: NodeId,
        max_hops: usize,
        path: &mut Vec<NodeId>,
        out: &mut Vec<Vec<NodeId>>,
    ) {
        let at = *path.last().unwrap();
        if at == to {
            out.push(path.clone());
            return;
        }
        if path.len() > max_hops {
            return;
        }
        for l in sn.links() {
            let next = match l.other(at) {
                Some(n) => n,
                None => continue,
            };
            if r.bw[l.id] >= bw && !path.contains(&next) {
                path.push(next);
                walk(sn, r, bw, to, max_hops, path, out);
                path.pop();
            }
        }
    }
    let mut out = Vec::new();
    walk(sn, r, bw, to, max_hops, &mut vec![from], &mut out);
    out
}

pub fn min_hops(
    sn: &SubstrateNetwork,
    r: &Residuals,
    bw: Amount,
    from: NodeId,
    to: NodeId,
    max_hops: usize,
) -> Option<usize> {
    all_feasible_paths(sn, r, bw, from, to, max_hops)
        .iter()
        .map(|p| p.len() - 1)
        .min()
}

/// The minimum-hop feasible path whose node sequence, read backwards from
/// `to`, is lexicographically smallest; as link ids.
pub fn oracle_route(
    sn: &SubstrateNetwork,
    r: &Residuals,
    bw: Amount,
    from: NodeId,
    to: NodeId,
    max_hops: usize,
) -> Option<Vec<LinkId>> {
    if from == to {
        return Some(Vec::new());
    }
    let paths = all_feasible_paths(sn, r, bw, from, to, max_hops);
    let best = paths.iter().map(Vec::len).min()?;
    let chosen = paths
        .into_iter()
        .filter(|p| p.len() == best)
        .min_by_key(|p| p.iter().rev().copied().collect::<Vec<_>>())?;
    Some(
        chosen
            .windows(2)
            .map(|w| sn.link_between(w[0], w[1]).unwrap())
            .collect(),
    )
}

/// Breadth-first order over coarsened nodes: heaviest root, each level sorted
/// by `cpu + external_bw` descending then id; new roots for other components.
pub fn oracle_order(cg: &CoarsenedGraph<'_>) -> Vec<usize> {
    let n = cg.node_count();
    let weight = |c: usize| cg.node(c).cpu + cg.node(c).external_bw;
    let mut order = Vec::new();
    let mut seen = BTreeSet::new();
    while order.len() < n {
        let root = (0..n)
            .filter(|c| !seen.contains(c))
            .max_by_key(|&c| (weight(c), std::cmp::Reverse(c)))
            .unwrap();
        seen.insert(root);
        let mut level = vec![root];
        while !level.is_empty() {
            level.sort_by_key(|&c| (std::cmp::Reverse(weight(c)), c));
            let mut next = Vec::new();
            for &c in &level {
                for l in cg.links() {
                    if l.endpoints.0 == c || l.endpoints.1 == c {
                        let o = l.other(c);
                        if seen.insert(o) {
                            next.push(o);
                        }
                    }
                }
            }
            order.extend(level);
            level = next;
        }
    }
    order
}

/// Bandwidth the candidate filter asks of a path for coarsened link `l`.
pub fn filter_bw(cg: &CoarsenedGraph<'_>, l: usize, p: &EmbedParams) -> Amount {
    let link = &cg.links()[l];
    match p.candidate_bw {
        CandidateBandwidth::Aggregate => link.bw,
        CandidateBandwidth::Widest => link
            .members
            .iter()
            .map(|&v| cg.source().links()[v].bw)
            .max()
            .unwrap(),
    }
}

/// Tries one full injection `hosts[i]` for `order[i]` step by step: CPU,
/// path filter toward placed neighbors, then sequential routing of the new
/// virtual links in ascending id. `with_filter = false` drops the path filter.
pub fn injection_works(
    sn: &SubstrateNetwork,
    cg: &CoarsenedGraph<'_>,
    order: &[usize],
    hosts: &[NodeId],
    p: &EmbedParams,
    with_filter: bool,
) -> bool {
    let vn = cg.source();
    let mut r = sn.residuals();
    let mut host_of: Vec<Option<NodeId>> = vec![None; cg.node_count()];
    for (&c, &s) in order.iter().zip(hosts) {
        if r.cpu[s] < cg.node(c).cpu {
            return false;
        }
        let placed_links: Vec<usize> = (0..cg.links().len())
            .filter(|&l| {
                let (a, b) = cg.links()[l].endpoints;
                (a == c && host_of[b].is_some()) || (b == c && host_of[a].is_some())
            })
            .collect();
        if with_filter {
            for &l in &placed_links {
                let other = host_of[cg.links()[l].other(c)].unwrap();
                if min_hops(sn, &r, filter_bw(cg, l, p), other, s, p.max_hops).is_none() {
                    return false;
                }
            }
        }
        r.cpu[s] -= cg.node(c).cpu;
        host_of[c] = Some(s);
        let mut vlinks: Vec<LinkId> = placed_links
            .iter()
            .flat_map(|&l| cg.links()[l].members.iter().copied())
            .collect();
        vlinks.sort_unstable();
        for vl in vlinks {
            let link = &vn.links()[vl];
            let a = host_of[cg.owner(link.endpoints.0)].unwrap();
            let b = host_of[cg.owner(link.endpoints.1)].unwrap();
            match oracle_route(sn, &r, link.bw, a, b, p.max_hops) {
                Some(path) => {
                    for l in path {
                        r.bw[l] -= link.bw;
                    }
                }
                None => return false,
            }
        }
    }
    true
}

/// Whether any injection of coarsened nodes into substrate nodes works.
pub fn exists_injection(
    sn: &SubstrateNetwork,
    cg: &CoarsenedGraph<'_>,
    p: &EmbedParams,
    with_filter: bool,
) -> bool {
    let order = oracle_order(cg);
    (0..sn.node_count())
        .permutations(order.len())
        .any(|hosts| injection_works(sn, cg, &order, &hosts, p, with_filter))
}

/// Independent partition checks. Returns the first problem found.
pub fn recount(cg: &CoarsenedGraph<'_>) -> Result<(), String> {
    let vn = cg.source();
    let mut seen = vec![0usize; vn.node_count()];
    for (c, node) in cg.nodes().iter().enumerate() {
        if node.members.is_empty() {
            return Err(format!("group {c} empty"));
        }
        let mut cpu = Amount::ZERO;
        for &v in &node.members {
            seen[v] += 1;
            cpu += vn.nodes()[v].cpu;
            if cg.owner(v) != c {
                return Err(format!("owner of {v} is not {c}"));
            }
        }
        if cpu != node.cpu {
            return Err(format!("group {c} cpu {} recounted as {cpu}", node.cpu));
        }
        let inside = |v: NodeId| node.members.contains(&v);
        let mut internal = Vec::new();
        let mut external = Amount::ZERO;
        for l in vn.links() {
            match (inside(l.endpoints.0), inside(l.endpoints.1)) {
                (true, true) => internal.push(l.id),
                (true, false) | (false, true) => external += l.bw,
                _ => {}
            }
        }
        if internal != node.internal_links || external != node.external_bw {
            return Err(format!("group {c} link recount differs"));
        }
        let caps = cg.caps();
        if node.members.len() > 1 && (node.cpu > caps.cpu_max || node.external_bw > caps.bw_max) {
            return Err(format!("group {c} breaks the caps"));
        }
    }
    if seen.iter().any(|&k| k != 1) {
        return Err("not a partition".into());
    }
    let mut placed = vec![0usize; vn.link_count()];
    for node in cg.nodes() {
        for &l in &node.internal_links {
            placed[l] += 1;
        }
    }
    for cl in cg.links() {
        let mut bw = Amount::ZERO;
        for &l in &cl.members {
            placed[l] += 1;
            bw += vn.links()[l].bw;
            let (a, b) = vn.links()[l].endpoints;
            let ends = (cg.owner(a).min(cg.owner(b)), cg.owner(a).max(cg.owner(b)));
            if ends != cl.endpoints {
                return Err(format!("link {l} filed under the wrong coarsened link"));
            }
        }
        if bw != cl.bw {
            return Err(format!("coarsened link {} bw recount differs", cl.id));
        }
    }
    if placed.iter().any(|&k| k != 1) {
        return Err("virtual links not conserved".into());
    }
    Ok(())
}

/// Crossing bandwidth of an owner assignment, from the virtual links alone.
pub fn crossing(vn: &VirtualNetwork, owner: &[usize]) -> Amount {
    vn.links()
        .iter()
        .filter(|l| owner[l.endpoints.0] != owner[l.endpoints.1])
        .map(|l| l.bw)
        .sum()
}

/// Distinct hosts reachable in BFS hop order; used for sanity only.
pub fn hop_ball(sn: &SubstrateNetwork, from: NodeId, hops: usize) -> BTreeSet<NodeId> {
    let mut seen = BTreeSet::from([from]);
    let mut q = VecDeque::from([(from, 0)]);
    while let Some((u, d)) = q.pop_front() {
        if d == hops {
            continue;
        }
        for (_, w) in sn.neighbors(u) {
            if seen.insert(w) {
                q.push_back((w, d + 1));
            }
        }
    }
    seen
}
