//! Embedding order, candidate lists, and the backtracking search.

use crate::coarsening::{CoarseId, CoarseRoute, CoarseMap, CoarsenedGraph};
use crate::network::{LinkId, NodeId, Path, Residuals, SubstrateNetwork};

use super::routing::{feasible_hops, route_virtual_link};
use super::{CandidateBandwidth, EmbedParams, FailureReason};

/// Breadth-first order over the coarsened graph. The root is the node with
/// the most resources (`cpu + external_bw`); each level is sorted by the
/// same key, descending, ties to the lowest id. Disconnected components are
/// appended the same way, heaviest remaining node first.
pub fn embed_order(cg: &CoarsenedGraph<'_>) -> Vec<CoarseId> {
    let key = |c: &CoarseId| (std::cmp::Reverse(cg.node(*c).resources()), *c);
    let mut roots: Vec<CoarseId> = (0..cg.node_count()).collect();
    roots.sort_by_key(key);
    let mut seen = vec![false; cg.node_count()];
    let mut order = Vec::with_capacity(cg.node_count());
    for root in roots {
        if seen[root] {
            continue;
        }
        seen[root] = true;
        let mut level = vec![root];
        while !level.is_empty() {
            level.sort_by_key(key);
            let mut next = Vec::new();
            for &c in &level {
                for (_, nb) in cg.neighbors(c) {
                    if !seen[nb] {
                        seen[nb] = true;
                        next.push(nb);
                    }
                }
            }
            order.append(&mut level);
            level = next;
        }
    }
    order
}

/// Coarsened links from `c` to already placed neighbors: `(link, neighbor, host)`.
fn placed_neighbors(
    cg: &CoarsenedGraph<'_>,
    c: CoarseId,
    hosts: &[Option<NodeId>],
) -> Vec<(CoarseId, CoarseId, NodeId)> {
    cg.neighbors(c)
        .filter_map(|(l, nb)| hosts[nb].map(|h| (l, nb, h)))
        .collect()
}

/// Substrate nodes able to host `c` given the placed neighbors.
///
/// With no placed neighbor: every node with enough residual CPU, most
/// available resources first. Otherwise a node must also reach every
/// neighbor's host within `max_hops` over links that can carry the coarsened
/// link (see [`CandidateBandwidth`]); these are ordered by the cheapest total
/// link cost (bandwidth times hops), then by available resources, then by id.
/// When `distinct_hosts` is set, hosts of other coarsened nodes are skipped.
pub fn build_candidates(
    cg: &CoarsenedGraph<'_>,
    c: CoarseId,
    hosts: &[Option<NodeId>],
    sn: &SubstrateNetwork,
    residuals: &Residuals,
    p: &EmbedParams,
) -> Vec<NodeId> {
    let cpu = cg.node(c).cpu;
    let mut used = vec![false; sn.node_count()];
    if p.distinct_hosts {
        for h in hosts.iter().flatten() {
            used[*h] = true;
        }
    }
    let eligible = |s: NodeId| !used[s] && residuals.cpu[s] >= cpu;
    let placed = placed_neighbors(cg, c, hosts);

    if placed.is_empty() {
        let mut out: Vec<(NodeId, _)> = (0..sn.node_count())
            .filter(|&s| eligible(s))
            .map(|s| (s, residuals.available(sn, s)))
            .collect();
        out.sort_by(|a, b| b.1.cmp(&a.1).then(a.0.cmp(&b.0)));
        return out.into_iter().map(|(s, _)| s).collect();
    }

    let trees: Vec<(crate::amount::Amount, Vec<Option<usize>>)> = placed
        .iter()
        .map(|&(l, _, h)| {
            let link = &cg.links()[l];
            let need = match p.candidate_bw {
                CandidateBandwidth::Aggregate => link.bw,
                CandidateBandwidth::Widest => link
                    .members
                    .iter()
                    .map(|&v| cg.source().links()[v].bw)
                    .max()
                    .expect("coarsened links are non-empty"),
            };
            (link.bw, feasible_hops(sn, residuals, need, h, p.max_hops))
        })
        .collect();
    let mut out = Vec::new();
    for s in 0..sn.node_count() {
        if !eligible(s) {
            continue;
        }
        let mut cost = crate::amount::Amount::ZERO;
        let mut reachable = true;
        for (bw, dist) in &trees {
            match dist[s] {
                Some(d) => cost += *bw * d as u64,
                None => {
                    reachable = false;
                    break;
                }
            }
        }
        if reachable {
            out.push((s, cost, residuals.available(sn, s)));
        }
    }
    out.sort_by(|a, b| a.1.cmp(&b.1).then(b.2.cmp(&a.2)).then(a.0.cmp(&b.0)));
    out.into_iter().map(|(s, _, _)| s).collect()
}

/// What one `add` reserved, for exact reversal.
struct Placement {
    node: CoarseId,
    host: NodeId,
    routed: Vec<LinkId>,
}

pub(crate) struct SearchResult {
    pub map: Option<CoarseMap>,
    pub backtracks: u64,
    pub failure: Option<FailureReason>,
}

/// Recursive placement of coarsened nodes in `order`, reserving capacity on
/// a scratch copy of the residuals as it goes.
pub(crate) struct Search<'s, 'a> {
    sn: &'s SubstrateNetwork,
    cg: &'s CoarsenedGraph<'a>,
    order: &'s [CoarseId],
    params: &'s EmbedParams,
    limit: Option<u64>,
    residuals: Residuals,
    hosts: Vec<Option<NodeId>>,
    /// Substrate path per virtual link; `None` until both ends are placed.
    paths: Vec<Option<Path>>,
    backtracks: u64,
    limit_hit: bool,
}

impl<'s, 'a> Search<'s, 'a> {
    pub fn new(
        sn: &'s SubstrateNetwork,
        cg: &'s CoarsenedGraph<'a>,
        order: &'s [CoarseId],
        params: &'s EmbedParams,
        limit: Option<u64>,
    ) -> Self {
        Search {
            sn,
            cg,
            order,
            params,
            limit,
            residuals: sn.residuals(),
            hosts: vec![None; cg.node_count()],
            paths: vec![None; cg.source().link_count()],
            backtracks: 0,
            limit_hit: false,
        }
    }

    pub fn run(mut self) -> SearchResult {
        let ok = self.embed(0);
        debug_assert!(ok || self.residuals == self.sn.residuals());
        if !ok {
            return SearchResult {
                map: None,
                backtracks: self.backtracks,
                failure: Some(if self.limit_hit {
                    FailureReason::BacktrackLimit
                } else {
                    FailureReason::NoCandidates
                }),
            };
        }
        let vn = self.cg.source();
        let routes = self
            .cg
            .links()
            .iter()
            .map(|l| {
                CoarseRoute::PerMember(
                    l.members
                        .iter()
                        .map(|&v| self.paths[v].clone().expect("routed"))
                        .collect(),
                )
            })
            .collect();
        debug_assert_eq!(self.paths.iter().filter(|p| p.is_some()).count(), vn.link_count()
            - self.cg.nodes().iter().map(|n| n.internal_links.len()).sum::<usize>());
        SearchResult {
            map: Some(CoarseMap {
                hosts: self.hosts.iter().map(|h| h.expect("placed")).collect(),
                routes,
                max_hops: self.params.max_hops,
            }),
            backtracks: self.backtracks,
            failure: None,
        }
    }

    fn embed(&mut self, pos: usize) -> bool {
        if pos == self.order.len() {
            return true;
        }
        let c = self.order[pos];
        let candidates = build_candidates(
            self.cg,
            c,
            &self.hosts,
            self.sn,
            &self.residuals,
            self.params,
        );
        for s in candidates {
            if let Some(placement) = self.add(c, s) {
                if self.embed(pos + 1) {
                    return true;
                }
                self.delete(placement);
            }
            if self.limit.is_some_and(|limit| self.backtracks > limit) {
                self.limit_hit = true;
                return false;
            }
        }
        self.backtracks += 1;
        false
    }

    /// Places `c` on `s` and routes every virtual link toward placed
    /// neighbors, one at a time in ascending id. Returns `None` (with nothing
    /// reserved) if some link cannot be routed.
    fn add(&mut self, c: CoarseId, s: NodeId) -> Option<Placement> {
        let vn = self.cg.source();
        self.residuals.cpu[s] -= self.cg.node(c).cpu;
        self.hosts[c] = Some(s);
        let mut placement = Placement {
            node: c,
            host: s,
            routed: Vec::new(),
        };
        let mut pending: Vec<LinkId> = placed_neighbors(self.cg, c, &self.hosts)
            .into_iter()
            .flat_map(|(l, _, _)| self.cg.links()[l].members.iter().copied())
            .collect();
        pending.sort_unstable();
        for vl in pending {
            let link = &vn.links()[vl];
            let from = self.hosts[self.cg.owner(link.endpoints.0)].expect("placed");
            let to = self.hosts[self.cg.owner(link.endpoints.1)].expect("placed");
            match route_virtual_link(self.sn, &self.residuals, link.bw, from, to, self.params.max_hops) {
                Some(path) => {
                    for &pl in &path {
                        self.residuals.bw[pl] -= link.bw;
                    }
                    self.paths[vl] = Some(path);
                    placement.routed.push(vl);
                }
                None => {
                    self.delete(placement);
                    return None;
                }
            }
        }
        Some(placement)
    }

    fn delete(&mut self, p: Placement) {
        let vn = self.cg.source();
        for vl in p.routed {
            let bw = vn.links()[vl].bw;
            for &pl in self.paths[vl].as_ref().expect("routed") {
                self.residuals.bw[pl] += bw;
            }
            self.paths[vl] = None;
        }
        self.residuals.cpu[p.host] += self.cg.node(p.node).cpu;
        self.hosts[p.node] = None;
    }
}
