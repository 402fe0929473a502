//! Embedding a virtual network onto a substrate: the coarsen/refine/search
//! pipeline and two baselines for comparison.

mod routing;
mod search;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::amount::Amount;
use crate::coarsening::{coarsen, uncoarsen_map, Caps, CoarsenedGraph};
use crate::network::{EmbeddingMap, NodeId, Path, SubstrateNetwork, VirtualNetwork};
use crate::refinement::optimize;

pub use routing::{feasible_hops, route_virtual_link};
pub use search::{build_candidates, embed_order};

/// Cap on failed candidate loops during one embedding attempt.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum BacktrackLimit {
    Fixed(u64),
    /// A multiple of the request's virtual node count.
    PerNode(u64),
    Unlimited,
}

impl BacktrackLimit {
    pub fn resolve(self, virtual_nodes: usize) -> Option<u64> {
        match self {
            BacktrackLimit::Fixed(n) => Some(n),
            BacktrackLimit::PerNode(k) => Some(k * virtual_nodes as u64),
            BacktrackLimit::Unlimited => None,
        }
    }
}

impl fmt::Display for BacktrackLimit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BacktrackLimit::Fixed(n) => f.pad(&n.to_string()),
            BacktrackLimit::PerNode(k) => f.pad(&format!("{k}n")),
            BacktrackLimit::Unlimited => f.pad("inf"),
        }
    }
}

impl FromStr for BacktrackLimit {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        if s == "inf" || s == "unlimited" {
            return Ok(BacktrackLimit::Unlimited);
        }
        let bad = || format!("bad backtrack limit {s:?} (expected N, Kn or inf)");
        match s.strip_suffix('n') {
            Some("") => Ok(BacktrackLimit::PerNode(1)),
            Some(k) => k.parse().map(BacktrackLimit::PerNode).map_err(|_| bad()),
            None => s.parse().map(BacktrackLimit::Fixed).map_err(|_| bad()),
        }
    }
}

/// Bandwidth a substrate path must offer for a host to become a candidate
/// next to an already placed neighbor.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CandidateBandwidth {
    /// The whole coarsened link, as if all its members shared one path.
    #[default]
    Aggregate,
    /// Only its widest member. Members are routed one by one anyway, so this
    /// prunes nothing routing could still use.
    Widest,
}

impl fmt::Display for CandidateBandwidth {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.pad(match self {
            CandidateBandwidth::Aggregate => "aggregate",
            CandidateBandwidth::Widest => "widest",
        })
    }
}

impl FromStr for CandidateBandwidth {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim() {
            "aggregate" => Ok(CandidateBandwidth::Aggregate),
            "widest" => Ok(CandidateBandwidth::Widest),
            other => Err(format!("unknown candidate bandwidth rule {other:?} (aggregate, widest)")),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EmbedParams {
    pub max_hops: usize,
    pub max_backtrack: BacktrackLimit,
    /// Forbid two coarsened nodes of one request on the same substrate node.
    pub distinct_hosts: bool,
    pub candidate_bw: CandidateBandwidth,
}

impl Default for EmbedParams {
    fn default() -> Self {
        EmbedParams {
            max_hops: 2,
            max_backtrack: BacktrackLimit::PerNode(3),
            distinct_hosts: true,
            candidate_bw: CandidateBandwidth::Aggregate,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FailureReason {
    NoCandidates,
    BacktrackLimit,
    /// Greedy only: a link had no feasible path once nodes were fixed.
    LinkMapping,
}

impl fmt::Display for FailureReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.pad(match self {
            FailureReason::NoCandidates => "no-candidates",
            FailureReason::BacktrackLimit => "backtrack-limit",
            FailureReason::LinkMapping => "link-mapping",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EmbedOutcome {
    /// Present exactly when the embedding succeeded.
    pub map: Option<EmbeddingMap>,
    pub backtracks: u64,
    pub failure: Option<FailureReason>,
    /// Number of coarsened nodes the search placed.
    pub coarsened_nodes: usize,
}

impl EmbedOutcome {
    pub fn success(&self) -> bool {
        self.map.is_some()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Algorithm {
    Hcm,
    NoCoarsen,
    Greedy,
}

impl Algorithm {
    pub const ALL: [Algorithm; 3] = [Algorithm::Hcm, Algorithm::NoCoarsen, Algorithm::Greedy];

    pub fn embed(self, vn: &VirtualNetwork, sn: &SubstrateNetwork, p: &EmbedParams) -> EmbedOutcome {
        match self {
            Algorithm::Hcm => hcm_embed(vn, sn, p),
            Algorithm::NoCoarsen => baseline_no_coarsen(vn, sn, p),
            Algorithm::Greedy => baseline_greedy(vn, sn, p),
        }
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.pad(match self {
            Algorithm::Hcm => "hcm",
            Algorithm::NoCoarsen => "no-coarsen",
            Algorithm::Greedy => "greedy",
        })
    }
}

impl FromStr for Algorithm {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim() {
            "hcm" => Ok(Algorithm::Hcm),
            "no-coarsen" => Ok(Algorithm::NoCoarsen),
            "greedy" => Ok(Algorithm::Greedy),
            other => Err(format!("unknown algorithm {other:?} (hcm, no-coarsen, greedy)")),
        }
    }
}

/// Coarsening caps from the substrate's current residuals: the largest
/// residual CPU of any node, and the largest residual bandwidth incident to
/// any node.
pub fn caps_for(sn: &SubstrateNetwork) -> Caps {
    let r = sn.residuals();
    let cpu_max = r.cpu.iter().copied().max().unwrap_or(Amount::ZERO);
    let bw_max = (0..sn.node_count())
        .map(|n| r.incident_bw(sn, n))
        .max()
        .unwrap_or(Amount::ZERO);
    Caps { cpu_max, bw_max }
}

/// Searches for placements of `cg`'s nodes. The substrate is not modified.
pub fn embed_coarsened(cg: &CoarsenedGraph<'_>, sn: &SubstrateNetwork, p: &EmbedParams) -> EmbedOutcome {
    let order = embed_order(cg);
    let limit = p.max_backtrack.resolve(cg.source().node_count());
    let result = search::Search::new(sn, cg, &order, p, limit).run();
    let map = result
        .map
        .map(|m| uncoarsen_map(cg, &m).expect("search yields complete maps"));
    EmbedOutcome {
        map,
        backtracks: result.backtracks,
        failure: result.failure,
        coarsened_nodes: cg.node_count(),
    }
}

/// Coarsen, refine, then search.
pub fn hcm_embed(vn: &VirtualNetwork, sn: &SubstrateNetwork, p: &EmbedParams) -> EmbedOutcome {
    let cg = optimize(&coarsen(vn, caps_for(sn)));
    log::trace!("coarsened {} virtual nodes into {}", vn.node_count(), cg.node_count());
    embed_coarsened(&cg, sn, p)
}

/// The same search with every virtual node on its own.
pub fn baseline_no_coarsen(vn: &VirtualNetwork, sn: &SubstrateNetwork, p: &EmbedParams) -> EmbedOutcome {
    embed_coarsened(&CoarsenedGraph::singletons(vn, Caps::unbounded()), sn, p)
}

/// Two stages without backtracking: virtual nodes by descending CPU, each on
/// the unused substrate node with the most residual CPU; then each virtual
/// link, in id order, on a minimum-hop feasible path.
pub fn baseline_greedy(vn: &VirtualNetwork, sn: &SubstrateNetwork, p: &EmbedParams) -> EmbedOutcome {
    let fail = |reason| EmbedOutcome {
        map: None,
        backtracks: 0,
        failure: Some(reason),
        coarsened_nodes: vn.node_count(),
    };
    let mut r = sn.residuals();
    let mut order: Vec<NodeId> = (0..vn.node_count()).collect();
    order.sort_by_key(|&v| (std::cmp::Reverse(vn.nodes()[v].cpu), v));
    let mut used = vec![false; sn.node_count()];
    let mut node_map = vec![0; vn.node_count()];
    for v in order {
        let cpu = vn.nodes()[v].cpu;
        let host = (0..sn.node_count())
            .filter(|&s| !used[s] && r.cpu[s] >= cpu)
            .max_by_key(|&s| (r.cpu[s], std::cmp::Reverse(s)));
        let Some(s) = host else {
            return fail(FailureReason::NoCandidates);
        };
        used[s] = true;
        r.cpu[s] -= cpu;
        node_map[v] = s;
    }
    let mut link_map: Vec<Path> = Vec::with_capacity(vn.link_count());
    for link in vn.links() {
        let (a, b) = link.endpoints;
        match route_virtual_link(sn, &r, link.bw, node_map[a], node_map[b], p.max_hops) {
            Some(path) => {
                for &l in &path {
                    r.bw[l] -= link.bw;
                }
                link_map.push(path);
            }
            None => return fail(FailureReason::LinkMapping),
        }
    }
    EmbedOutcome {
        map: Some(EmbeddingMap {
            node_map,
            link_map,
            max_hops: p.max_hops,
        }),
        backtracks: 0,
        failure: None,
        coarsened_nodes: vn.node_count(),
    }
}
