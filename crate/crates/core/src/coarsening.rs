//! Heavy-clique coarsening of a virtual network.
//!
//! Virtual nodes are grouped into coarsened nodes (sub-networks meant to share
//! one substrate host). Rounds of greedy matching pair each coarsened node
//! with the unmatched neighbor whose union is densest, as long as the union
//! fits under the CPU and bandwidth caps. Coarsening stops at the first round
//! with no match.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;

use crate::amount::Amount;
use crate::error::ModelError;
use crate::network::{EmbeddingMap, LinkId, NodeId, Path, VirtualNetwork};

/// Coarsened node and link ids are dense indices, like virtual ids.
pub type CoarseId = usize;

/// Upper bounds for one coarsened node.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Caps {
    pub cpu_max: Amount,
    /// Bound on a coarsened node's external (crossing) bandwidth.
    pub bw_max: Amount,
}

impl Caps {
    pub fn unbounded() -> Self {
        Caps {
            cpu_max: Amount::from_hundredths(i64::MAX / 4),
            bw_max: Amount::from_hundredths(i64::MAX / 4),
        }
    }

    pub fn admits(&self, cpu: Amount, external_bw: Amount) -> bool {
        cpu <= self.cpu_max && external_bw <= self.bw_max
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CoarsenedNode {
    pub id: CoarseId,
    /// Member virtual nodes, ascending.
    pub members: Vec<NodeId>,
    /// Virtual links with both endpoints inside, ascending.
    pub internal_links: Vec<LinkId>,
    pub cpu: Amount,
    /// Bandwidth of virtual links with exactly one endpoint inside.
    pub external_bw: Amount,
}

impl CoarsenedNode {
    /// `cpu + external_bw`, the ordering key used throughout embedding.
    pub fn resources(&self) -> Amount {
        self.cpu + self.external_bw
    }

    pub fn density(&self) -> f64 {
        link_density(self.members.len(), self.internal_links.len()).expect("non-empty node")
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CoarsenedLink {
    pub id: CoarseId,
    /// Coarsened endpoints, smaller id first.
    pub endpoints: (CoarseId, CoarseId),
    /// Crossing virtual links, ascending.
    pub members: Vec<LinkId>,
    pub bw: Amount,
}

impl CoarsenedLink {
    pub fn other(&self, c: CoarseId) -> CoarseId {
        if self.endpoints.0 == c {
            self.endpoints.1
        } else {
            self.endpoints.0
        }
    }
}

/// A partition of a virtual network into coarsened nodes.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CoarsenedGraph<'a> {
    source: &'a VirtualNetwork,
    caps: Caps,
    nodes: Vec<CoarsenedNode>,
    links: Vec<CoarsenedLink>,
    owner: Vec<CoarseId>,
    adjacency: Vec<Vec<CoarseId>>,
}

impl<'a> CoarsenedGraph<'a> {
    /// One coarsened node per virtual node.
    pub fn singletons(vn: &'a VirtualNetwork, caps: Caps) -> Self {
        Self::from_groups(vn, caps, (0..vn.node_count()).map(|v| vec![v]).collect())
    }

    /// Builds the graph for `groups`, which must partition the virtual nodes.
    /// Empty groups are dropped; coarsened ids follow the smallest member.
    pub fn from_groups(vn: &'a VirtualNetwork, caps: Caps, groups: Vec<Vec<NodeId>>) -> Self {
        let mut groups: Vec<Vec<NodeId>> = groups
            .into_iter()
            .filter(|g| !g.is_empty())
            .map(|mut g| {
                g.sort_unstable();
                g
            })
            .collect();
        groups.sort_unstable_by_key(|g| g[0]);

        let mut owner = vec![usize::MAX; vn.node_count()];
        for (c, g) in groups.iter().enumerate() {
            for &v in g {
                assert_eq!(owner[v], usize::MAX, "virtual node {v} in two groups");
                owner[v] = c;
            }
        }
        assert!(
            owner.iter().all(|&o| o != usize::MAX),
            "groups do not cover every virtual node"
        );

        let mut nodes: Vec<CoarsenedNode> = groups
            .into_iter()
            .enumerate()
            .map(|(id, members)| CoarsenedNode {
                id,
                cpu: members.iter().map(|&v| vn.nodes()[v].cpu).sum(),
                members,
                internal_links: Vec::new(),
                external_bw: Amount::ZERO,
            })
            .collect();
        let mut crossing: BTreeMap<(CoarseId, CoarseId), Vec<LinkId>> = BTreeMap::new();
        for l in vn.links() {
            let (a, b) = (owner[l.endpoints.0], owner[l.endpoints.1]);
            if a == b {
                nodes[a].internal_links.push(l.id);
            } else {
                nodes[a].external_bw += l.bw;
                nodes[b].external_bw += l.bw;
                crossing.entry((a.min(b), a.max(b))).or_default().push(l.id);
            }
        }
        let mut adjacency = vec![Vec::new(); nodes.len()];
        let links: Vec<CoarsenedLink> = crossing
            .into_iter()
            .enumerate()
            .map(|(id, (endpoints, members))| {
                adjacency[endpoints.0].push(id);
                adjacency[endpoints.1].push(id);
                CoarsenedLink {
                    id,
                    endpoints,
                    bw: members.iter().map(|&l| vn.links()[l].bw).sum(),
                    members,
                }
            })
            .collect();
        CoarsenedGraph {
            source: vn,
            caps,
            nodes,
            links,
            owner,
            adjacency,
        }
    }

    pub fn source(&self) -> &'a VirtualNetwork {
        self.source
    }

    pub fn caps(&self) -> Caps {
        self.caps
    }

    pub fn nodes(&self) -> &[CoarsenedNode] {
        &self.nodes
    }

    pub fn links(&self) -> &[CoarsenedLink] {
        &self.links
    }

    pub fn node(&self, c: CoarseId) -> &CoarsenedNode {
        &self.nodes[c]
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    /// The coarsened node holding virtual node `v`.
    pub fn owner(&self, v: NodeId) -> CoarseId {
        self.owner[v]
    }

    pub fn owners(&self) -> &[CoarseId] {
        &self.owner
    }

    pub fn incident_links(&self, c: CoarseId) -> &[CoarseId] {
        &self.adjacency[c]
    }

    /// `(coarsened link, neighbor)` pairs around `c`.
    pub fn neighbors(&self, c: CoarseId) -> impl Iterator<Item = (CoarseId, CoarseId)> + '_ {
        self.adjacency[c]
            .iter()
            .map(move |&l| (l, self.links[l].other(c)))
    }

    pub fn link_between(&self, a: CoarseId, b: CoarseId) -> Option<&CoarsenedLink> {
        self.neighbors(a)
            .find(|&(_, o)| o == b)
            .map(|(l, _)| &self.links[l])
    }

    pub fn groups(&self) -> Vec<Vec<NodeId>> {
        self.nodes.iter().map(|n| n.members.clone()).collect()
    }

    /// Total bandwidth of virtual links between different coarsened nodes.
    pub fn crossing_bandwidth(&self) -> Amount {
        self.links.iter().map(|l| l.bw).sum()
    }

    /// Coarsened nodes that exceed a cap on their own. Only unmergeable
    /// singletons can end up here.
    pub fn oversized(&self) -> Vec<CoarseId> {
        self.nodes
            .iter()
            .filter(|n| !self.caps.admits(n.cpu, n.external_bw))
            .map(|n| n.id)
            .collect()
    }
}

impl fmt::Display for CoarsenedGraph<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "coarsened graph: {} nodes, {} links, cpu_max {}, bw_max {}",
            self.nodes.len(),
            self.links.len(),
            self.caps.cpu_max,
            self.caps.bw_max
        )?;
        for n in &self.nodes {
            writeln!(
                f,
                "  node {}: members {:?} internal {:?} cpu {} external_bw {}",
                n.id, n.members, n.internal_links, n.cpu, n.external_bw
            )?;
        }
        for l in &self.links {
            writeln!(
                f,
                "  link {}: {}-{} members {:?} bw {}",
                l.id, l.endpoints.0, l.endpoints.1, l.members, l.bw
            )?;
        }
        Ok(())
    }
}

/// `2|L| / (|N|(|N|-1))`, with a single node counting as a clique.
pub fn link_density(members: usize, internal_links: usize) -> Result<f64, ModelError> {
    match members {
        0 => Err(ModelError::EmptyNodeSet),
        1 => Ok(1.0),
        n => Ok(2.0 * internal_links as f64 / (n * (n - 1)) as f64),
    }
}

/// Exact density as a fraction `(2|L|, |N|(|N|-1))`.
fn density_ratio(members: usize, internal_links: usize) -> (u64, u64) {
    if members <= 1 {
        (1, 1)
    } else {
        (2 * internal_links as u64, (members * (members - 1)) as u64)
    }
}

fn cmp_ratio(a: (u64, u64), b: (u64, u64)) -> Ordering {
    (a.0 as u128 * b.1 as u128).cmp(&(b.0 as u128 * a.1 as u128))
}

/// Runs heavy-clique matching rounds until no pair can be merged.
pub fn coarsen(vn: &VirtualNetwork, caps: Caps) -> CoarsenedGraph<'_> {
    coarsen_counting_rounds(vn, caps).0
}

/// As [`coarsen`], also reporting how many productive rounds ran.
pub fn coarsen_counting_rounds(vn: &VirtualNetwork, caps: Caps) -> (CoarsenedGraph<'_>, usize) {
    let mut cg = CoarsenedGraph::singletons(vn, caps);
    let mut rounds = 0;
    loop {
        let pairs = matching_round(&cg);
        if pairs.is_empty() {
            return (cg, rounds);
        }
        rounds += 1;
        let mut groups = cg.groups();
        for (a, b) in pairs {
            let moved = std::mem::take(&mut groups[b]);
            groups[a].extend(moved);
        }
        cg = CoarsenedGraph::from_groups(vn, caps, groups);
    }
}

/// One pass of greedy matching. Heavier nodes pick first; a node claimed
/// earlier in the round is no longer available.
fn matching_round(cg: &CoarsenedGraph<'_>) -> Vec<(CoarseId, CoarseId)> {
    let mut order: Vec<CoarseId> = (0..cg.node_count()).collect();
    order.sort_by(|&a, &b| {
        cg.nodes[b]
            .resources()
            .cmp(&cg.nodes[a].resources())
            .then(a.cmp(&b))
    });
    let mut matched = vec![false; cg.node_count()];
    let mut pairs = Vec::new();
    for &i in &order {
        if matched[i] {
            continue;
        }
        let ni = &cg.nodes[i];
        // (density, absorbed bandwidth, partner)
        let mut best: Option<((u64, u64), Amount, CoarseId)> = None;
        for (l, j) in cg.neighbors(i) {
            if matched[j] {
                continue;
            }
            let nj = &cg.nodes[j];
            let link = &cg.links[l];
            let cpu = ni.cpu + nj.cpu;
            let external = ni.external_bw + nj.external_bw - link.bw - link.bw;
            if !cg.caps.admits(cpu, external) {
                continue;
            }
            let density = density_ratio(
                ni.members.len() + nj.members.len(),
                ni.internal_links.len() + nj.internal_links.len() + link.members.len(),
            );
            let better = match best {
                None => true,
                Some((bd, bbw, bj)) => cmp_ratio(density, bd)
                    .then(link.bw.cmp(&bbw))
                    .then(bj.cmp(&j))
                    == Ordering::Greater,
            };
            if better {
                best = Some((density, link.bw, j));
            }
        }
        if let Some((_, _, j)) = best {
            matched[i] = true;
            matched[j] = true;
            pairs.push((i, j));
        }
    }
    pairs
}

/// Substrate placement of a coarsened graph's links.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CoarseRoute {
    /// One path, walked from the host of the coarsened link's first endpoint
    /// to the host of its second, used by every member.
    Shared(Path),
    /// One path per member virtual link (in member order), each oriented like
    /// the virtual link itself.
    PerMember(Vec<Path>),
}

/// An embedding of a coarsened graph.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CoarseMap {
    pub hosts: Vec<NodeId>,
    pub routes: Vec<CoarseRoute>,
    pub max_hops: usize,
}

/// Expands a coarsened embedding to the original virtual network.
pub fn uncoarsen_map(cg: &CoarsenedGraph<'_>, coarse: &CoarseMap) -> Result<EmbeddingMap, ModelError> {
    if coarse.hosts.len() != cg.node_count() {
        return Err(ModelError::MapShape {
            what: "coarse hosts",
            expected: cg.node_count(),
            found: coarse.hosts.len(),
        });
    }
    if coarse.routes.len() != cg.links.len() {
        return Err(ModelError::MapShape {
            what: "coarse routes",
            expected: cg.links.len(),
            found: coarse.routes.len(),
        });
    }
    let vn = cg.source;
    let node_map: Vec<NodeId> = (0..vn.node_count())
        .map(|v| coarse.hosts[cg.owner[v]])
        .collect();
    let mut link_map: Vec<Option<Path>> = vec![None; vn.link_count()];
    for n in &cg.nodes {
        for &l in &n.internal_links {
            link_map[l] = Some(Vec::new());
        }
    }
    for (link, route) in cg.links.iter().zip(&coarse.routes) {
        match route {
            CoarseRoute::Shared(path) => {
                for &l in &link.members {
                    let first_inside = cg.owner[vn.links()[l].endpoints.0] == link.endpoints.0;
                    let p = if first_inside {
                        path.clone()
                    } else {
                        path.iter().rev().copied().collect()
                    };
                    link_map[l] = Some(p);
                }
            }
            CoarseRoute::PerMember(paths) => {
                if paths.len() != link.members.len() {
                    return Err(ModelError::MapShape {
                        what: "coarse route members",
                        expected: link.members.len(),
                        found: paths.len(),
                    });
                }
                for (&l, p) in link.members.iter().zip(paths) {
                    link_map[l] = Some(p.clone());
                }
            }
        }
    }
    Ok(EmbeddingMap {
        node_map,
        link_map: link_map
            .into_iter()
            .map(|p| p.expect("partition covers every link"))
            .collect(),
        max_hops: coarse.max_hops,
    })
}
