//! Substrate and virtual network graphs, embedding maps, and resource accounting.
//!
//! Node and link identifiers are dense indices: the `i`-th node added to a
//! network has id `i`, likewise for links.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::amount::Amount;
use crate::error::ModelError;

pub type NodeId = usize;
pub type LinkId = usize;

/// A substrate path: the ordered substrate links walked from the host of a
/// virtual link's first endpoint to the host of its second endpoint.
pub type Path = Vec<LinkId>;

/// Plane coordinates carried through topology files.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Point {
    pub x: Amount,
    pub y: Amount,
}

impl Point {
    pub fn new(x: Amount, y: Amount) -> Self {
        Point { x, y }
    }

    pub fn distance(&self, other: &Point) -> f64 {
        let dx = self.x.to_f64() - other.x.to_f64();
        let dy = self.y.to_f64() - other.y.to_f64();
        dx.hypot(dy)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SubstrateNode {
    pub id: NodeId,
    pub total_cpu: Amount,
    pub residual_cpu: Amount,
    pub pos: Point,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SubstrateLink {
    pub id: LinkId,
    pub endpoints: (NodeId, NodeId),
    pub total_bw: Amount,
    pub residual_bw: Amount,
}

impl SubstrateLink {
    /// The endpoint opposite to `n`, if `n` is an endpoint at all.
    pub fn other(&self, n: NodeId) -> Option<NodeId> {
        match self.endpoints {
            (a, b) if a == n => Some(b),
            (a, b) if b == n => Some(a),
            _ => None,
        }
    }
}

/// Resources reserved by one successful [`SubstrateNetwork::allocate`] call.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Reservation {
    id: u64,
    cpu: Vec<(NodeId, Amount)>,
    bw: Vec<(LinkId, Amount)>,
}

impl Reservation {
    pub fn id(&self) -> u64 {
        self.id
    }

    pub fn cpu(&self) -> &[(NodeId, Amount)] {
        &self.cpu
    }

    pub fn bw(&self) -> &[(LinkId, Amount)] {
        &self.bw
    }

    pub fn total_cpu(&self) -> Amount {
        self.cpu.iter().map(|(_, a)| *a).sum()
    }

    pub fn total_bw(&self) -> Amount {
        self.bw.iter().map(|(_, a)| *a).sum()
    }
}

/// The physical network: undirected, simple, with residual capacities.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SubstrateNetwork {
    nodes: Vec<SubstrateNode>,
    links: Vec<SubstrateLink>,
    adjacency: Vec<Vec<LinkId>>,
    live: BTreeSet<u64>,
    next_reservation: u64,
}

impl SubstrateNetwork {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add_node(&mut self, cpu: Amount) -> NodeId {
        self.add_node_at(cpu, Point::default())
    }

    pub fn add_node_at(&mut self, cpu: Amount, pos: Point) -> NodeId {
        let id = self.nodes.len();
        self.nodes.push(SubstrateNode {
            id,
            total_cpu: cpu,
            residual_cpu: cpu,
            pos,
        });
        self.adjacency.push(Vec::new());
        id
    }

    pub fn add_link(&mut self, a: NodeId, b: NodeId, bw: Amount) -> Result<LinkId, ModelError> {
        check_new_link(self.nodes.len(), a, b, self.link_between(a, b).is_some())?;
        if bw.is_negative() {
            return Err(ModelError::NegativeCapacity);
        }
        let id = self.links.len();
        self.links.push(SubstrateLink {
            id,
            endpoints: (a, b),
            total_bw: bw,
            residual_bw: bw,
        });
        self.adjacency[a].push(id);
        self.adjacency[b].push(id);
        Ok(id)
    }

    pub fn nodes(&self) -> &[SubstrateNode] {
        &self.nodes
    }

    pub fn links(&self) -> &[SubstrateLink] {
        &self.links
    }

    pub fn node(&self, id: NodeId) -> &SubstrateNode {
        &self.nodes[id]
    }

    pub fn link(&self, id: LinkId) -> &SubstrateLink {
        &self.links[id]
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn link_count(&self) -> usize {
        self.links.len()
    }

    pub fn incident_links(&self, n: NodeId) -> &[LinkId] {
        &self.adjacency[n]
    }

    /// `(link, neighbor)` pairs around `n`.
    pub fn neighbors(&self, n: NodeId) -> impl Iterator<Item = (LinkId, NodeId)> + '_ {
        self.adjacency[n].iter().map(move |&l| {
            let (a, b) = self.links[l].endpoints;
            (l, if a == n { b } else { a })
        })
    }

    pub fn link_between(&self, a: NodeId, b: NodeId) -> Option<LinkId> {
        if a >= self.nodes.len() || b >= self.nodes.len() {
            return None;
        }
        let (scan, other) = if self.adjacency[a].len() <= self.adjacency[b].len() {
            (a, b)
        } else {
            (b, a)
        };
        self.neighbors(scan).find(|&(_, m)| m == other).map(|(l, _)| l)
    }

    pub fn residuals(&self) -> Residuals {
        Residuals {
            cpu: self.nodes.iter().map(|n| n.residual_cpu).collect(),
            bw: self.links.iter().map(|l| l.residual_bw).collect(),
        }
    }

    pub fn totals(&self) -> Residuals {
        Residuals {
            cpu: self.nodes.iter().map(|n| n.total_cpu).collect(),
            bw: self.links.iter().map(|l| l.total_bw).collect(),
        }
    }

    /// Overwrites every residual value. Used to restore a snapshot.
    pub fn set_residuals(&mut self, r: &Residuals) {
        assert_eq!(r.cpu.len(), self.nodes.len());
        assert_eq!(r.bw.len(), self.links.len());
        for (n, &c) in self.nodes.iter_mut().zip(&r.cpu) {
            n.residual_cpu = c;
        }
        for (l, &b) in self.links.iter_mut().zip(&r.bw) {
            l.residual_bw = b;
        }
    }

    pub fn is_connected(&self) -> bool {
        connected(self.nodes.len(), self.links.iter().map(|l| l.endpoints))
    }

    /// Checks `m` against the current residual capacities.
    ///
    /// Structural problems (ids out of range, wrong map shape) are reported as
    /// [`ModelError`]; a well-formed map that breaks path or capacity rules
    /// yields the list of [`Violation`]s.
    pub fn validate(
        &self,
        vn: &VirtualNetwork,
        m: &EmbeddingMap,
    ) -> Result<Vec<Violation>, ModelError> {
        check_map_shape(vn, m)?;
        for &host in &m.node_map {
            if host >= self.nodes.len() {
                return Err(ModelError::UnknownSubstrateNode(host));
            }
        }
        for path in &m.link_map {
            if let Some(&bad) = path.iter().find(|&&l| l >= self.links.len()) {
                return Err(ModelError::UnknownSubstrateLink(bad));
            }
        }

        let mut violations = Vec::new();
        for (vl, path) in vn.links.iter().zip(&m.link_map) {
            let from = m.node_map[vl.endpoints.0];
            let to = m.node_map[vl.endpoints.1];
            if path.is_empty() {
                if from != to {
                    violations.push(Violation::MissingPath { vlink: vl.id });
                }
                continue;
            }
            if from == to {
                violations.push(Violation::PathBetweenSameHost { vlink: vl.id });
                continue;
            }
            if path.len() > m.max_hops {
                violations.push(Violation::PathTooLong {
                    vlink: vl.id,
                    hops: path.len(),
                    max_hops: m.max_hops,
                });
            }
            let mut at = from;
            let mut seen = BTreeSet::from([from]);
            let mut ok = true;
            for &l in path {
                match self.links[l].other(at) {
                    Some(next) => {
                        if !seen.insert(next) {
                            violations.push(Violation::LoopingPath { vlink: vl.id });
                            ok = false;
                            break;
                        }
                        at = next;
                    }
                    None => {
                        violations.push(Violation::BrokenPath { vlink: vl.id });
                        ok = false;
                        break;
                    }
                }
            }
            if ok && at != to {
                violations.push(Violation::BrokenPath { vlink: vl.id });
            }
        }

        let (cpu, bw) = demand_totals(self.nodes.len(), self.links.len(), vn, m);
        for (n, demand) in cpu.iter().enumerate() {
            if *demand > self.nodes[n].residual_cpu {
                violations.push(Violation::NodeCapacity {
                    node: n,
                    demand: *demand,
                    residual: self.nodes[n].residual_cpu,
                });
            }
        }
        for (l, demand) in bw.iter().enumerate() {
            if *demand > self.links[l].residual_bw {
                violations.push(Violation::LinkCapacity {
                    link: l,
                    demand: *demand,
                    residual: self.links[l].residual_bw,
                });
            }
        }
        Ok(violations)
    }

    /// Reserves the resources described by `m`. Nothing is changed unless the
    /// map validates cleanly.
    pub fn allocate(
        &mut self,
        vn: &VirtualNetwork,
        m: &EmbeddingMap,
    ) -> Result<Reservation, ModelError> {
        let violations = self.validate(vn, m)?;
        if !violations.is_empty() {
            return Err(ModelError::InvalidEmbedding(violations));
        }
        let (cpu, bw) = demand_totals(self.nodes.len(), self.links.len(), vn, m);
        let cpu: Vec<_> = cpu
            .into_iter()
            .enumerate()
            .filter(|(_, a)| *a > Amount::ZERO)
            .collect();
        let bw: Vec<_> = bw
            .into_iter()
            .enumerate()
            .filter(|(_, a)| *a > Amount::ZERO)
            .collect();
        for &(n, a) in &cpu {
            self.nodes[n].residual_cpu -= a;
        }
        for &(l, a) in &bw {
            self.links[l].residual_bw -= a;
        }
        let id = self.next_reservation;
        self.next_reservation += 1;
        self.live.insert(id);
        Ok(Reservation { id, cpu, bw })
    }

    /// Returns a reservation's resources. Fails without side effects if the
    /// reservation was already released or does not belong to this network.
    pub fn release(&mut self, r: &Reservation) -> Result<(), ModelError> {
        if !self.live.contains(&r.id) {
            return Err(ModelError::NotReserved(r.id));
        }
        for &(n, a) in &r.cpu {
            if self.nodes[n].residual_cpu + a > self.nodes[n].total_cpu {
                return Err(ModelError::ReleaseOverflow);
            }
        }
        for &(l, a) in &r.bw {
            if self.links[l].residual_bw + a > self.links[l].total_bw {
                return Err(ModelError::ReleaseOverflow);
            }
        }
        for &(n, a) in &r.cpu {
            self.nodes[n].residual_cpu += a;
        }
        for &(l, a) in &r.bw {
            self.links[l].residual_bw += a;
        }
        self.live.remove(&r.id);
        Ok(())
    }

    pub fn live_reservations(&self) -> usize {
        self.live.len()
    }
}

/// A scratch copy of residual capacities, indexed by node and link id.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Residuals {
    pub cpu: Vec<Amount>,
    pub bw: Vec<Amount>,
}

impl Residuals {
    /// Residual CPU plus residual bandwidth of every incident link.
    pub fn available(&self, sn: &SubstrateNetwork, n: NodeId) -> Amount {
        self.cpu[n] + self.incident_bw(sn, n)
    }

    pub fn incident_bw(&self, sn: &SubstrateNetwork, n: NodeId) -> Amount {
        sn.incident_links(n).iter().map(|&l| self.bw[l]).sum()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VirtualNode {
    pub id: NodeId,
    pub cpu: Amount,
    pub pos: Point,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VirtualLink {
    pub id: LinkId,
    pub endpoints: (NodeId, NodeId),
    pub bw: Amount,
}

impl VirtualLink {
    pub fn other(&self, n: NodeId) -> Option<NodeId> {
        match self.endpoints {
            (a, b) if a == n => Some(b),
            (a, b) if b == n => Some(a),
            _ => None,
        }
    }
}

/// A requested virtual network: CPU demand per node, bandwidth per link.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct VirtualNetwork {
    nodes: Vec<VirtualNode>,
    links: Vec<VirtualLink>,
    adjacency: Vec<Vec<LinkId>>,
}

impl VirtualNetwork {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add_node(&mut self, cpu: Amount) -> Result<NodeId, ModelError> {
        self.add_node_at(cpu, Point::default())
    }

    pub fn add_node_at(&mut self, cpu: Amount, pos: Point) -> Result<NodeId, ModelError> {
        if cpu <= Amount::ZERO {
            return Err(ModelError::NonPositiveDemand);
        }
        let id = self.nodes.len();
        self.nodes.push(VirtualNode { id, cpu, pos });
        self.adjacency.push(Vec::new());
        Ok(id)
    }

    pub fn add_link(&mut self, a: NodeId, b: NodeId, bw: Amount) -> Result<LinkId, ModelError> {
        check_new_link(self.nodes.len(), a, b, self.link_between(a, b).is_some())?;
        if bw <= Amount::ZERO {
            return Err(ModelError::NonPositiveDemand);
        }
        let id = self.links.len();
        self.links.push(VirtualLink {
            id,
            endpoints: (a, b),
            bw,
        });
        self.adjacency[a].push(id);
        self.adjacency[b].push(id);
        Ok(id)
    }

    pub fn nodes(&self) -> &[VirtualNode] {
        &self.nodes
    }

    pub fn links(&self) -> &[VirtualLink] {
        &self.links
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn link_count(&self) -> usize {
        self.links.len()
    }

    pub fn incident_links(&self, n: NodeId) -> &[LinkId] {
        &self.adjacency[n]
    }

    pub fn neighbors(&self, n: NodeId) -> impl Iterator<Item = (LinkId, NodeId)> + '_ {
        self.adjacency[n].iter().map(move |&l| {
            let (a, b) = self.links[l].endpoints;
            (l, if a == n { b } else { a })
        })
    }

    pub fn link_between(&self, a: NodeId, b: NodeId) -> Option<LinkId> {
        if a >= self.nodes.len() || b >= self.nodes.len() {
            return None;
        }
        self.neighbors(a).find(|&(_, m)| m == b).map(|(l, _)| l)
    }

    pub fn total_cpu(&self) -> Amount {
        self.nodes.iter().map(|n| n.cpu).sum()
    }

    pub fn total_bw(&self) -> Amount {
        self.links.iter().map(|l| l.bw).sum()
    }

    /// Link density `2|L| / (|N|(|N|-1))`; 1 for graphs with fewer than two nodes.
    pub fn density(&self) -> f64 {
        let n = self.nodes.len();
        if n < 2 {
            return 1.0;
        }
        2.0 * self.links.len() as f64 / (n * (n - 1)) as f64
    }

    pub fn is_connected(&self) -> bool {
        connected(self.nodes.len(), self.links.iter().map(|l| l.endpoints))
    }
}

/// A virtual network request: graph, arrival time, and lifetime.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VnRequest {
    pub id: usize,
    pub graph: VirtualNetwork,
    pub arrival: u64,
    pub lifetime: u64,
}

impl VnRequest {
    pub fn new(id: usize, graph: VirtualNetwork, arrival: u64, lifetime: u64) -> Result<Self, ModelError> {
        if lifetime == 0 {
            return Err(ModelError::ZeroLifetime(id));
        }
        Ok(VnRequest {
            id,
            graph,
            arrival,
            lifetime,
        })
    }

    pub fn departure(&self) -> u64 {
        self.arrival + self.lifetime
    }

    /// Half-open lifetime window `[arrival, arrival + lifetime)`.
    pub fn alive_at(&self, t: u64) -> bool {
        self.arrival <= t && t < self.departure()
    }
}

/// Virtual node to substrate node, virtual link to substrate path.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EmbeddingMap {
    pub node_map: Vec<NodeId>,
    pub link_map: Vec<Path>,
    pub max_hops: usize,
}

impl EmbeddingMap {
    pub fn empty(max_hops: usize) -> Self {
        EmbeddingMap {
            node_map: Vec::new(),
            link_map: Vec::new(),
            max_hops,
        }
    }

    /// Number of virtual links that consume substrate bandwidth.
    pub fn routed_links(&self) -> usize {
        self.link_map.iter().filter(|p| !p.is_empty()).count()
    }

    pub fn hosts(&self) -> BTreeSet<NodeId> {
        self.node_map.iter().copied().collect()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Violation {
    NodeCapacity {
        node: NodeId,
        demand: Amount,
        residual: Amount,
    },
    LinkCapacity {
        link: LinkId,
        demand: Amount,
        residual: Amount,
    },
    /// The path does not walk from the first endpoint's host to the second's.
    BrokenPath { vlink: LinkId },
    LoopingPath { vlink: LinkId },
    PathTooLong {
        vlink: LinkId,
        hops: usize,
        max_hops: usize,
    },
    /// Endpoints on different hosts but the path is empty.
    MissingPath { vlink: LinkId },
    /// Endpoints share a host but the path is non-empty.
    PathBetweenSameHost { vlink: LinkId },
}

/// Sum of CPU demands and bandwidth demands of all virtual elements.
pub fn revenue(vnr: &VnRequest) -> Amount {
    vnr.graph.total_cpu() + vnr.graph.total_bw()
}

/// CPU demands plus each link's bandwidth weighted by its path length.
pub fn cost(vnr: &VnRequest, m: &EmbeddingMap) -> Result<Amount, ModelError> {
    check_map_shape(&vnr.graph, m)?;
    let links: Amount = vnr
        .graph
        .links
        .iter()
        .zip(&m.link_map)
        .map(|(l, p)| l.bw * p.len() as u64)
        .sum();
    Ok(vnr.graph.total_cpu() + links)
}

fn check_map_shape(vn: &VirtualNetwork, m: &EmbeddingMap) -> Result<(), ModelError> {
    if m.node_map.len() != vn.node_count() {
        return Err(ModelError::MapShape {
            what: "node_map",
            expected: vn.node_count(),
            found: m.node_map.len(),
        });
    }
    if m.link_map.len() != vn.link_count() {
        return Err(ModelError::MapShape {
            what: "link_map",
            expected: vn.link_count(),
            found: m.link_map.len(),
        });
    }
    Ok(())
}

fn check_new_link(n: usize, a: NodeId, b: NodeId, exists: bool) -> Result<(), ModelError> {
    if a >= n {
        return Err(ModelError::UnknownNode(a));
    }
    if b >= n {
        return Err(ModelError::UnknownNode(b));
    }
    if a == b {
        return Err(ModelError::SelfLoop(a));
    }
    if exists {
        return Err(ModelError::DuplicateLink(a, b));
    }
    Ok(())
}

fn demand_totals(
    nodes: usize,
    links: usize,
    vn: &VirtualNetwork,
    m: &EmbeddingMap,
) -> (Vec<Amount>, Vec<Amount>) {
    let mut cpu = vec![Amount::ZERO; nodes];
    let mut bw = vec![Amount::ZERO; links];
    for (v, &host) in vn.nodes.iter().zip(&m.node_map) {
        cpu[host] += v.cpu;
    }
    for (vl, path) in vn.links.iter().zip(&m.link_map) {
        for &l in path {
            bw[l] += vl.bw;
        }
    }
    (cpu, bw)
}

pub(crate) fn connected(n: usize, edges: impl Iterator<Item = (NodeId, NodeId)>) -> bool {
    if n <= 1 {
        return true;
    }
    let mut adj = vec![Vec::new(); n];
    for (a, b) in edges {
        adj[a].push(b);
        adj[b].push(a);
    }
    let mut seen = vec![false; n];
    let mut stack = vec![0];
    seen[0] = true;
    let mut count = 1;
    while let Some(u) = stack.pop() {
        for &v in &adj[u] {
            if !seen[v] {
                seen[v] = true;
                count += 1;
                stack.push(v);
            }
        }
    }
    count == n
}
