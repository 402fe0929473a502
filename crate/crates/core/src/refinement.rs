//! Kernighan-Lin style refinement of a coarsened graph.
//!
//! Boundary virtual nodes are moved (or, when a move would break a cap,
//! swapped with a boundary node of the target) whenever that strictly lowers
//! the total crossing bandwidth. Only improving actions are taken, so the
//! process ends once a full sweep changes nothing.

use std::collections::BTreeMap;

use crate::amount::Amount;
use crate::coarsening::{Caps, CoarseId, CoarsenedGraph};
use crate::error::ModelError;
use crate::network::{NodeId, VirtualNetwork};

/// Moving `virtual_node` from `from` to `to` lowers crossing bandwidth by `gain`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct MoveCandidate {
    pub virtual_node: NodeId,
    pub from: CoarseId,
    pub to: CoarseId,
    /// Bandwidth toward `to` minus bandwidth kept inside `from`.
    pub gain: Amount,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RefineAction {
    Move {
        node: NodeId,
        from: CoarseId,
        to: CoarseId,
    },
    Swap {
        node: NodeId,
        partner: NodeId,
        from: CoarseId,
        to: CoarseId,
    },
}

/// One accepted action with the crossing bandwidth around it. Group ids
/// refer to the input graph's coarsened ids.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct RefineStep {
    pub action: RefineAction,
    pub crossing_before: Amount,
    pub crossing_after: Amount,
    /// 1-based sweep in which the action was taken.
    pub sweep: usize,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct RefineTrace {
    pub steps: Vec<RefineStep>,
    /// Full sweeps run, including the final one that changed nothing.
    pub sweeps: usize,
}

/// Members of `c` with at least one virtual link leaving `c`.
pub fn boundary_nodes(cg: &CoarsenedGraph<'_>, c: CoarseId) -> Result<Vec<NodeId>, ModelError> {
    if c >= cg.node_count() {
        return Err(ModelError::UnknownNode(c));
    }
    let vn = cg.source();
    Ok(cg
        .node(c)
        .members
        .iter()
        .copied()
        .filter(|&v| vn.neighbors(v).any(|(_, u)| cg.owner(u) != c))
        .collect())
}

pub fn crossing_bandwidth(cg: &CoarsenedGraph<'_>) -> Amount {
    cg.crossing_bandwidth()
}

/// The steepest strictly improving move for `v`, ignoring caps.
pub fn best_move(cg: &CoarsenedGraph<'_>, v: NodeId) -> Option<MoveCandidate> {
    let state = State::new(cg);
    state.best_target(v).map(|(to, gain)| MoveCandidate {
        virtual_node: v,
        from: cg.owner(v),
        to,
        gain,
    })
}

pub fn optimize<'a>(cg: &CoarsenedGraph<'a>) -> CoarsenedGraph<'a> {
    optimize_traced(cg).0
}

/// As [`optimize`], also returning every accepted action.
pub fn optimize_traced<'a>(cg: &CoarsenedGraph<'a>) -> (CoarsenedGraph<'a>, RefineTrace) {
    let mut state = State::new(cg);
    let mut trace = RefineTrace::default();
    loop {
        trace.sweeps += 1;
        let mut changed = false;
        let labels: Vec<CoarseId> = (0..state.size.len()).filter(|&g| state.size[g] > 0).collect();
        for g in labels {
            let members: Vec<NodeId> = (0..state.owner.len()).filter(|&v| state.owner[v] == g).collect();
            for v in members {
                if state.owner[v] != g {
                    continue;
                }
                let Some((to, _)) = state.best_target(v) else {
                    continue;
                };
                let before = state.crossing;
                let action = if state.move_fits(v, to) {
                    state.apply_move(v, to);
                    Some(RefineAction::Move { node: v, from: g, to })
                } else {
                    state.best_swap(v, to).map(|u| {
                        state.apply_move(v, to);
                        state.apply_move(u, g);
                        RefineAction::Swap {
                            node: v,
                            partner: u,
                            from: g,
                            to,
                        }
                    })
                };
                if let Some(action) = action {
                    debug_assert!(state.crossing < before);
                    trace.steps.push(RefineStep {
                        action,
                        crossing_before: before,
                        crossing_after: state.crossing,
                        sweep: trace.sweeps,
                    });
                    changed = true;
                }
            }
        }
        if !changed {
            break;
        }
    }
    let mut groups = vec![Vec::new(); state.size.len()];
    for (v, &g) in state.owner.iter().enumerate() {
        groups[g].push(v);
    }
    (
        CoarsenedGraph::from_groups(cg.source(), cg.caps(), groups),
        trace,
    )
}

/// Partition bookkeeping keyed by the input's coarsened ids.
#[derive(Clone)]
struct State<'v> {
    vn: &'v VirtualNetwork,
    caps: Caps,
    owner: Vec<CoarseId>,
    cpu: Vec<Amount>,
    ext: Vec<Amount>,
    size: Vec<usize>,
    crossing: Amount,
}

impl<'v> State<'v> {
    fn new(cg: &CoarsenedGraph<'v>) -> Self {
        State {
            vn: cg.source(),
            caps: cg.caps(),
            owner: cg.owners().to_vec(),
            cpu: cg.nodes().iter().map(|n| n.cpu).collect(),
            ext: cg.nodes().iter().map(|n| n.external_bw).collect(),
            size: cg.nodes().iter().map(|n| n.members.len()).collect(),
            crossing: cg.crossing_bandwidth(),
        }
    }

    /// Bandwidth from `v` toward each group, its own included.
    fn pull(&self, v: NodeId) -> BTreeMap<CoarseId, Amount> {
        let mut w = BTreeMap::new();
        for (l, u) in self.vn.neighbors(v) {
            *w.entry(self.owner[u]).or_insert(Amount::ZERO) += self.vn.links()[l].bw;
        }
        w
    }

    fn is_boundary(&self, v: NodeId) -> bool {
        self.vn.neighbors(v).any(|(_, u)| self.owner[u] != self.owner[v])
    }

    /// Target with the largest positive gain, ties to the lowest id.
    fn best_target(&self, v: NodeId) -> Option<(CoarseId, Amount)> {
        let g = self.owner[v];
        let w = self.pull(v);
        let internal = w.get(&g).copied().unwrap_or(Amount::ZERO);
        let mut best: Option<(CoarseId, Amount)> = None;
        for (&t, &bw) in &w {
            if t == g || bw <= internal {
                continue;
            }
            let gain = bw - internal;
            if best.is_none_or(|(_, b)| gain > b) {
                best = Some((t, gain));
            }
        }
        best
    }

    /// External bandwidth of (source, target) after moving `v`.
    fn ext_after_move(&self, v: NodeId, to: CoarseId) -> (Amount, Amount) {
        let from = self.owner[v];
        let w = self.pull(v);
        let total: Amount = w.values().copied().sum();
        let own = w.get(&from).copied().unwrap_or(Amount::ZERO);
        let toward = w.get(&to).copied().unwrap_or(Amount::ZERO);
        (
            self.ext[from] - (total - own) + own,
            self.ext[to] - toward + (total - toward),
        )
    }

    fn move_fits(&self, v: NodeId, to: CoarseId) -> bool {
        let from = self.owner[v];
        let (ext_from, ext_to) = self.ext_after_move(v, to);
        let cpu_v = self.vn.nodes()[v].cpu;
        let target_ok = self.caps.admits(self.cpu[to] + cpu_v, ext_to);
        let source_ok = self.size[from] == 1 || self.caps.admits(self.cpu[from] - cpu_v, ext_from);
        target_ok && source_ok
    }

    fn apply_move(&mut self, v: NodeId, to: CoarseId) {
        let from = self.owner[v];
        let w = self.pull(v);
        let own = w.get(&from).copied().unwrap_or(Amount::ZERO);
        let toward = w.get(&to).copied().unwrap_or(Amount::ZERO);
        let (ext_from, ext_to) = self.ext_after_move(v, to);
        let cpu_v = self.vn.nodes()[v].cpu;
        self.ext[from] = ext_from;
        self.ext[to] = ext_to;
        self.cpu[from] -= cpu_v;
        self.cpu[to] += cpu_v;
        self.size[from] -= 1;
        self.size[to] += 1;
        self.crossing = self.crossing - toward + own;
        self.owner[v] = to;
        if self.size[from] == 0 {
            self.ext[from] = Amount::ZERO;
        }
    }

    /// The boundary node of `to` whose exchange with `v` lowers crossing
    /// bandwidth the most while keeping both groups within caps.
    fn best_swap(&self, v: NodeId, to: CoarseId) -> Option<NodeId> {
        let from = self.owner[v];
        let mut best: Option<(Amount, NodeId)> = None;
        for u in 0..self.owner.len() {
            if self.owner[u] != to || !self.is_boundary(u) {
                continue;
            }
            let mut trial = self.clone();
            trial.apply_move(v, to);
            trial.apply_move(u, from);
            if trial.crossing >= self.crossing {
                continue;
            }
            if !trial.caps.admits(trial.cpu[from], trial.ext[from])
                || !trial.caps.admits(trial.cpu[to], trial.ext[to])
            {
                continue;
            }
            if best.is_none_or(|(c, _)| trial.crossing < c) {
                best = Some((trial.crossing, u));
            }
        }
        best.map(|(_, u)| u)
    }
}
