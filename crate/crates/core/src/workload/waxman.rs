//! Waxman random topologies.
//!
//! Nodes are scattered uniformly over a square plane and a pair `(u, v)` is
//! linked with probability `alpha * exp(-d(u, v) / (beta * L))`, where `L` is
//! the largest pairwise distance. A random spanning tree is laid down first so
//! every generated graph is connected.

use rand::seq::SliceRandom;
use rand::Rng;

use crate::amount::Amount;
use crate::error::{Error, Result};
use crate::network::{NodeId, Point};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct WaxmanShape {
    pub alpha: f64,
    pub beta: f64,
    pub plane_size: f64,
}

impl Default for WaxmanShape {
    fn default() -> Self {
        WaxmanShape {
            alpha: 0.5,
            beta: 0.2,
            plane_size: 100.0,
        }
    }
}

/// How many links a generated topology should have.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum LinkTarget {
    /// Exactly this many links.
    Count(usize),
    /// Expected link density `2|L| / (|N|(|N|-1))`.
    Density(f64),
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct WaxmanParams {
    pub node_count: usize,
    pub target: LinkTarget,
    pub shape: WaxmanShape,
}

impl WaxmanParams {
    pub fn validate(&self) -> Result<()> {
        let WaxmanShape {
            alpha,
            beta,
            plane_size,
        } = self.shape;
        if self.node_count < 1 {
            return Err(Error::Params("node_count must be at least 1".into()));
        }
        if !(alpha > 0.0 && alpha <= 1.0) || !(beta > 0.0 && beta <= 1.0) {
            return Err(Error::Params(format!(
                "waxman alpha and beta must lie in (0, 1], got {alpha} and {beta}"
            )));
        }
        if plane_size.is_nan() || plane_size <= 0.0 {
            return Err(Error::Params("plane_size must be positive".into()));
        }
        let n = self.node_count;
        let max_links = n * (n - 1) / 2;
        match self.target {
            LinkTarget::Count(m) if m > max_links => Err(Error::Params(format!(
                "{m} links requested but {n} nodes admit at most {max_links}"
            ))),
            LinkTarget::Count(m) if m + 1 < n => Err(Error::Params(format!(
                "{m} links cannot connect {n} nodes"
            ))),
            LinkTarget::Density(d) if !(0.0..=1.0).contains(&d) => {
                Err(Error::Params(format!("density {d} outside [0, 1]")))
            }
            _ => Ok(()),
        }
    }
}

/// Node positions and undirected edges `(a, b)` with `a < b`.
#[derive(Clone, Debug, PartialEq)]
pub struct Topology {
    pub positions: Vec<Point>,
    pub edges: Vec<(NodeId, NodeId)>,
}

/// Maximum number of Waxman sampling passes before falling back to adding
/// the most probable absent edges.
const SAMPLING_ROUNDS: usize = 64;

pub fn generate<R: Rng + ?Sized>(p: &WaxmanParams, rng: &mut R) -> Result<Topology> {
    p.validate()?;
    let n = p.node_count;
    let extent = (p.shape.plane_size * 100.0).round() as i64;
    let positions: Vec<Point> = (0..n)
        .map(|_| {
            let x = Amount::from_hundredths(rng.random_range(0..=extent));
            let y = Amount::from_hundredths(rng.random_range(0..=extent));
            Point::new(x, y)
        })
        .collect();
    let prob = probabilities(&positions, &p.shape);
    let mut present = vec![vec![false; n]; n];
    let mut edges = spanning_tree(n, &prob, rng);
    for &(a, b) in &edges {
        present[a][b] = true;
        present[b][a] = true;
    }

    match p.target {
        LinkTarget::Count(target) => {
            let mut absent: Vec<(NodeId, NodeId)> = pairs(n)
                .filter(|&(a, b)| !present[a][b])
                .collect();
            'rounds: for _ in 0..SAMPLING_ROUNDS {
                if edges.len() >= target {
                    break;
                }
                absent.shuffle(rng);
                let mut kept = Vec::with_capacity(absent.len());
                for &(a, b) in &absent {
                    if edges.len() < target && rng.random::<f64>() < prob[a][b] {
                        edges.push((a, b));
                    } else {
                        kept.push((a, b));
                    }
                }
                absent = kept;
                if edges.len() >= target {
                    break 'rounds;
                }
            }
            if edges.len() < target {
                // Highest probability first, ties by ascending pair.
                absent.sort_by(|&(a1, b1), &(a2, b2)| {
                    prob[a2][b2]
                        .total_cmp(&prob[a1][b1])
                        .then((a1, b1).cmp(&(a2, b2)))
                });
                let missing = target - edges.len();
                edges.extend(absent.into_iter().take(missing));
            }
        }
        LinkTarget::Density(density) => {
            let total_pairs = n * (n.saturating_sub(1)) / 2;
            let wanted = density * total_pairs as f64 - edges.len() as f64;
            let candidates: Vec<(NodeId, NodeId)> = pairs(n)
                .filter(|&(a, b)| !present[a][b])
                .collect();
            let weights: Vec<f64> = candidates.iter().map(|&(a, b)| prob[a][b]).collect();
            let scale = rescale(&weights, wanted);
            for (&(a, b), w) in candidates.iter().zip(&weights) {
                if rng.random::<f64>() < (scale * w).min(1.0) {
                    edges.push((a, b));
                }
            }
        }
    }

    for e in edges.iter_mut() {
        if e.0 > e.1 {
            *e = (e.1, e.0);
        }
    }
    edges.sort_unstable();
    Ok(Topology { positions, edges })
}

fn pairs(n: usize) -> impl Iterator<Item = (NodeId, NodeId)> {
    (0..n).flat_map(move |a| (a + 1..n).map(move |b| (a, b)))
}

fn probabilities(pos: &[Point], shape: &WaxmanShape) -> Vec<Vec<f64>> {
    let n = pos.len();
    let mut max_d: f64 = 0.0;
    for (a, b) in pairs(n) {
        max_d = max_d.max(pos[a].distance(&pos[b]));
    }
    if max_d <= 0.0 {
        max_d = 1.0;
    }
    let mut prob = vec![vec![0.0; n]; n];
    for (a, b) in pairs(n) {
        let d = pos[a].distance(&pos[b]);
        let p = shape.alpha * (-d / (shape.beta * max_d)).exp();
        prob[a][b] = p;
        prob[b][a] = p;
    }
    prob
}

/// Each node, in random order, attaches to an already placed node chosen with
/// probability proportional to their Waxman weight.
fn spanning_tree<R: Rng + ?Sized>(
    n: usize,
    prob: &[Vec<f64>],
    rng: &mut R,
) -> Vec<(NodeId, NodeId)> {
    let mut order: Vec<NodeId> = (0..n).collect();
    order.shuffle(rng);
    let mut edges = Vec::with_capacity(n.saturating_sub(1));
    for k in 1..n {
        let v = order[k];
        let placed = &order[..k];
        let total: f64 = placed.iter().map(|&u| prob[u][v]).sum();
        let parent = if total > 0.0 {
            let mut x = rng.random::<f64>() * total;
            let mut pick = placed[placed.len() - 1];
            for &u in placed {
                x -= prob[u][v];
                if x < 0.0 {
                    pick = u;
                    break;
                }
            }
            pick
        } else {
            placed[rng.random_range(0..k)]
        };
        edges.push((parent, v));
    }
    edges
}

/// Finds `c` such that `sum(min(1, c * w))` equals `wanted`.
fn rescale(weights: &[f64], wanted: f64) -> f64 {
    if wanted <= 0.0 || weights.is_empty() {
        return 0.0;
    }
    let positive = weights.iter().filter(|&&w| w > 0.0).count() as f64;
    if wanted >= positive {
        return f64::INFINITY;
    }
    let expected = |c: f64| weights.iter().map(|w| (c * w).min(1.0)).sum::<f64>();
    let (mut lo, mut hi) = (0.0, 1.0);
    while expected(hi) < wanted {
        hi *= 2.0;
    }
    for _ in 0..100 {
        let mid = 0.5 * (lo + hi);
        if expected(mid) < wanted {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn params(n: usize, target: LinkTarget) -> WaxmanParams {
        WaxmanParams {
            node_count: n,
            target,
            shape: WaxmanShape::default(),
        }
    }

    #[test]
    fn exact_link_count_and_connected() {
        for seed in 0..5 {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let t = generate(&params(50, LinkTarget::Count(150)), &mut rng).unwrap();
            assert_eq!(t.edges.len(), 150);
            assert!(crate::network::connected(50, t.edges.iter().copied()));
            let mut dedup = t.edges.clone();
            dedup.dedup();
            assert_eq!(dedup.len(), 150);
            assert!(t.edges.iter().all(|&(a, b)| a < b));
        }
    }

    #[test]
    fn complete_graph_target_is_reachable() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let t = generate(&params(12, LinkTarget::Count(66)), &mut rng).unwrap();
        assert_eq!(t.edges.len(), 66);
    }

    #[test]
    fn infeasible_targets_rejected() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        assert!(generate(&params(4, LinkTarget::Count(7)), &mut rng).is_err());
        assert!(generate(&params(4, LinkTarget::Count(2)), &mut rng).is_err());
        assert!(generate(&params(0, LinkTarget::Count(0)), &mut rng).is_err());
        let mut bad = params(4, LinkTarget::Count(3));
        bad.shape.alpha = 0.0;
        assert!(generate(&bad, &mut rng).is_err());
    }

    #[test]
    fn single_node() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let t = generate(&params(1, LinkTarget::Count(0)), &mut rng).unwrap();
        assert_eq!(t.positions.len(), 1);
        assert!(t.edges.is_empty());
    }

    #[test]
    fn rescale_hits_expectation() {
        let w = [0.1, 0.2, 0.05, 0.9, 0.4];
        let c = rescale(&w, 2.0);
        let e: f64 = w.iter().map(|x| (c * x).min(1.0)).sum();
        assert!((e - 2.0).abs() < 1e-9);
        assert_eq!(rescale(&w, 0.0), 0.0);
        assert!(rescale(&w, 5.0).is_infinite());
    }
}
