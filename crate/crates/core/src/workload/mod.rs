//! Topology and request-stream generation, plus on-disk formats.

pub mod brite;
pub mod manifest;
pub mod waxman;

use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp};

use crate::amount::Amount;
use crate::error::{Error, Result};
use crate::network::{SubstrateNetwork, VirtualNetwork, VnRequest};

pub use waxman::{LinkTarget, Topology, WaxmanParams, WaxmanShape};

/// Everything needed to build a substrate network.
#[derive(Clone, Debug, PartialEq)]
pub struct SubstrateParams {
    pub waxman: WaxmanParams,
    pub cpu_profiles: Vec<Amount>,
    pub bw_range: (Amount, Amount),
    pub seed: u64,
}

impl SubstrateParams {
    /// 200 nodes, 1000 links, CPU from two dual-core server profiles
    /// (2 x 1860 and 2 x 2660), bandwidth uniform in [50, 100].
    pub fn full_scale(seed: u64) -> Self {
        SubstrateParams {
            waxman: WaxmanParams {
                node_count: 200,
                target: LinkTarget::Count(1000),
                shape: WaxmanShape::default(),
            },
            cpu_profiles: vec![Amount::from_units(3720), Amount::from_units(5320)],
            bw_range: (Amount::from_units(50), Amount::from_units(100)),
            seed,
        }
    }

    /// 50 nodes, 150 links; otherwise as [`SubstrateParams::full_scale`].
    pub fn desk_scale(seed: u64) -> Self {
        let mut p = Self::full_scale(seed);
        p.waxman.node_count = 50;
        p.waxman.target = LinkTarget::Count(150);
        p
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct WorkloadParams {
    pub vnr_count: usize,
    pub vn_node_range: (usize, usize),
    pub vn_density: f64,
    pub vn_shape: WaxmanShape,
    pub cpu_choices: Vec<Amount>,
    pub bw_range: (Amount, Amount),
    /// Requests per time unit.
    pub arrival_rate: f64,
    pub lifetime_range: (u64, u64),
    pub seed: u64,
}

impl WorkloadParams {
    /// 3000 requests of 2-20 nodes at 10 arrivals per 100 time units,
    /// lifetimes in [300, 700].
    pub fn full_scale(seed: u64) -> Self {
        WorkloadParams {
            vnr_count: 3000,
            vn_node_range: (2, 20),
            vn_density: 0.5,
            vn_shape: WaxmanShape::default(),
            cpu_choices: [2500, 2000, 1000, 500]
                .into_iter()
                .map(Amount::from_units)
                .collect(),
            bw_range: (Amount::from_units(1), Amount::from_units(50)),
            arrival_rate: 0.1,
            lifetime_range: (300, 700),
            seed,
        }
    }

    /// 300 requests of 2-10 nodes; otherwise as [`WorkloadParams::full_scale`].
    pub fn desk_scale(seed: u64) -> Self {
        WorkloadParams {
            vnr_count: 300,
            vn_node_range: (2, 10),
            ..Self::full_scale(seed)
        }
    }

    pub fn validate(&self) -> Result<()> {
        let (lo, hi) = self.vn_node_range;
        if lo < 1 || lo > hi {
            return Err(Error::Params(format!("bad VN node range [{lo}, {hi}]")));
        }
        check_range("bandwidth", self.bw_range)?;
        if self.bw_range.0 <= Amount::ZERO {
            return Err(Error::Params("virtual bandwidth must be positive".into()));
        }
        if self.cpu_choices.is_empty() || self.cpu_choices.iter().any(|&c| c <= Amount::ZERO) {
            return Err(Error::Params("cpu choices must be non-empty and positive".into()));
        }
        if !(self.arrival_rate > 0.0 && self.arrival_rate.is_finite()) {
            return Err(Error::Params("arrival rate must be positive".into()));
        }
        let (lmin, lmax) = self.lifetime_range;
        if lmin < 1 || lmin > lmax {
            return Err(Error::Params(format!("bad lifetime range [{lmin}, {lmax}]")));
        }
        Ok(())
    }
}

fn check_range(what: &str, (lo, hi): (Amount, Amount)) -> Result<()> {
    if lo > hi || lo.is_negative() {
        return Err(Error::Params(format!("bad {what} range [{lo}, {hi}]")));
    }
    Ok(())
}

/// Uniform over the hundredths in `[lo, hi]`.
fn uniform_amount<R: Rng + ?Sized>(rng: &mut R, (lo, hi): (Amount, Amount)) -> Amount {
    Amount::from_hundredths(rng.random_range(lo.hundredths()..=hi.hundredths()))
}

pub fn generate_substrate(p: &SubstrateParams) -> Result<SubstrateNetwork> {
    if p.cpu_profiles.is_empty() || p.cpu_profiles.iter().any(|c| c.is_negative()) {
        return Err(Error::Params("cpu profiles must be non-empty and non-negative".into()));
    }
    check_range("bandwidth", p.bw_range)?;
    if !matches!(p.waxman.target, LinkTarget::Count(_)) {
        return Err(Error::Params("substrate generation needs an exact link count".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(p.seed);
    let topo = waxman::generate(&p.waxman, &mut rng)?;
    let mut sn = SubstrateNetwork::new();
    for &pos in &topo.positions {
        let cpu = *p.cpu_profiles.choose(&mut rng).expect("non-empty");
        sn.add_node_at(cpu, pos);
    }
    for &(a, b) in &topo.edges {
        let bw = uniform_amount(&mut rng, p.bw_range);
        sn.add_link(a, b, bw)?;
    }
    Ok(sn)
}

pub fn generate_vn(
    p: &WaxmanParams,
    cpu_choices: &[Amount],
    bw_range: (Amount, Amount),
    seed: u64,
) -> Result<VirtualNetwork> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    vn_with_rng(p, cpu_choices, bw_range, &mut rng)
}

fn vn_with_rng<R: Rng + ?Sized>(
    p: &WaxmanParams,
    cpu_choices: &[Amount],
    bw_range: (Amount, Amount),
    rng: &mut R,
) -> Result<VirtualNetwork> {
    if cpu_choices.is_empty() {
        return Err(Error::Params("no cpu choices".into()));
    }
    let topo = waxman::generate(p, rng)?;
    let mut vn = VirtualNetwork::new();
    for &pos in &topo.positions {
        let cpu = *cpu_choices.choose(rng).expect("non-empty");
        vn.add_node_at(cpu, pos)?;
    }
    for &(a, b) in &topo.edges {
        let bw = uniform_amount(rng, bw_range);
        vn.add_link(a, b, bw)?;
    }
    Ok(vn)
}

/// A Poisson stream of requests, sorted by arrival. Arrival instants and
/// lifetimes are whole time units.
pub fn generate_workload(p: &WorkloadParams) -> Result<Vec<VnRequest>> {
    p.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(p.seed);
    let gap = Exp::new(p.arrival_rate).map_err(|e| Error::Params(e.to_string()))?;
    let mut clock = 0.0f64;
    let mut out = Vec::with_capacity(p.vnr_count);
    for id in 0..p.vnr_count {
        clock += gap.sample(&mut rng);
        let arrival = clock.round() as u64;
        let lifetime = rng.random_range(p.lifetime_range.0..=p.lifetime_range.1);
        let nodes = rng.random_range(p.vn_node_range.0..=p.vn_node_range.1);
        let vn_seed: u64 = rng.random();
        let wp = WaxmanParams {
            node_count: nodes,
            target: LinkTarget::Density(p.vn_density),
            shape: p.vn_shape,
        };
        let graph = generate_vn(&wp, &p.cpu_choices, p.bw_range, vn_seed)?;
        out.push(VnRequest::new(id, graph, arrival, lifetime)?);
    }
    Ok(out)
}
