//! Flat `key = value` run configuration.
//!
//! ```text
//! # desk-scale comparison
//! preset = desk
//! seed = 7
//! max_backtrack = 3n
//! ```
//!
//! `preset` (`full` or `desk`, default `full`) fills every key; the other
//! lines override it in any order. `seed` has no default.

use std::fmt::Write as _;
use std::path::PathBuf;
use std::str::FromStr;

use crate::amount::Amount;
use crate::embedding::{Algorithm, EmbedParams};
use crate::error::{Error, Result};
use crate::workload::{LinkTarget, SubstrateParams, WaxmanShape, WorkloadParams};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Preset {
    Full,
    Desk,
}

impl FromStr for Preset {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "full" => Ok(Preset::Full),
            "desk" => Ok(Preset::Desk),
            other => Err(Error::Config(format!("unknown preset `{other}` (full, desk)"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub seed: u64,
    pub substrate: SubstrateParams,
    pub workload: WorkloadParams,
    pub embed: EmbedParams,
    pub algorithms: Vec<Algorithm>,
    pub horizon: u64,
    pub sample_interval: u64,
    /// Independent runs with seeds `seed, seed + 1, ...`.
    pub repetitions: u64,
    pub out: PathBuf,
    /// Load the substrate from this BRITE file instead of generating it.
    pub substrate_file: Option<PathBuf>,
    /// Load requests from this manifest instead of generating them.
    pub manifest_file: Option<PathBuf>,
}

/// Substrate and workload seeds for one run seed.
pub fn derive_seeds(seed: u64) -> (u64, u64) {
    (seed, seed ^ 0x9e37_79b9_7f4a_7c15)
}

impl RunConfig {
    pub fn preset(preset: Preset, seed: u64) -> Self {
        let (substrate, workload, horizon) = match preset {
            Preset::Full => (
                SubstrateParams::full_scale(0),
                WorkloadParams::full_scale(0),
                30_000,
            ),
            Preset::Desk => (
                SubstrateParams::desk_scale(0),
                WorkloadParams::desk_scale(0),
                10_000,
            ),
        };
        let mut c = RunConfig {
            seed,
            substrate,
            workload,
            embed: EmbedParams::default(),
            algorithms: Algorithm::ALL.to_vec(),
            horizon,
            sample_interval: 1000,
            repetitions: 1,
            out: PathBuf::from("out"),
            substrate_file: None,
            manifest_file: None,
        };
        c.reseed(seed);
        c
    }

    pub fn reseed(&mut self, seed: u64) {
        let (s, w) = derive_seeds(seed);
        self.seed = seed;
        self.substrate.seed = s;
        self.workload.seed = w;
    }

    /// The same configuration for repetition `i`.
    pub fn repetition(&self, i: u64) -> RunConfig {
        let mut c = self.clone();
        c.reseed(self.seed + i);
        c.repetitions = 1;
        c
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut preset = Preset::Full;
        let mut seed = None;
        let mut pairs = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| Error::Config(format!("line {}: expected `key = value`", i + 1)))?;
            let (k, v) = (k.trim(), v.trim());
            match k {
                "preset" => preset = v.parse()?,
                "seed" => seed = Some(parse_value::<u64>(k, v)?),
                _ => pairs.push((i + 1, k, v)),
            }
        }
        let seed = seed.ok_or_else(|| Error::Config("`seed` is required".into()))?;
        let mut c = RunConfig::preset(preset, seed);
        for (line, k, v) in pairs {
            c.set(k, v)
                .map_err(|e| Error::Config(format!("line {line}: {}", strip_prefix(e))))?;
        }
        c.validate()?;
        Ok(c)
    }

    pub fn set(&mut self, key: &str, v: &str) -> Result<()> {
        let s = &mut self.substrate;
        let w = &mut self.workload;
        match key {
            "seed" => self.reseed(parse_value(key, v)?),
            "substrate_nodes" => s.waxman.node_count = parse_value(key, v)?,
            "substrate_links" => s.waxman.target = LinkTarget::Count(parse_value(key, v)?),
            "substrate_cpu" => s.cpu_profiles = parse_list(key, v)?,
            "substrate_bw" => s.bw_range = parse_pair(key, v)?,
            "waxman_alpha" => {
                let a = parse_value(key, v)?;
                s.waxman.shape.alpha = a;
                w.vn_shape.alpha = a;
            }
            "waxman_beta" => {
                let b = parse_value(key, v)?;
                s.waxman.shape.beta = b;
                w.vn_shape.beta = b;
            }
            "waxman_plane" => {
                let p = parse_value(key, v)?;
                s.waxman.shape.plane_size = p;
                w.vn_shape.plane_size = p;
            }
            "vnr_count" => w.vnr_count = parse_value(key, v)?,
            "vn_nodes" => w.vn_node_range = parse_pair(key, v)?,
            "vn_density" => w.vn_density = parse_value(key, v)?,
            "vn_cpu" => w.cpu_choices = parse_list(key, v)?,
            "vn_bw" => w.bw_range = parse_pair(key, v)?,
            "arrival_rate" => w.arrival_rate = parse_value(key, v)?,
            "lifetime" => w.lifetime_range = parse_pair(key, v)?,
            "max_hops" => self.embed.max_hops = parse_value(key, v)?,
            "max_backtrack" => self.embed.max_backtrack = parse_value(key, v)?,
            "distinct_hosts" => self.embed.distinct_hosts = parse_value(key, v)?,
            "candidate_bw" => self.embed.candidate_bw = parse_value(key, v)?,
            "algorithms" => self.algorithms = parse_list(key, v)?,
            "horizon" => self.horizon = parse_value(key, v)?,
            "sample_interval" => self.sample_interval = parse_value(key, v)?,
            "repetitions" => self.repetitions = parse_value(key, v)?,
            "out" => self.out = PathBuf::from(v),
            "substrate_file" => self.substrate_file = non_empty(v),
            "manifest_file" => self.manifest_file = non_empty(v),
            _ => return Err(Error::Config(format!("unknown key `{key}`"))),
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::Config(m.to_string()));
        if self.algorithms.is_empty() {
            return bad("`algorithms` is empty");
        }
        if self.sample_interval == 0 {
            return bad("`sample_interval` must be positive");
        }
        if self.repetitions == 0 {
            return bad("`repetitions` must be positive");
        }
        self.substrate.waxman.validate().map_err(to_config)?;
        self.workload.validate().map_err(to_config)?;
        for f in [&self.substrate_file, &self.manifest_file].into_iter().flatten() {
            if !f.is_file() {
                return Err(Error::Config(format!("{} does not exist", f.display())));
            }
        }
        Ok(())
    }

    /// Every key with its resolved value; parsing this text gives back the
    /// same configuration.
    pub fn lock_text(&self) -> String {
        let s = &self.substrate;
        let w = &self.workload;
        let shape: WaxmanShape = s.waxman.shape;
        let links = match s.waxman.target {
            LinkTarget::Count(m) => m,
            LinkTarget::Density(_) => unreachable!("substrates use link counts"),
        };
        let join = |xs: &[Amount]| xs.iter().map(Amount::to_string).collect::<Vec<_>>().join(",");
        let mut t = String::new();
        let mut kv = |k: &str, v: String| writeln!(t, "{k} = {v}").expect("string write");
        kv("seed", self.seed.to_string());
        kv("substrate_nodes", s.waxman.node_count.to_string());
        kv("substrate_links", links.to_string());
        kv("substrate_cpu", join(&s.cpu_profiles));
        kv("substrate_bw", format!("{},{}", s.bw_range.0, s.bw_range.1));
        kv("waxman_alpha", shape.alpha.to_string());
        kv("waxman_beta", shape.beta.to_string());
        kv("waxman_plane", shape.plane_size.to_string());
        kv("vnr_count", w.vnr_count.to_string());
        kv("vn_nodes", format!("{},{}", w.vn_node_range.0, w.vn_node_range.1));
        kv("vn_density", w.vn_density.to_string());
        kv("vn_cpu", join(&w.cpu_choices));
        kv("vn_bw", format!("{},{}", w.bw_range.0, w.bw_range.1));
        kv("arrival_rate", w.arrival_rate.to_string());
        kv("lifetime", format!("{},{}", w.lifetime_range.0, w.lifetime_range.1));
        kv("max_hops", self.embed.max_hops.to_string());
        kv("max_backtrack", self.embed.max_backtrack.to_string());
        kv("distinct_hosts", self.embed.distinct_hosts.to_string());
        kv("candidate_bw", self.embed.candidate_bw.to_string());
        kv(
            "algorithms",
            self.algorithms.iter().map(Algorithm::to_string).collect::<Vec<_>>().join(","),
        );
        kv("horizon", self.horizon.to_string());
        kv("sample_interval", self.sample_interval.to_string());
        kv("repetitions", self.repetitions.to_string());
        kv("out", self.out.display().to_string());
        let path = |p: &Option<PathBuf>| p.as_ref().map(|p| p.display().to_string()).unwrap_or_default();
        kv("substrate_file", path(&self.substrate_file));
        kv("manifest_file", path(&self.manifest_file));
        t
    }
}

fn to_config(e: Error) -> Error {
    Error::Config(strip_prefix(e))
}

fn strip_prefix(e: Error) -> String {
    match e {
        Error::Config(m) | Error::Params(m) => m,
        other => other.to_string(),
    }
}

fn non_empty(v: &str) -> Option<PathBuf> {
    (!v.is_empty()).then(|| PathBuf::from(v))
}

fn parse_value<T: FromStr>(key: &str, v: &str) -> Result<T>
where
    T::Err: std::fmt::Display,
{
    v.trim()
        .parse()
        .map_err(|e| Error::Config(format!("`{key}`: cannot parse `{v}`: {e}")))
}

fn parse_list<T: FromStr>(key: &str, v: &str) -> Result<Vec<T>>
where
    T::Err: std::fmt::Display,
{
    v.split(',').map(|x| parse_value(key, x)).collect()
}

fn parse_pair<T: FromStr>(key: &str, v: &str) -> Result<(T, T)>
where
    T::Err: std::fmt::Display,
{
    let mut xs: Vec<T> = parse_list(key, v)?;
    if xs.len() != 2 {
        return Err(Error::Config(format!("`{key}` expects `low,high`")));
    }
    let hi = xs.pop().expect("two");
    let lo = xs.pop().expect("two");
    Ok((lo, hi))
}
