//! A subset of the BRITE topology format.
//!
//! ```text
//! Topology: ( <N> Nodes, <M> Edges )
//! Nodes: ( <N> )
//! id  x  y  indeg  outdeg  as  type  cpu
//! Edges: ( <M> )
//! id  from  to  length  delay  bw  as_from  as_to  type
//! ```
//!
//! Columns are tab separated. `cpu` is an extension over stock BRITE.
//! `length`, `delay`, the AS columns and `type` are written as `0` and ignored
//! on read; `indeg`/`outdeg` carry the node degree and are ignored on read.
//! Decimal columns always have two fractional digits. Blank lines are skipped.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use crate::amount::Amount;
use crate::error::{Error, ModelError, ParseError, Result};
use crate::network::{NodeId, Point, SubstrateNetwork, VirtualNetwork};

/// The structural content of a BRITE file.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BriteTopology {
    /// Position and CPU capacity (or demand) per node, indexed by id.
    pub nodes: Vec<(Point, Amount)>,
    /// Endpoints and bandwidth per edge, indexed by id.
    pub edges: Vec<(NodeId, NodeId, Amount)>,
}

impl From<&SubstrateNetwork> for BriteTopology {
    fn from(sn: &SubstrateNetwork) -> Self {
        BriteTopology {
            nodes: sn.nodes().iter().map(|n| (n.pos, n.total_cpu)).collect(),
            edges: sn
                .links()
                .iter()
                .map(|l| (l.endpoints.0, l.endpoints.1, l.total_bw))
                .collect(),
        }
    }
}

impl From<&VirtualNetwork> for BriteTopology {
    fn from(vn: &VirtualNetwork) -> Self {
        BriteTopology {
            nodes: vn.nodes().iter().map(|n| (n.pos, n.cpu)).collect(),
            edges: vn
                .links()
                .iter()
                .map(|l| (l.endpoints.0, l.endpoints.1, l.bw))
                .collect(),
        }
    }
}

pub fn write_brite(t: &BriteTopology) -> String {
    let mut degree = vec![0usize; t.nodes.len()];
    for &(a, b, _) in &t.edges {
        degree[a] += 1;
        degree[b] += 1;
    }
    let mut out = String::new();
    let _ = writeln!(
        out,
        "Topology: ( {} Nodes, {} Edges )",
        t.nodes.len(),
        t.edges.len()
    );
    let _ = writeln!(out, "Nodes: ( {} )", t.nodes.len());
    for (id, (pos, cpu)) in t.nodes.iter().enumerate() {
        let d = degree[id];
        let _ = writeln!(out, "{id}\t{}\t{}\t{d}\t{d}\t0\t0\t{cpu}", pos.x, pos.y);
    }
    let _ = writeln!(out, "Edges: ( {} )", t.edges.len());
    for (id, (a, b, bw)) in t.edges.iter().enumerate() {
        let _ = writeln!(out, "{id}\t{a}\t{b}\t0\t0\t{bw}\t0\t0\t0");
    }
    out
}

pub fn read_brite(text: &str) -> Result<BriteTopology, ParseError> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim_end_matches('\r')))
        .filter(|(_, l)| !l.trim().is_empty());
    let last_line = text.lines().count() + 1;
    let mut next = |what: &str| {
        lines
            .next()
            .ok_or_else(|| ParseError::new(last_line, format!("unexpected end of file, expected {what}")))
    };

    let (ln, header) = next("the `Topology:` header")?;
    let (n, m) = parse_topology_header(header).ok_or_else(|| {
        ParseError::new(ln, format!("malformed header `{header}`, expected `Topology: ( <N> Nodes, <M> Edges )`"))
    })?;

    let (ln, line) = next("the `Nodes:` section")?;
    let declared = parse_section(line, "Nodes:")
        .ok_or_else(|| ParseError::new(ln, format!("expected `Nodes: ( {n} )`, found `{line}`")))?;
    if declared != n {
        return Err(ParseError::new(
            ln,
            format!("`Nodes:` declares {declared} nodes but the header says {n}"),
        ));
    }
    let mut nodes = Vec::with_capacity(n);
    for i in 0..n {
        let (ln, line) = next(&format!("node line {} of {n}", i + 1))?;
        let cols: Vec<&str> = line.split('\t').collect();
        if cols.len() != 8 {
            return Err(ParseError::new(
                ln,
                format!("node line {} of {n}: expected 8 columns, found {} in `{line}`", i + 1, cols.len()),
            ));
        }
        let id: usize = parse_num(cols[0], ln, "node id")?;
        if id != i {
            return Err(ParseError::new(ln, format!("node ids must be sequential: expected {i}, found {id}")));
        }
        let x = parse_amount(cols[1], ln, "x")?;
        let y = parse_amount(cols[2], ln, "y")?;
        for (c, name) in cols[3..7].iter().zip(["indeg", "outdeg", "as", "type"]) {
            parse_num::<i64>(c, ln, name)?;
        }
        let cpu = parse_amount(cols[7], ln, "cpu")?;
        nodes.push((Point::new(x, y), cpu));
    }

    let (ln, line) = next("the `Edges:` section")?;
    let declared = parse_section(line, "Edges:")
        .ok_or_else(|| ParseError::new(ln, format!("expected `Edges: ( {m} )`, found `{line}`")))?;
    if declared != m {
        return Err(ParseError::new(
            ln,
            format!("`Edges:` declares {declared} edges but the header says {m}"),
        ));
    }
    let mut edges = Vec::with_capacity(m);
    for i in 0..m {
        let (ln, line) = next(&format!("edge line {} of {m}", i + 1))?;
        let cols: Vec<&str> = line.split('\t').collect();
        if cols.len() != 9 {
            return Err(ParseError::new(
                ln,
                format!("edge line {} of {m}: expected 9 columns, found {} in `{line}`", i + 1, cols.len()),
            ));
        }
        let id: usize = parse_num(cols[0], ln, "edge id")?;
        if id != i {
            return Err(ParseError::new(ln, format!("edge ids must be sequential: expected {i}, found {id}")));
        }
        let a: usize = parse_num(cols[1], ln, "from")?;
        let b: usize = parse_num(cols[2], ln, "to")?;
        if a >= n || b >= n {
            return Err(ParseError::new(ln, format!("edge {id} references unknown node")));
        }
        parse_num::<f64>(cols[3], ln, "length")?;
        parse_num::<f64>(cols[4], ln, "delay")?;
        let bw = parse_amount(cols[5], ln, "bw")?;
        for (c, name) in cols[6..9].iter().zip(["as_from", "as_to", "type"]) {
            parse_num::<i64>(c, ln, name)?;
        }
        edges.push((a, b, bw));
    }
    if let Some((ln, line)) = lines.next() {
        return Err(ParseError::new(ln, format!("trailing content `{line}`")));
    }
    Ok(BriteTopology { nodes, edges })
}

/// Parses a substrate; residual capacities start at their totals.
pub fn substrate_from_brite(text: &str) -> Result<SubstrateNetwork, ParseError> {
    let t = read_brite(text)?;
    let mut sn = SubstrateNetwork::new();
    for (i, &(pos, cpu)) in t.nodes.iter().enumerate() {
        if cpu.is_negative() {
            return Err(ParseError::new(i + 3, format!("node {i}: negative cpu capacity")));
        }
        sn.add_node_at(cpu, pos);
    }
    for (i, &(a, b, bw)) in t.edges.iter().enumerate() {
        sn.add_link(a, b, bw).map_err(|e| edge_error(t.nodes.len(), i, e))?;
    }
    Ok(sn)
}

pub fn vn_from_brite(text: &str) -> Result<VirtualNetwork, ParseError> {
    let t = read_brite(text)?;
    let mut vn = VirtualNetwork::new();
    for (i, &(pos, cpu)) in t.nodes.iter().enumerate() {
        vn.add_node_at(cpu, pos)
            .map_err(|e| ParseError::new(i + 3, format!("node {i}: {e}")))?;
    }
    for (i, &(a, b, bw)) in t.edges.iter().enumerate() {
        vn.add_link(a, b, bw).map_err(|e| edge_error(t.nodes.len(), i, e))?;
    }
    Ok(vn)
}

// Line numbers assume the writer's layout (no blank lines).
fn edge_error(n: usize, i: usize, e: ModelError) -> ParseError {
    ParseError::new(n + i + 4, format!("edge {i}: {e}"))
}

pub fn save_substrate(path: &Path, sn: &SubstrateNetwork) -> Result<()> {
    write_file(path, &write_brite(&sn.into()))
}

pub fn load_substrate(path: &Path) -> Result<SubstrateNetwork> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    substrate_from_brite(&text).map_err(|e| e.in_file(path).into())
}

pub fn save_vn(path: &Path, vn: &VirtualNetwork) -> Result<()> {
    write_file(path, &write_brite(&vn.into()))
}

pub fn load_vn(path: &Path) -> Result<VirtualNetwork> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    vn_from_brite(&text).map_err(|e| e.in_file(path).into())
}

/// Writes to a sibling temporary file, then renames over `path`.
pub(crate) fn write_file(path: &Path, contents: &str) -> Result<()> {
    let mut tmp = path.as_os_str().to_owned();
    tmp.push(".tmp");
    let tmp = std::path::PathBuf::from(tmp);
    fs::write(&tmp, contents).map_err(|e| Error::io(&tmp, e))?;
    fs::rename(&tmp, path).map_err(|e| Error::io(path, e))
}

fn parse_topology_header(line: &str) -> Option<(usize, usize)> {
    let cleaned: String = line
        .chars()
        .map(|c| if matches!(c, '(' | ')' | ',') { ' ' } else { c })
        .collect();
    let toks: Vec<&str> = cleaned.split_whitespace().collect();
    match toks.as_slice() {
        ["Topology:", n, "Nodes", m, "Edges"] => Some((n.parse().ok()?, m.parse().ok()?)),
        _ => None,
    }
}

fn parse_section(line: &str, keyword: &str) -> Option<usize> {
    let cleaned: String = line
        .chars()
        .map(|c| if matches!(c, '(' | ')') { ' ' } else { c })
        .collect();
    let toks: Vec<&str> = cleaned.split_whitespace().collect();
    match toks.as_slice() {
        [k, n] if *k == keyword => n.parse().ok(),
        _ => None,
    }
}

fn parse_num<T: std::str::FromStr>(s: &str, line: usize, what: &str) -> Result<T, ParseError> {
    s.trim()
        .parse()
        .map_err(|_| ParseError::new(line, format!("{what}: `{s}` is not a number")))
}

fn parse_amount(s: &str, line: usize, what: &str) -> Result<Amount, ParseError> {
    s.trim()
        .parse()
        .map_err(|e| ParseError::new(line, format!("{what}: {e}")))
}
