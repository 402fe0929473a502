//! Workload manifest: one CSV row per request pointing at its BRITE file.
//!
//! ```text
//! vnr_id,brite_file,arrival,lifetime
//! 0,vn_00000.brite,12,431
//! ```
//!
//! `brite_file` is relative to the manifest's directory.

use std::fs;
use std::path::{Path, PathBuf};

use crate::error::{Error, ParseError, Result};
use crate::network::VnRequest;
use crate::workload::brite;

pub const MANIFEST_HEADER: [&str; 4] = ["vnr_id", "brite_file", "arrival", "lifetime"];
pub const MANIFEST_FILE: &str = "manifest.csv";

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ManifestRow {
    pub vnr_id: usize,
    pub brite_file: String,
    pub arrival: u64,
    pub lifetime: u64,
}

pub fn vn_file_name(id: usize) -> String {
    format!("vn_{id:05}.brite")
}

pub fn format_manifest(rows: &[ManifestRow]) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(MANIFEST_HEADER).expect("in-memory write");
    for r in rows {
        w.write_record([
            r.vnr_id.to_string(),
            r.brite_file.clone(),
            r.arrival.to_string(),
            r.lifetime.to_string(),
        ])
        .expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf8")
}

/// Parses manifest text. Row numbers in errors count data rows from 1;
/// line numbers count the header as line 1.
pub fn parse_manifest(text: &str) -> Result<Vec<ManifestRow>, ParseError> {
    let mut r = csv::ReaderBuilder::new()
        .has_headers(true)
        .from_reader(text.as_bytes());
    let header = r
        .headers()
        .map_err(|e| ParseError::new(1, format!("unreadable header: {e}")))?;
    if header.iter().ne(MANIFEST_HEADER) {
        return Err(ParseError::new(
            1,
            format!("header must be `{}`", MANIFEST_HEADER.join(",")),
        ));
    }
    let mut rows: Vec<ManifestRow> = Vec::new();
    for (i, rec) in r.records().enumerate() {
        let row_no = i + 1;
        let line = row_no + 1;
        let rec = rec.map_err(|e| ParseError::new(line, format!("row {row_no}: {e}")))?;
        let field = |k: usize| rec.get(k).unwrap_or("").trim();
        let num = |k: usize| {
            field(k).parse::<u64>().map_err(|_| {
                ParseError::new(
                    line,
                    format!("row {row_no}: {} `{}` is not a non-negative integer", MANIFEST_HEADER[k], field(k)),
                )
            })
        };
        let row = ManifestRow {
            vnr_id: num(0)? as usize,
            brite_file: field(1).to_string(),
            arrival: num(2)?,
            lifetime: num(3)?,
        };
        if row.lifetime == 0 {
            return Err(ParseError::new(line, format!("row {row_no}: lifetime must be positive")));
        }
        if let Some(prev) = rows.last() {
            if row.arrival < prev.arrival {
                return Err(ParseError::new(
                    line,
                    format!("row {row_no}: arrival {} precedes previous arrival {}", row.arrival, prev.arrival),
                ));
            }
        }
        rows.push(row);
    }
    Ok(rows)
}

/// Writes one BRITE file per request plus `manifest.csv` into `dir`.
pub fn write_manifest(dir: &Path, workload: &[VnRequest]) -> Result<PathBuf> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let mut rows = Vec::with_capacity(workload.len());
    for req in workload {
        let name = vn_file_name(req.id);
        brite::save_vn(&dir.join(&name), &req.graph)?;
        rows.push(ManifestRow {
            vnr_id: req.id,
            brite_file: name,
            arrival: req.arrival,
            lifetime: req.lifetime,
        });
    }
    let path = dir.join(MANIFEST_FILE);
    brite::write_file(&path, &format_manifest(&rows))?;
    Ok(path)
}

pub fn read_manifest(path: &Path) -> Result<Vec<VnRequest>> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let rows = parse_manifest(&text).map_err(|e| e.in_file(path))?;
    let base = path.parent().unwrap_or(Path::new("."));
    let mut out = Vec::with_capacity(rows.len());
    for (i, row) in rows.into_iter().enumerate() {
        let file = base.join(&row.brite_file);
        if !file.is_file() {
            return Err(ParseError::new(
                i + 2,
                format!("row {}: referenced file `{}` does not exist", i + 1, file.display()),
            )
            .in_file(path)
            .into());
        }
        let graph = brite::load_vn(&file)?;
        out.push(VnRequest::new(row.vnr_id, graph, row.arrival, row.lifetime)?);
    }
    Ok(out)
}
