//! Metric time series and per-request log as CSV.

use std::fs;
use std::path::Path;

use crate::error::{Error, ParseError, Result};
use crate::simulation::{RequestRecord, Sample, SimReport};
use crate::workload::brite::write_file;

pub const REPORT_HEADER: [&str; 7] = [
    "time",
    "offered",
    "accepted",
    "acceptance_ratio",
    "avg_revenue",
    "avg_cost",
    "rc_ratio",
];

pub const REQUEST_LOG_HEADER: [&str; 7] = [
    "vnr_id",
    "arrival",
    "lifetime",
    "accepted",
    "revenue",
    "cost",
    "backtracks",
];

/// One report line. Ratios and averages are written with six decimals.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ReportRow {
    pub time: u64,
    pub offered: usize,
    pub accepted: usize,
    pub acceptance_ratio: f64,
    pub avg_revenue: f64,
    pub avg_cost: f64,
    pub rc_ratio: f64,
}

impl From<&Sample> for ReportRow {
    fn from(s: &Sample) -> Self {
        ReportRow {
            time: s.time,
            offered: s.offered,
            accepted: s.accepted,
            acceptance_ratio: s.acceptance_ratio(),
            avg_revenue: s.average_revenue(),
            avg_cost: s.average_cost(),
            rc_ratio: s.revenue_cost_ratio(),
        }
    }
}

fn csv_string(header: [&str; 7], rows: impl Iterator<Item = [String; 7]>) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header).expect("in-memory write");
    for r in rows {
        w.write_record(r).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf8")
}

pub fn format_report_csv(rows: &[ReportRow]) -> String {
    csv_string(
        REPORT_HEADER,
        rows.iter().map(|r| {
            [
                r.time.to_string(),
                r.offered.to_string(),
                r.accepted.to_string(),
                format!("{:.6}", r.acceptance_ratio),
                format!("{:.6}", r.avg_revenue),
                format!("{:.6}", r.avg_cost),
                format!("{:.6}", r.rc_ratio),
            ]
        }),
    )
}

pub fn format_request_log(records: &[RequestRecord]) -> String {
    csv_string(
        REQUEST_LOG_HEADER,
        records.iter().map(|r| {
            [
                r.vnr_id.to_string(),
                r.arrival.to_string(),
                r.lifetime.to_string(),
                u8::from(r.accepted).to_string(),
                r.revenue.to_string(),
                r.cost.to_string(),
                r.backtracks.to_string(),
            ]
        }),
    )
}

/// Parses report CSV text. Columns are found by name, so their order is free;
/// a missing column is an error naming it.
pub fn parse_report_csv(text: &str) -> Result<Vec<ReportRow>, ParseError> {
    let mut r = csv::ReaderBuilder::new()
        .has_headers(true)
        .from_reader(text.as_bytes());
    let header = r
        .headers()
        .map_err(|e| ParseError::new(1, format!("unreadable header: {e}")))?
        .clone();
    let mut idx = [0usize; 7];
    for (k, name) in REPORT_HEADER.iter().enumerate() {
        idx[k] = header
            .iter()
            .position(|h| h.trim() == *name)
            .ok_or_else(|| ParseError::new(1, format!("missing column `{name}`")))?;
    }
    let mut rows = Vec::new();
    for (i, rec) in r.records().enumerate() {
        let line = i + 2;
        let rec = rec.map_err(|e| ParseError::new(line, e.to_string()))?;
        let field = |k: usize| rec.get(idx[k]).unwrap_or("").trim();
        let int = |k: usize| {
            field(k).parse::<u64>().map_err(|_| {
                ParseError::new(line, format!("{} `{}` is not an integer", REPORT_HEADER[k], field(k)))
            })
        };
        let real = |k: usize| {
            field(k).parse::<f64>().map_err(|_| {
                ParseError::new(line, format!("{} `{}` is not a number", REPORT_HEADER[k], field(k)))
            })
        };
        rows.push(ReportRow {
            time: int(0)?,
            offered: int(1)? as usize,
            accepted: int(2)? as usize,
            acceptance_ratio: real(3)?,
            avg_revenue: real(4)?,
            avg_cost: real(5)?,
            rc_ratio: real(6)?,
        });
    }
    Ok(rows)
}

pub fn write_report_csv(report: &SimReport, path: &Path) -> Result<()> {
    write_file(path, &format_report_csv(&report.rows()))
}

pub fn write_request_log(report: &SimReport, path: &Path) -> Result<()> {
    write_file(path, &format_request_log(&report.requests))
}

pub fn read_report_csv(path: &Path) -> Result<Vec<ReportRow>> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_report_csv(&text).map_err(|e| e.in_file(path).into())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::amount::Amount;

    #[test]
    fn header_is_exact() {
        assert_eq!(
            format_report_csv(&[]),
            "time,offered,accepted,acceptance_ratio,avg_revenue,avg_cost,rc_ratio\n"
        );
        assert_eq!(
            format_request_log(&[]),
            "vnr_id,arrival,lifetime,accepted,revenue,cost,backtracks\n"
        );
    }

    #[test]
    fn round_trip() {
        let s = Sample {
            time: 1000,
            offered: 4,
            accepted: 2,
            revenue: Amount::from_units(3500),
            cost: Amount::from_units(2800),
        };
        let rows = vec![ReportRow::from(&s)];
        let text = format_report_csv(&rows);
        assert_eq!(text.lines().nth(1), Some("1000,4,2,0.500000,3.500000,2.800000,1.250000"));
        assert_eq!(parse_report_csv(&text).unwrap(), rows);
    }

    #[test]
    fn missing_column_is_named() {
        let err = parse_report_csv("time,offered,accepted,acceptance_ratio,avg_revenue,rc_ratio\n").unwrap_err();
        assert!(err.message.contains("avg_cost"), "{err}");
    }

    #[test]
    fn log_row() {
        let r = RequestRecord {
            vnr_id: 3,
            arrival: 12,
            lifetime: 400,
            accepted: true,
            revenue: Amount::from_hundredths(12345),
            cost: Amount::from_units(100),
            backtracks: 2,
        };
        assert_eq!(format_request_log(&[r]).lines().nth(1), Some("3,12,400,1,123.45,100.00,2"));
    }
}
