//! Discrete-event replay of a request workload and the long-run metrics.

mod report;

use std::collections::BTreeMap;

use crate::amount::Amount;
use crate::embedding::{Algorithm, EmbedParams};
use crate::error::{Error, Result};
use crate::network::{cost, revenue, EmbeddingMap, Reservation, SubstrateNetwork, VnRequest};

pub use report::{
    format_report_csv, format_request_log, parse_report_csv, read_report_csv, write_report_csv,
    write_request_log, ReportRow, REPORT_HEADER, REQUEST_LOG_HEADER,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum EventKind {
    // Declared first so departures sort ahead of arrivals at equal times.
    Departure,
    Arrival,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct SimEvent {
    pub time: u64,
    pub kind: EventKind,
    pub vnr_id: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SimSettings {
    pub algorithm: Algorithm,
    pub params: EmbedParams,
    pub horizon: u64,
    pub sample_interval: u64,
}

/// Counters and time-integrated revenue/cost up to `time`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Sample {
    pub time: u64,
    pub offered: usize,
    pub accepted: usize,
    pub revenue: Amount,
    pub cost: Amount,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RequestRecord {
    pub vnr_id: usize,
    pub arrival: u64,
    pub lifetime: u64,
    pub accepted: bool,
    /// Per time unit while alive.
    pub revenue: Amount,
    /// Per time unit while alive; zero when rejected.
    pub cost: Amount,
    pub backtracks: u64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SimReport {
    pub algorithm: Algorithm,
    pub horizon: u64,
    pub samples: Vec<Sample>,
    pub requests: Vec<RequestRecord>,
}

/// State handed to an observer after every processed event.
pub struct Checkpoint<'a> {
    pub event: SimEvent,
    pub substrate: &'a SubstrateNetwork,
    /// Accepted requests still holding resources, by id.
    pub alive: Vec<(&'a VnRequest, &'a EmbeddingMap)>,
}

/// Replays `workload` against `sn`.
///
/// Arrivals after the horizon are dropped. Resources of accepted requests
/// are released at their departures, including departures past the
/// horizon, so `sn` ends with every residual restored.
pub fn run_simulation(
    sn: &mut SubstrateNetwork,
    workload: &[VnRequest],
    s: &SimSettings,
) -> Result<SimReport> {
    run_simulation_observed(sn, workload, s, |_| {})
}

pub fn run_simulation_observed(
    sn: &mut SubstrateNetwork,
    workload: &[VnRequest],
    s: &SimSettings,
    mut observe: impl FnMut(&Checkpoint<'_>),
) -> Result<SimReport> {
    if s.sample_interval == 0 {
        return Err(Error::Params("sample interval must be positive".into()));
    }
    if workload.windows(2).any(|w| w[1].arrival < w[0].arrival) {
        return Err(Error::Params("workload must be sorted by arrival".into()));
    }
    if let Some(last) = workload.last().filter(|r| r.arrival > s.horizon) {
        log::warn!(
            "last arrival {} is past the horizon {}; truncating",
            last.arrival,
            s.horizon
        );
    }
    let mut events: Vec<SimEvent> = Vec::new();
    for (i, r) in workload.iter().enumerate() {
        if r.arrival > s.horizon {
            break;
        }
        events.push(SimEvent {
            time: r.arrival,
            kind: EventKind::Arrival,
            vnr_id: i,
        });
        events.push(SimEvent {
            time: r.departure(),
            kind: EventKind::Departure,
            vnr_id: i,
        });
    }
    events.sort_unstable();

    let mut live: BTreeMap<usize, (EmbeddingMap, Reservation)> = BTreeMap::new();
    let mut records = Vec::new();
    for ev in events {
        let vnr = &workload[ev.vnr_id];
        match ev.kind {
            EventKind::Departure => {
                if let Some((_, res)) = live.remove(&ev.vnr_id) {
                    sn.release(&res)?;
                }
            }
            EventKind::Arrival => {
                let out = s.algorithm.embed(&vnr.graph, sn, &s.params);
                let mut record = RequestRecord {
                    vnr_id: vnr.id,
                    arrival: vnr.arrival,
                    lifetime: vnr.lifetime,
                    accepted: false,
                    revenue: revenue(vnr),
                    cost: Amount::ZERO,
                    backtracks: out.backtracks,
                };
                if let Some(m) = out.map {
                    let res = sn.allocate(&vnr.graph, &m)?;
                    record.accepted = true;
                    record.cost = cost(vnr, &m)?;
                    live.insert(ev.vnr_id, (m, res));
                } else {
                    log::debug!("request {} rejected: {:?}", vnr.id, out.failure);
                }
                records.push(record);
            }
        }
        observe(&Checkpoint {
            event: ev,
            substrate: sn,
            alive: live.iter().map(|(&i, (m, _))| (&workload[i], m)).collect(),
        });
    }

    Ok(SimReport {
        algorithm: s.algorithm,
        horizon: s.horizon,
        samples: sample_times(s.horizon, s.sample_interval)
            .map(|t| sample_at(&records, t))
            .collect(),
        requests: records,
    })
}

/// `0, k, 2k, ...` up to the horizon, plus the horizon itself.
fn sample_times(horizon: u64, interval: u64) -> impl Iterator<Item = u64> {
    let aligned = horizon.is_multiple_of(interval);
    (0..=horizon)
        .step_by(interval as usize)
        .chain((!aligned).then_some(horizon))
}

/// State at time `t`: requests arriving at or before `t` are offered;
/// revenue and cost accrue once per whole time unit in `[0, t)`.
fn sample_at(records: &[RequestRecord], t: u64) -> Sample {
    let mut s = Sample {
        time: t,
        offered: 0,
        accepted: 0,
        revenue: Amount::ZERO,
        cost: Amount::ZERO,
    };
    for r in records.iter().take_while(|r| r.arrival <= t) {
        s.offered += 1;
        if r.accepted {
            s.accepted += 1;
            let units = (r.arrival + r.lifetime).min(t).saturating_sub(r.arrival);
            s.revenue += r.revenue * units;
            s.cost += r.cost * units;
        }
    }
    s
}

impl Sample {
    /// Accepted over offered; 1 when nothing was offered.
    pub fn acceptance_ratio(&self) -> f64 {
        if self.offered == 0 {
            1.0
        } else {
            self.accepted as f64 / self.offered as f64
        }
    }

    /// Accumulated revenue over elapsed time; 0 at time 0.
    pub fn average_revenue(&self) -> f64 {
        if self.time == 0 {
            0.0
        } else {
            self.revenue.to_f64() / self.time as f64
        }
    }

    pub fn average_cost(&self) -> f64 {
        if self.time == 0 {
            0.0
        } else {
            self.cost.to_f64() / self.time as f64
        }
    }

    /// Accumulated revenue over accumulated cost; 1 when both are zero.
    pub fn revenue_cost_ratio(&self) -> f64 {
        if self.cost == Amount::ZERO {
            if self.revenue == Amount::ZERO {
                1.0
            } else {
                f64::INFINITY
            }
        } else {
            self.revenue.to_f64() / self.cost.to_f64()
        }
    }
}

impl SimReport {
    /// The last sample at or before `t`.
    pub fn sample_at(&self, t: u64) -> Option<&Sample> {
        self.samples.iter().rev().find(|s| s.time <= t)
    }

    pub fn last(&self) -> &Sample {
        self.samples.last().expect("at least the t = 0 sample")
    }

    pub fn acceptance_ratio(&self, t: u64) -> f64 {
        self.sample_at(t).map_or(1.0, Sample::acceptance_ratio)
    }

    pub fn average_revenue(&self, t: u64) -> f64 {
        self.sample_at(t).map_or(0.0, Sample::average_revenue)
    }

    pub fn revenue_cost_ratio(&self, t: u64) -> f64 {
        self.sample_at(t).map_or(1.0, Sample::revenue_cost_ratio)
    }

    pub fn rows(&self) -> Vec<ReportRow> {
        self.samples.iter().map(ReportRow::from).collect()
    }
}
