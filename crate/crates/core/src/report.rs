//! CSV rows. Columns are the scenario keys in alphabetical order followed by
//! the metrics in field order. Delays are integer nanoseconds, ratios carry
//! six decimals and undefined delay statistics are empty cells.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::Path;

use crate::config::ScenarioPoint;
use crate::error::{Error, Result};
use crate::metrics::ClassSummary;
use crate::network::Klass;
use crate::sim::RunReport;

pub const SCENARIO_COLUMNS: &[&str] = &[
    "access_link",
    "be_frame_bytes",
    "be_intensity_bps",
    "be_ttl",
    "cycle_time_ns",
    "link_rate_bps",
    "pi",
    "point",
    "prop_delay_ns",
    "queue_bits",
    "replication",
    "reservation_fraction",
    "scheduler",
    "seed",
    "sim_limit_ns",
    "source_phase_offset_ns",
    "st_frame_bytes",
    "st_intensity_bps",
    "st_intensity_scope",
    "st_kind",
    "st_window_ns",
    "stream_duration_ns",
    "switches",
    "ttl",
    "warmup_ns",
];

pub const METRIC_COLUMNS: &[&str] = &[
    "klass",
    "count",
    "mean_delay_ns",
    "min_delay_ns",
    "max_delay_ns",
    "jitter_ns",
    "throughput_bps",
    "loss_ratio",
    "purge_drops",
    "overflow_drops",
    "carryover_count",
];

#[derive(Clone, Debug, PartialEq)]
pub struct MetricsRow {
    pub scenario: ScenarioPoint,
    pub klass: Klass,
    pub count: u64,
    pub mean_delay_ns: Option<f64>,
    pub min_delay_ns: Option<u64>,
    pub max_delay_ns: Option<u64>,
    pub jitter_ns: Option<f64>,
    pub throughput_bps: f64,
    pub loss_ratio: f64,
    pub purge_drops: u64,
    pub overflow_drops: u64,
    /// Port-level, so the same on both rows of a run.
    pub carryover_count: u64,
}

impl MetricsRow {
    pub fn new(scenario: ScenarioPoint, klass: Klass, s: &ClassSummary, carryover: u64) -> Self {
        Self {
            scenario,
            klass,
            count: s.count,
            mean_delay_ns: s.mean_delay_ns,
            min_delay_ns: s.min_delay_ns,
            max_delay_ns: s.max_delay_ns,
            jitter_ns: s.jitter_ns,
            throughput_bps: s.throughput_bps,
            loss_ratio: s.loss_ratio,
            purge_drops: s.purge_drops,
            overflow_drops: s.overflow_drops,
            carryover_count: carryover,
        }
    }

    pub fn from_report(r: &RunReport) -> [MetricsRow; 2] {
        [Klass::St, Klass::Be]
            .map(|k| MetricsRow::new(r.point.clone(), k, r.class(k), r.carryover))
    }

    fn scenario_cells(&self) -> Vec<String> {
        let p = &self.scenario;
        vec![
            p.access_link.to_string(),
            p.be_frame_bytes.to_string(),
            format!("{:.0}", p.be_intensity_bps),
            p.be_ttl.to_string(),
            p.cycle_time_ns.to_string(),
            p.link_rate_bps.to_string(),
            p.pi.to_string(),
            p.point.to_string(),
            p.prop_delay_ns.to_string(),
            p.queue_bits.to_string(),
            p.replication.to_string(),
            format!("{:.6}", p.reservation_fraction),
            p.scheduler.as_str().to_string(),
            p.seed.to_string(),
            p.sim_limit_ns.to_string(),
            p.source_phase_offset_ns.to_string(),
            p.st_frame_bytes.to_string(),
            format!("{:.0}", p.st_intensity_bps),
            p.st_intensity_scope.as_str().to_string(),
            p.st_kind.as_str().to_string(),
            p.st_window_ns.to_string(),
            p.stream_duration_ns.to_string(),
            p.switches.to_string(),
            p.ttl.to_string(),
            p.warmup_ns.to_string(),
        ]
    }

    fn metric_cells(&self) -> Vec<String> {
        fn opt<T: ToString>(v: Option<T>) -> String {
            v.map(|v| v.to_string()).unwrap_or_default()
        }
        vec![
            self.klass.as_str().to_string(),
            self.count.to_string(),
            opt(self.mean_delay_ns.map(|v| v.round() as u64)),
            opt(self.min_delay_ns),
            opt(self.max_delay_ns),
            opt(self.jitter_ns.map(|v| v.round() as u64)),
            format!("{:.0}", self.throughput_bps),
            format!("{:.6}", self.loss_ratio),
            self.purge_drops.to_string(),
            self.overflow_drops.to_string(),
            self.carryover_count.to_string(),
        ]
    }
}

/// Writes the header and one line per row.
pub fn write_csv<W: Write>(rows: &[MetricsRow], mut w: W) -> io::Result<()> {
    let header: Vec<&str> = SCENARIO_COLUMNS.iter().chain(METRIC_COLUMNS).copied().collect();
    writeln!(w, "{}", header.join(","))?;
    for r in rows {
        let mut cells = r.scenario_cells();
        cells.extend(r.metric_cells());
        writeln!(w, "{}", cells.join(","))?;
    }
    w.flush()
}

/// Writes `rows` to `path`, or to stdout when `path` is `None`.
pub fn emit_csv(rows: &[MetricsRow], path: Option<&Path>) -> Result<()> {
    if rows.is_empty() {
        return Err(Error::EmptyOutput);
    }
    match path {
        None => write_csv(rows, io::stdout().lock()).map_err(|source| Error::Io {
            path: "<stdout>".into(),
            source,
        }),
        Some(path) => {
            let io_err = |source| Error::Io {
                path: path.to_path_buf(),
                source,
            };
            let file = File::create(path).map_err(io_err)?;
            write_csv(rows, BufWriter::new(file)).map_err(io_err)
        }
    }
}
