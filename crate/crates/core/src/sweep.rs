//! Sweep orchestration: one isolated run per (point, replication).

use rayon::prelude::*;

use crate::config::{ScenarioConfig, ScenarioPoint};
use crate::error::{Error, Result};
use crate::report::MetricsRow;
use crate::sim::{run_point, RunReport};

fn run_all(points: &[ScenarioPoint]) -> Result<Vec<RunReport>> {
    // collect() on an indexed parallel iterator keeps input order
    points
        .par_iter()
        .map(|p| {
            log::debug!("running point {} replication {}", p.point, p.replication);
            run_point(p).map_err(|source| Error::Run {
                point: p.point,
                replication: p.replication,
                source,
            })
        })
        .collect()
}

/// Runs every point of `cfg` on up to `parallel` workers (all cores when
/// `None`). Reports come back in point order whatever the worker count.
pub fn run_reports(cfg: &ScenarioConfig, parallel: Option<usize>) -> Result<Vec<RunReport>> {
    cfg.validate()?;
    let points = cfg.points();
    match parallel {
        None => run_all(&points),
        Some(k) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(k.max(1))
                .build()
                .expect("thread pool");
            pool.install(|| run_all(&points))
        }
    }
}

/// Runs the sweep and flattens it into CSV rows (ST then BE per run).
pub fn run_sweep(cfg: &ScenarioConfig, parallel: Option<usize>) -> Result<Vec<MetricsRow>> {
    Ok(run_reports(cfg, parallel)?
        .iter()
        .flat_map(MetricsRow::from_report)
        .collect())
}
