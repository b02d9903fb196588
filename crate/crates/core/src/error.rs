use std::path::PathBuf;

use thiserror::Error;

use crate::engine::{EventKind, SimTime};

/// Logic errors that abort a single simulation run.
#[derive(Debug, Error)]
pub enum SimError {
    #[error("event {kind:?} scheduled at {at}, before the current clock {now}")]
    ScheduledInPast {
        now: SimTime,
        at: SimTime,
        kind: EventKind,
    },
    #[error("frame {frame_id} delivered at {now} but created at {created_at}")]
    NegativeDelay {
        frame_id: u64,
        created_at: SimTime,
        now: SimTime,
    },
    #[error("ring needs at least 2 switches, got {0}")]
    RingTooSmall(usize),
}

/// Configuration errors. Parse errors carry serde's line/column position.
#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("config parse error at line {line}, column {column}: {msg}")]
    Parse {
        line: usize,
        column: usize,
        msg: String,
    },
    #[error("invalid value for `{key}`: {reason}")]
    Invalid { key: &'static str, reason: String },
}

#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("sweep point {point} (replication {replication}) failed: {source}")]
    Run {
        point: usize,
        replication: u32,
        #[source]
        source: SimError,
    },
    #[error(transparent)]
    Sim(#[from] SimError),
    #[error("no rows to write")]
    EmptyOutput,
    #[error("cannot write {}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
