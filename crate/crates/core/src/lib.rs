//! Discrete-event simulator for cyclic TSN egress schedulers (CQF,
//! Paternoster and three-queue CQF) on a unidirectional switch ring.
//!
//! A run is described by a [`ScenarioPoint`], usually expanded from a JSON
//! [`ScenarioConfig`]; [`run_sweep`] executes every point and returns CSV
//! rows. [`bounds`] holds the closed-form CQF bounds the simulator is
//! checked against.

pub mod bounds;
pub mod config;
pub mod engine;
pub mod error;
pub mod metrics;
pub mod network;
pub mod report;
pub mod scheduling;
pub mod sim;
pub mod sweep;
pub mod traffic;

pub use config::{parse_config, IntensityScope, Param, RangeSpec, ScenarioConfig, ScenarioPoint, StKind};
pub use engine::{Engine, Event, EventKind, EventQueue, Handler, Scheduler, SimTime};
pub use error::{ConfigError, Error, Result, SimError};
pub use metrics::{ClassStats, ClassSummary, DropSite, Metrics};
pub use network::{Frame, Klass};
pub use report::{emit_csv, write_csv, MetricsRow};
pub use scheduling::SchedulerKind;
pub use sim::{run_point, RunReport, Simulation};
pub use sweep::{run_reports, run_sweep};
