//! Scenario configuration: a single JSON document whose keys default to the
//! reference ring scenario. `pi`, `st_intensity_bps` and `prop_delay_ns`
//! accept a scalar, a list, or a `{from, to, step}` range; every combination
//! becomes one sweep point.

use serde::{Deserialize, Serialize};

use crate::error::ConfigError;
use crate::scheduling::SchedulerKind;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum StKind {
    Periodic,
    Sporadic,
}

impl StKind {
    pub fn as_str(self) -> &'static str {
        match self {
            StKind::Periodic => "periodic",
            StKind::Sporadic => "sporadic",
        }
    }
}

/// Whether `st_intensity_bps` is offered by each ST source or shared by all
/// of them.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum IntensityScope {
    PerSource,
    Aggregate,
}

impl IntensityScope {
    pub fn as_str(self) -> &'static str {
        match self {
            IntensityScope::PerSource => "per_source",
            IntensityScope::Aggregate => "aggregate",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RangeSpec<T> {
    pub from: T,
    pub to: T,
    #[serde(default = "no_step", skip_serializing_if = "Option::is_none")]
    pub step: Option<T>,
}

fn no_step<T>() -> Option<T> {
    None
}

/// A fixed value or a set of sweep values.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Param<T> {
    Value(T),
    List(Vec<T>),
    Range(RangeSpec<T>),
}

pub trait SweepValue: Copy + PartialOrd + std::fmt::Debug {
    const DEFAULT_STEP: Option<Self>;
    fn is_positive(self) -> bool;
    fn nth(from: Self, step: Self, n: usize) -> Self;
    /// `v` lies past `to` by more than rounding error.
    fn overshoots(v: Self, to: Self, step: Self) -> bool;
}

impl SweepValue for u32 {
    const DEFAULT_STEP: Option<Self> = Some(1);
    fn is_positive(self) -> bool {
        self > 0
    }
    fn nth(from: Self, step: Self, n: usize) -> Self {
        from + step * n as u32
    }
    fn overshoots(v: Self, to: Self, _step: Self) -> bool {
        v > to
    }
}

impl SweepValue for u64 {
    const DEFAULT_STEP: Option<Self> = Some(1);
    fn is_positive(self) -> bool {
        self > 0
    }
    fn nth(from: Self, step: Self, n: usize) -> Self {
        from + step * n as u64
    }
    fn overshoots(v: Self, to: Self, _step: Self) -> bool {
        v > to
    }
}

impl SweepValue for f64 {
    const DEFAULT_STEP: Option<Self> = None;
    fn is_positive(self) -> bool {
        self > 0.0
    }
    fn nth(from: Self, step: Self, n: usize) -> Self {
        from + step * n as f64
    }
    fn overshoots(v: Self, to: Self, step: Self) -> bool {
        v - to > step * 1e-9
    }
}

impl<T: SweepValue> Param<T> {
    pub fn values(&self, key: &'static str) -> Result<Vec<T>, ConfigError> {
        match self {
            Param::Value(v) => Ok(vec![*v]),
            Param::List(vs) if vs.is_empty() => Err(ConfigError::Invalid {
                key,
                reason: "empty list".into(),
            }),
            Param::List(vs) => Ok(vs.clone()),
            Param::Range(r) => {
                let step = r.step.or(T::DEFAULT_STEP).ok_or_else(|| ConfigError::Invalid {
                    key,
                    reason: "range needs an explicit `step`".into(),
                })?;
                if !step.is_positive() {
                    return Err(ConfigError::Invalid {
                        key,
                        reason: format!("step must be positive, got {step:?}"),
                    });
                }
                if r.from > r.to {
                    return Err(ConfigError::Invalid {
                        key,
                        reason: format!("empty range {:?}..={:?}", r.from, r.to),
                    });
                }
                let mut out = Vec::new();
                loop {
                    let v = T::nth(r.from, step, out.len());
                    if T::overshoots(v, r.to, step) {
                        break;
                    }
                    out.push(v);
                }
                Ok(out)
            }
        }
    }
}

/// Full parameterization of a sweep.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ScenarioConfig {
    pub scheduler: SchedulerKind,
    pub switches: usize,
    pub cycle_time_ns: u64,
    pub st_window_ns: u64,
    pub prop_delay_ns: Param<u64>,
    /// Switch-to-switch hops of every ST stream.
    pub ttl: u32,
    /// Switch-to-switch hops of every BE stream.
    pub be_ttl: u32,
    pub st_kind: StKind,
    pub pi: Param<u32>,
    pub st_intensity_bps: Param<f64>,
    pub st_intensity_scope: IntensityScope,
    /// Per BE source.
    pub be_intensity_bps: f64,
    pub st_frame_bytes: u32,
    pub be_frame_bytes: u32,
    pub queue_bits: u64,
    /// Paternoster reservation as a fraction of one epoch at line rate.
    pub reservation_fraction: f64,
    pub link_rate_bps: u64,
    /// Sources reach their gateway over a link with the same propagation
    /// delay as the ring links.
    pub access_link: bool,
    pub source_phase_offset_ns: u64,
    /// Defaults to the whole run.
    pub stream_duration_ns: Option<u64>,
    pub sim_limit_ns: u64,
    pub warmup_ns: u64,
    pub seed: u64,
    pub replications: u32,
    pub hurst: f64,
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        Self {
            scheduler: SchedulerKind::Cqf,
            switches: 6,
            cycle_time_ns: 50_000,
            st_window_ns: 25_000,
            prop_delay_ns: Param::Value(500),
            ttl: 3,
            be_ttl: 1,
            st_kind: StKind::Periodic,
            pi: Param::Range(RangeSpec {
                from: 1,
                to: 40,
                step: None,
            }),
            st_intensity_bps: Param::Range(RangeSpec {
                from: 1e8,
                to: 2e9,
                step: Some(1e8),
            }),
            st_intensity_scope: IntensityScope::PerSource,
            be_intensity_bps: 1e9,
            st_frame_bytes: 64,
            be_frame_bytes: 580,
            queue_bits: 512 * 1024,
            reservation_fraction: 1.0,
            link_rate_bps: 1_000_000_000,
            access_link: true,
            source_phase_offset_ns: 0,
            stream_duration_ns: None,
            sim_limit_ns: 1_000_000_000,
            warmup_ns: 10_000_000,
            seed: 1,
            replications: 1,
            hurst: 0.5,
        }
    }
}

/// One fully resolved run: a sweep point and a replication.
#[derive(Clone, Debug, PartialEq)]
pub struct ScenarioPoint {
    pub point: usize,
    pub replication: u32,
    pub seed: u64,
    pub run_seed: u64,
    pub scheduler: SchedulerKind,
    pub switches: usize,
    pub cycle_time_ns: u64,
    pub st_window_ns: u64,
    pub prop_delay_ns: u64,
    pub ttl: u32,
    pub be_ttl: u32,
    pub st_kind: StKind,
    pub pi: u32,
    pub st_intensity_bps: f64,
    pub st_intensity_scope: IntensityScope,
    pub be_intensity_bps: f64,
    pub st_frame_bytes: u32,
    pub be_frame_bytes: u32,
    pub queue_bits: u64,
    pub reservation_fraction: f64,
    pub link_rate_bps: u64,
    pub access_link: bool,
    pub source_phase_offset_ns: u64,
    pub stream_duration_ns: u64,
    pub sim_limit_ns: u64,
    pub warmup_ns: u64,
}

fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    x = (x ^ (x >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    x ^ (x >> 31)
}

/// Seed for one run; depends only on its own coordinates.
pub fn derive_seed(seed: u64, point: usize, replication: u32) -> u64 {
    splitmix64(splitmix64(splitmix64(seed) ^ point as u64) ^ replication as u64)
}

fn invalid(key: &'static str, reason: impl Into<String>) -> ConfigError {
    ConfigError::Invalid {
        key,
        reason: reason.into(),
    }
}

impl ScenarioConfig {
    /// Checks the config. Returns non-fatal warnings.
    pub fn validate(&self) -> Result<Vec<String>, ConfigError> {
        let mut warnings = Vec::new();
        if self.hurst != 0.5 {
            return Err(invalid(
                "hurst",
                format!("only 0.5 (Poisson) is supported, got {}", self.hurst),
            ));
        }
        for (key, v) in [
            ("cycle_time_ns", self.cycle_time_ns),
            ("st_window_ns", self.st_window_ns),
            ("sim_limit_ns", self.sim_limit_ns),
            ("queue_bits", self.queue_bits),
            ("link_rate_bps", self.link_rate_bps),
        ] {
            if v == 0 {
                return Err(invalid(key, "must be positive"));
            }
        }
        if self.st_window_ns > self.cycle_time_ns {
            return Err(invalid("st_window_ns", "must not exceed cycle_time_ns"));
        }
        if self.warmup_ns >= self.sim_limit_ns {
            return Err(invalid("warmup_ns", "must be shorter than sim_limit_ns"));
        }
        if self.stream_duration_ns == Some(0) {
            return Err(invalid("stream_duration_ns", "must be positive"));
        }
        if self.source_phase_offset_ns >= self.cycle_time_ns {
            return Err(invalid("source_phase_offset_ns", "must be below cycle_time_ns"));
        }
        if self.ttl == 0 || self.be_ttl == 0 {
            return Err(invalid("ttl", "streams need at least one hop"));
        }
        if self.st_frame_bytes == 0 || self.be_frame_bytes == 0 {
            return Err(invalid("st_frame_bytes", "frames need a positive size"));
        }
        if !(self.reservation_fraction > 0.0 && self.reservation_fraction <= 1.0) {
            return Err(invalid("reservation_fraction", "must be in (0, 1]"));
        }
        if self.be_intensity_bps.is_nan() || self.be_intensity_bps <= 0.0 {
            return Err(invalid("be_intensity_bps", "must be positive"));
        }
        if self.replications == 0 {
            return Err(invalid("replications", "must be at least 1"));
        }
        self.prop_delay_ns.values("prop_delay_ns")?;
        match self.st_kind {
            StKind::Periodic => {
                for pi in self.pi.values("pi")? {
                    if pi == 0 {
                        return Err(invalid("pi", "periodic sources need at least one frame per cycle"));
                    }
                    if pi > 40 {
                        warnings.push(format!("pi = {pi} is outside the studied range 1-40"));
                    }
                }
            }
            StKind::Sporadic => {
                for v in self.st_intensity_bps.values("st_intensity_bps")? {
                    if v.is_nan() || v <= 0.0 {
                        return Err(invalid("st_intensity_bps", "must be positive"));
                    }
                    if !(1e8..=2e9).contains(&v) {
                        warnings.push(format!(
                            "st_intensity_bps = {v} is outside the studied range 0.1-2.0 Gbps"
                        ));
                    }
                }
            }
        }
        Ok(warnings)
    }

    /// Every run of the sweep, point-major, replications innermost.
    pub fn points(&self) -> Vec<ScenarioPoint> {
        let props = self.prop_delay_ns.values("prop_delay_ns").unwrap_or_default();
        let load: Vec<(u32, f64)> = match self.st_kind {
            StKind::Periodic => self
                .pi
                .values("pi")
                .unwrap_or_default()
                .into_iter()
                .map(|pi| (pi, 0.0))
                .collect(),
            StKind::Sporadic => self
                .st_intensity_bps
                .values("st_intensity_bps")
                .unwrap_or_default()
                .into_iter()
                .map(|v| (0, v))
                .collect(),
        };
        let mut out = Vec::new();
        let mut point = 0;
        for &prop in &props {
            for &(pi, intensity) in &load {
                for replication in 0..self.replications {
                    out.push(ScenarioPoint {
                        point,
                        replication,
                        seed: self.seed,
                        run_seed: derive_seed(self.seed, point, replication),
                        scheduler: self.scheduler,
                        switches: self.switches,
                        cycle_time_ns: self.cycle_time_ns,
                        st_window_ns: self.st_window_ns,
                        prop_delay_ns: prop,
                        ttl: self.ttl,
                        be_ttl: self.be_ttl,
                        st_kind: self.st_kind,
                        pi,
                        st_intensity_bps: intensity,
                        st_intensity_scope: self.st_intensity_scope,
                        be_intensity_bps: self.be_intensity_bps,
                        st_frame_bytes: self.st_frame_bytes,
                        be_frame_bytes: self.be_frame_bytes,
                        queue_bits: self.queue_bits,
                        reservation_fraction: self.reservation_fraction,
                        link_rate_bps: self.link_rate_bps,
                        access_link: self.access_link,
                        source_phase_offset_ns: self.source_phase_offset_ns,
                        stream_duration_ns: self.stream_duration_ns.unwrap_or(self.sim_limit_ns),
                        sim_limit_ns: self.sim_limit_ns,
                        warmup_ns: self.warmup_ns,
                    });
                }
                point += 1;
            }
        }
        out
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }
}

/// Parses and validates a JSON config; missing keys take their defaults and
/// unknown keys are rejected. An empty document means all defaults.
pub fn parse_config(text: &str) -> Result<ScenarioConfig, ConfigError> {
    let cfg: ScenarioConfig = if text.trim().is_empty() {
        ScenarioConfig::default()
    } else {
        serde_json::from_str(text).map_err(|e| ConfigError::Parse {
            line: e.line(),
            column: e.column(),
            msg: e.to_string(),
        })?
    };
    for w in cfg.validate()? {
        log::warn!("{w}");
    }
    Ok(cfg)
}
