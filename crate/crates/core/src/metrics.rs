//! Online delay, jitter, throughput and loss accounting.
//!
//! Delay statistics use Welford's one-pass update. Jitter is the population
//! standard deviation of per-frame end-to-end delay. Deliveries before the
//! warmup horizon are counted for conservation but excluded from delay and
//! throughput; sends and drops are counted over the whole run.

use crate::engine::SimTime;
use crate::network::{Frame, Klass};
use crate::traffic::DeliveryRecord;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum DropSite {
    /// Queue capacity or Paternoster reservation exhausted at enqueue.
    Overflow,
    /// Stale frames removed from the Paternoster prior queue at rollover.
    Purge,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ClassStats {
    pub count: u64,
    pub mean_delay: f64,
    pub m2: f64,
    pub min_delay: Option<SimTime>,
    pub max_delay: Option<SimTime>,
    pub bits_delivered: u64,
    pub frames_sent: u64,
    pub frames_dropped: u64,
    pub overflow_drops: u64,
    pub purge_drops: u64,
    /// All deliveries, including those during warmup.
    pub frames_delivered: u64,
    pub warmup_end: SimTime,
}

impl ClassStats {
    pub fn new(warmup_end: SimTime) -> Self {
        Self {
            count: 0,
            mean_delay: 0.0,
            m2: 0.0,
            min_delay: None,
            max_delay: None,
            bits_delivered: 0,
            frames_sent: 0,
            frames_dropped: 0,
            overflow_drops: 0,
            purge_drops: 0,
            frames_delivered: 0,
            warmup_end,
        }
    }

    pub fn record_sent(&mut self) {
        self.frames_sent += 1;
    }

    pub fn record_delivery(&mut self, d: &DeliveryRecord, now: SimTime) {
        self.frames_delivered += 1;
        if now < self.warmup_end {
            return;
        }
        self.count += 1;
        let x = d.delay.0 as f64;
        let delta = x - self.mean_delay;
        self.mean_delay += delta / self.count as f64;
        self.m2 += delta * (x - self.mean_delay);
        self.min_delay = Some(self.min_delay.map_or(d.delay, |m| m.min(d.delay)));
        self.max_delay = Some(self.max_delay.map_or(d.delay, |m| m.max(d.delay)));
        self.bits_delivered += d.bits;
    }

    pub fn record_drop(&mut self, _f: &Frame, site: DropSite) {
        self.frames_dropped += 1;
        match site {
            DropSite::Overflow => self.overflow_drops += 1,
            DropSite::Purge => self.purge_drops += 1,
        }
    }

    /// Population standard deviation of the recorded delays.
    pub fn jitter(&self) -> Option<f64> {
        (self.count > 0).then(|| (self.m2 / self.count as f64).max(0.0).sqrt())
    }

    pub fn loss_ratio(&self) -> f64 {
        if self.frames_sent == 0 {
            0.0
        } else {
            self.frames_dropped as f64 / self.frames_sent as f64
        }
    }

    pub fn finalize(&self, measured_interval: SimTime) -> ClassSummary {
        assert!(measured_interval.0 > 0, "empty measurement interval");
        let has = self.count > 0;
        ClassSummary {
            count: self.count,
            mean_delay_ns: has.then_some(self.mean_delay),
            min_delay_ns: self.min_delay.map(SimTime::as_ns),
            max_delay_ns: self.max_delay.map(SimTime::as_ns),
            jitter_ns: self.jitter(),
            throughput_bps: self.bits_delivered as f64 / measured_interval.as_secs_f64(),
            loss_ratio: self.loss_ratio(),
            frames_sent: self.frames_sent,
            frames_dropped: self.frames_dropped,
            purge_drops: self.purge_drops,
            overflow_drops: self.overflow_drops,
        }
    }
}

/// Finalized statistics for one class (or stream). Delay fields are `None`
/// when nothing was delivered after warmup.
#[derive(Clone, Debug, PartialEq)]
pub struct ClassSummary {
    pub count: u64,
    pub mean_delay_ns: Option<f64>,
    pub min_delay_ns: Option<u64>,
    pub max_delay_ns: Option<u64>,
    pub jitter_ns: Option<f64>,
    pub throughput_bps: f64,
    pub loss_ratio: f64,
    pub frames_sent: u64,
    pub frames_dropped: u64,
    pub purge_drops: u64,
    pub overflow_drops: u64,
}

/// Per-class and per-stream collectors for one run.
#[derive(Clone, Debug)]
pub struct Metrics {
    pub classes: [ClassStats; 2],
    pub streams: Vec<ClassStats>,
}

impl Metrics {
    pub fn new(streams: usize, warmup_end: SimTime) -> Self {
        Self {
            classes: [ClassStats::new(warmup_end), ClassStats::new(warmup_end)],
            streams: vec![ClassStats::new(warmup_end); streams],
        }
    }

    pub fn class(&self, k: Klass) -> &ClassStats {
        &self.classes[k as usize]
    }

    pub fn record_sent(&mut self, f: &Frame) {
        self.classes[f.klass as usize].record_sent();
        self.streams[f.stream_id as usize].record_sent();
    }

    pub fn record_delivery(&mut self, d: &DeliveryRecord, now: SimTime) {
        self.classes[d.klass as usize].record_delivery(d, now);
        self.streams[d.stream_id as usize].record_delivery(d, now);
    }

    pub fn record_drop(&mut self, f: &Frame, site: DropSite) {
        self.classes[f.klass as usize].record_drop(f, site);
        self.streams[f.stream_id as usize].record_drop(f, site);
    }
}
