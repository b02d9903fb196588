//! Frames, links, switches and the unidirectional ring.
//!
//! Switch `i` has a single egress port feeding switch `(i + 1) % N`. A frame
//! carries the number of switch-to-switch hops it still has to make; the
//! switch where that count is zero on arrival delivers it to its sink.
//! Forwarding is store-and-forward with zero processing delay.

use serde::{Deserialize, Serialize};

use crate::config::ScenarioPoint;
use crate::engine::SimTime;
use crate::error::SimError;
use crate::scheduling::{
    Admission, CqfPort, Cqf3qPort, EgressPort, PaternosterPort, SchedulerKind,
};
use crate::traffic;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Klass {
    #[serde(rename = "ST")]
    St,
    #[serde(rename = "BE")]
    Be,
}

impl Klass {
    pub fn as_str(self) -> &'static str {
        match self {
            Klass::St => "ST",
            Klass::Be => "BE",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Frame {
    pub id: u64,
    pub stream_id: u32,
    pub klass: Klass,
    pub size_bytes: u32,
    pub created_at: SimTime,
    pub src_switch: u32,
    pub remaining_hops: u32,
    /// Cycle in which the last upstream port started sending this frame.
    pub sender_cycle_index: Option<u64>,
}

impl Frame {
    pub fn new(
        id: u64,
        stream_id: u32,
        klass: Klass,
        size_bytes: u32,
        created_at: SimTime,
        src_switch: u32,
        remaining_hops: u32,
    ) -> Self {
        assert!(size_bytes > 0);
        Self {
            id,
            stream_id,
            klass,
            size_bytes,
            created_at,
            src_switch,
            remaining_hops,
            sender_cycle_index: None,
        }
    }

    pub fn bits(&self) -> u64 {
        self.size_bytes as u64 * 8
    }
}

/// Serialization time of `size_bytes` at `rate_bps`, rounded up to whole ns.
/// Preamble and inter-frame gap are not modelled.
pub fn tx_time(size_bytes: u32, rate_bps: u64) -> SimTime {
    let bits = size_bytes as u128 * 8;
    SimTime((bits * 1_000_000_000).div_ceil(rate_bps as u128) as u64)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Link {
    pub rate_bps: u64,
    pub prop_delay: SimTime,
    pub src_port: usize,
    pub dst_switch: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Transmission {
    pub tx_complete: SimTime,
    pub arrival: SimTime,
}

/// Timing of putting `f` on `l` at `start`.
pub fn transmit(l: &Link, f: &Frame, start: SimTime) -> Transmission {
    let tx_complete = start + tx_time(f.size_bytes, l.rate_bps);
    Transmission {
        tx_complete,
        arrival: tx_complete + l.prop_delay,
    }
}

#[derive(Clone, Debug, Default)]
pub struct Sink {
    pub delivered: [u64; 2],
    pub bits: [u64; 2],
}

impl Sink {
    fn accept(&mut self, f: &Frame) {
        let i = f.klass as usize;
        self.delivered[i] += 1;
        self.bits[i] += f.bits();
    }
}

#[derive(Clone, Debug)]
pub struct Switch {
    pub index: usize,
    pub egress: EgressPort,
    pub sink: Sink,
    pub attached_sources: Vec<usize>,
}

#[derive(Debug)]
pub enum Ingest {
    Delivered(Frame),
    Enqueued,
    Dropped(Frame),
}

impl Switch {
    /// Delivers `f` locally when it has no hops left, otherwise consumes one
    /// hop and queues it at the egress port.
    pub fn ingest(&mut self, mut f: Frame, now: SimTime) -> Ingest {
        if f.remaining_hops == 0 {
            self.sink.accept(&f);
            return Ingest::Delivered(f);
        }
        f.remaining_hops -= 1;
        match self.egress.enqueue(f, now) {
            Admission::Queued => Ingest::Enqueued,
            Admission::Dropped(f) => Ingest::Dropped(f),
        }
    }
}

#[derive(Clone, Debug)]
pub struct RingTopology {
    pub switches: Vec<Switch>,
    pub links: Vec<Link>,
}

impl RingTopology {
    pub fn len(&self) -> usize {
        self.switches.len()
    }

    pub fn is_empty(&self) -> bool {
        self.switches.is_empty()
    }

    pub fn generator_count(&self) -> usize {
        self.switches.iter().map(|s| s.attached_sources.len()).sum()
    }
}

/// Source ids hosted by switch `i` in a ring of `n`: ST stream `i`, BE stream
/// `n + i`.
pub fn sources_at(i: usize, n: usize) -> [usize; 2] {
    [i, n + i]
}

pub fn build_ring(p: &ScenarioPoint) -> Result<RingTopology, SimError> {
    let n = p.switches;
    if n < 2 {
        return Err(SimError::RingTooSmall(n));
    }
    let cycle = SimTime(p.cycle_time_ns);
    let window = SimTime(p.st_window_ns);
    let phases = traffic::epoch_phases(p.run_seed, n, cycle);
    let reservation_bits =
        (p.reservation_fraction * cycle.as_secs_f64() * p.link_rate_bps as f64).floor() as u64;

    let switches = (0..n)
        .map(|i| {
            let egress = match p.scheduler {
                SchedulerKind::Cqf => {
                    EgressPort::Cqf(CqfPort::new(cycle, window, p.queue_bits, p.link_rate_bps))
                }
                SchedulerKind::Cqf3q => EgressPort::Cqf3q(Cqf3qPort::new(
                    cycle,
                    window,
                    p.queue_bits,
                    p.link_rate_bps,
                )),
                SchedulerKind::Paternoster => EgressPort::Paternoster(PaternosterPort::new(
                    cycle,
                    phases[i],
                    reservation_bits,
                    p.queue_bits,
                    p.link_rate_bps,
                )),
            };
            Switch {
                index: i,
                egress,
                sink: Sink::default(),
                attached_sources: sources_at(i, n).to_vec(),
            }
        })
        .collect();
    let links = (0..n)
        .map(|i| Link {
            rate_bps: p.link_rate_bps,
            prop_delay: SimTime(p.prop_delay_ns),
            src_port: i,
            dst_switch: (i + 1) % n,
        })
        .collect();
    Ok(RingTopology { switches, links })
}
