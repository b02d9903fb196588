//! Egress-port schedulers.
//!
//! Every switch-to-switch port owns exactly one scheduler. All variants are
//! non-preemptive: [`EgressPort::select`] is only called while the port is
//! idle, and the frame it returns occupies the link until its `TxComplete`.

mod cqf;
mod cqf3q;
mod paternoster;

use std::collections::VecDeque;

pub use cqf::{CqfEnqueue, CqfPort, Gate};
pub use cqf3q::{Cqf3qEnqueue, Cqf3qPort};
pub use paternoster::{PatEnqueue, PaternosterPort, Role, Serving};

use crate::engine::SimTime;
use crate::network::{tx_time, Frame};

/// Which scheduler every egress port in a run uses.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SchedulerKind {
    Cqf,
    Paternoster,
    Cqf3q,
}

impl SchedulerKind {
    pub fn as_str(self) -> &'static str {
        match self {
            SchedulerKind::Cqf => "cqf",
            SchedulerKind::Paternoster => "paternoster",
            SchedulerKind::Cqf3q => "cqf3q",
        }
    }
}

/// FIFO with a capacity expressed in bits.
#[derive(Clone, Debug)]
pub struct BoundedQueue {
    frames: VecDeque<Frame>,
    capacity_bits: u64,
    occupancy_bits: u64,
}

impl BoundedQueue {
    pub fn new(capacity_bits: u64) -> Self {
        Self {
            frames: VecDeque::new(),
            capacity_bits,
            occupancy_bits: 0,
        }
    }

    pub fn has_room_for(&self, f: &Frame) -> bool {
        self.occupancy_bits + f.bits() <= self.capacity_bits
    }

    /// Appends `f`, or hands it back if it does not fit.
    pub fn try_push(&mut self, f: Frame) -> Result<(), Frame> {
        if !self.has_room_for(&f) {
            return Err(f);
        }
        self.occupancy_bits += f.bits();
        self.frames.push_back(f);
        Ok(())
    }

    pub fn pop(&mut self) -> Option<Frame> {
        let f = self.frames.pop_front()?;
        self.occupancy_bits -= f.bits();
        Some(f)
    }

    pub fn front(&self) -> Option<&Frame> {
        self.frames.front()
    }

    /// Empties the queue, returning its contents in FIFO order.
    pub fn drain(&mut self) -> Vec<Frame> {
        self.occupancy_bits = 0;
        self.frames.drain(..).collect()
    }

    pub fn len(&self) -> usize {
        self.frames.len()
    }

    pub fn is_empty(&self) -> bool {
        self.frames.is_empty()
    }

    pub fn occupancy_bits(&self) -> u64 {
        self.occupancy_bits
    }

    pub fn capacity_bits(&self) -> u64 {
        self.capacity_bits
    }

    pub fn iter(&self) -> impl Iterator<Item = &Frame> {
        self.frames.iter()
    }
}

/// Pops the head of `q` if it finishes transmitting by `deadline`.
pub(crate) fn pop_if_fits(
    q: &mut BoundedQueue,
    now: SimTime,
    deadline: SimTime,
    rate_bps: u64,
) -> Option<Frame> {
    let head = q.front()?;
    if now + tx_time(head.size_bytes, rate_bps) <= deadline {
        q.pop()
    } else {
        None
    }
}

/// Outcome of handing a frame to a port, collapsed across scheduler kinds.
#[derive(Debug)]
pub enum Admission {
    Queued,
    Dropped(Frame),
}

#[derive(Clone, Debug)]
pub enum EgressPort {
    Cqf(CqfPort),
    Paternoster(PaternosterPort),
    Cqf3q(Cqf3qPort),
}

impl EgressPort {
    pub fn kind(&self) -> SchedulerKind {
        match self {
            EgressPort::Cqf(_) => SchedulerKind::Cqf,
            EgressPort::Paternoster(_) => SchedulerKind::Paternoster,
            EgressPort::Cqf3q(_) => SchedulerKind::Cqf3q,
        }
    }

    pub fn enqueue(&mut self, f: Frame, now: SimTime) -> Admission {
        match self {
            EgressPort::Cqf(p) => match p.enqueue(f, now) {
                CqfEnqueue::Accepted => Admission::Queued,
                CqfEnqueue::Dropped(f) => Admission::Dropped(f),
            },
            EgressPort::Paternoster(p) => match p.enqueue(f, now) {
                PatEnqueue::Dropped(f) => Admission::Dropped(f),
                _ => Admission::Queued,
            },
            EgressPort::Cqf3q(p) => match p.enqueue(f, now) {
                Cqf3qEnqueue::Dropped(f) => Admission::Dropped(f),
                _ => Admission::Queued,
            },
        }
    }

    pub fn select(&mut self, now: SimTime) -> Option<Frame> {
        match self {
            EgressPort::Cqf(p) => p.select(now),
            EgressPort::Paternoster(p) => p.select(now),
            EgressPort::Cqf3q(p) => p.select(now),
        }
    }

    /// Cycle index stamped on outgoing frames (synchronized CQF cycle grid).
    pub fn cycle_index(&self) -> Option<u64> {
        match self {
            EgressPort::Cqf(p) => Some(p.cycle_index()),
            EgressPort::Cqf3q(p) => Some(p.cycle_index()),
            EgressPort::Paternoster(_) => None,
        }
    }

    /// Frames currently held in any queue of this port.
    pub fn queued_frames(&self) -> usize {
        match self {
            EgressPort::Cqf(p) => p.queued_frames(),
            EgressPort::Paternoster(p) => p.queued_frames(),
            EgressPort::Cqf3q(p) => p.queued_frames(),
        }
    }

    pub fn carryover(&self) -> u64 {
        match self {
            EgressPort::Cqf(p) => p.carryover(),
            EgressPort::Cqf3q(p) => p.carryover(),
            EgressPort::Paternoster(_) => 0,
        }
    }
}
