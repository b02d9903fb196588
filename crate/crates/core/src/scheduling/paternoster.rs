//! Paternoster: four rotating ST queues with a per-epoch bit reservation.
//!
//! Queue storage is fixed; roles rotate. With `base` as the physical index of
//! the prior queue, current/next/last are `base+1`, `base+2`, `base+3`
//! (mod 4). At every epoch boundary `base` advances by one, so the old prior
//! storage becomes the new last after its leftovers are purged.
//!
//! Epoch boundaries are not synchronized across switches; each port carries
//! its own phase. There is no gate: prior, then current, then BE, strict
//! priority, non-preemptive.

use super::BoundedQueue;
use crate::engine::SimTime;
use crate::network::{Frame, Klass};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Role {
    Prior,
    Current,
    Next,
    Last,
}

impl Role {
    pub const ALL: [Role; 4] = [Role::Prior, Role::Current, Role::Next, Role::Last];

    fn offset(self) -> usize {
        match self {
            Role::Prior => 0,
            Role::Current => 1,
            Role::Next => 2,
            Role::Last => 3,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Serving {
    Prior,
    Current,
}

#[derive(Debug)]
pub enum PatEnqueue {
    ToCurrent,
    ToNext,
    ToLast,
    /// BE frames land here; they are not subject to the reservation.
    ToBestEffort,
    Dropped(Frame),
}

#[derive(Clone, Debug)]
pub struct PaternosterPort {
    queues: [BoundedQueue; 4],
    admitted_bits: [u64; 4],
    base: usize,
    reservation_bits: u64,
    epoch_duration: SimTime,
    epoch_phase: SimTime,
    be_queue: BoundedQueue,
    serving: Serving,
    rate_bps: u64,
}

impl PaternosterPort {
    pub fn new(
        epoch_duration: SimTime,
        epoch_phase: SimTime,
        reservation_bits: u64,
        queue_bits: u64,
        rate_bps: u64,
    ) -> Self {
        assert!(epoch_phase < epoch_duration);
        Self {
            queues: std::array::from_fn(|_| BoundedQueue::new(queue_bits)),
            admitted_bits: [0; 4],
            base: 0,
            reservation_bits,
            epoch_duration,
            epoch_phase,
            be_queue: BoundedQueue::new(queue_bits),
            serving: Serving::Prior,
            rate_bps,
        }
    }

    /// Physical queue currently holding `role`.
    pub fn slot(&self, role: Role) -> usize {
        (self.base + role.offset()) % 4
    }

    pub fn queue(&self, role: Role) -> &BoundedQueue {
        &self.queues[self.slot(role)]
    }

    pub fn admitted_bits(&self, role: Role) -> u64 {
        self.admitted_bits[self.slot(role)]
    }

    pub fn reservation_bits(&self) -> u64 {
        self.reservation_bits
    }

    pub fn epoch_duration(&self) -> SimTime {
        self.epoch_duration
    }

    pub fn epoch_phase(&self) -> SimTime {
        self.epoch_phase
    }

    pub fn be_queue(&self) -> &BoundedQueue {
        &self.be_queue
    }

    pub fn serving(&self) -> Serving {
        self.serving
    }

    pub fn rate_bps(&self) -> u64 {
        self.rate_bps
    }

    pub fn queued_frames(&self) -> usize {
        self.queues.iter().map(BoundedQueue::len).sum::<usize>() + self.be_queue.len()
    }

    /// First epoch boundary at or after `t`.
    pub fn next_rollover_at_or_after(&self, t: SimTime) -> SimTime {
        let e = self.epoch_duration.0;
        let p = self.epoch_phase.0;
        if t.0 <= p {
            return SimTime(p);
        }
        let k = (t.0 - p).div_ceil(e);
        SimTime(p + k * e)
    }

    pub fn enqueue(&mut self, f: Frame, _now: SimTime) -> PatEnqueue {
        if f.klass == Klass::Be {
            return match self.be_queue.try_push(f) {
                Ok(()) => PatEnqueue::ToBestEffort,
                Err(f) => PatEnqueue::Dropped(f),
            };
        }
        let bits = f.bits();
        for role in [Role::Current, Role::Next, Role::Last] {
            let slot = self.slot(role);
            if self.admitted_bits[slot] + bits <= self.reservation_bits
                && self.queues[slot].has_room_for(&f)
            {
                self.admitted_bits[slot] += bits;
                self.queues[slot]
                    .try_push(f)
                    .expect("capacity checked above");
                return match role {
                    Role::Current => PatEnqueue::ToCurrent,
                    Role::Next => PatEnqueue::ToNext,
                    _ => PatEnqueue::ToLast,
                };
            }
        }
        PatEnqueue::Dropped(f)
    }

    pub fn select(&mut self, _now: SimTime) -> Option<Frame> {
        let prior = self.slot(Role::Prior);
        if let Some(f) = self.queues[prior].pop() {
            self.serving = Serving::Prior;
            return Some(f);
        }
        self.serving = Serving::Current;
        let current = self.slot(Role::Current);
        if let Some(f) = self.queues[current].pop() {
            return Some(f);
        }
        self.be_queue.pop()
    }

    /// Epoch boundary. Rotates roles and returns whatever was still waiting
    /// in the old prior queue; those frames are lost.
    pub fn rollover(&mut self, now: SimTime) -> Vec<Frame> {
        debug_assert_eq!(
            now.0 % self.epoch_duration.0,
            self.epoch_phase.0,
            "rollover off this port's epoch grid"
        );
        let old_prior = self.slot(Role::Prior);
        let purged = self.queues[old_prior].drain();
        self.base = (self.base + 1) % 4;
        debug_assert_eq!(self.slot(Role::Last), old_prior);
        self.admitted_bits[old_prior] = 0;
        self.serving = Serving::Prior;
        purged
    }
}
