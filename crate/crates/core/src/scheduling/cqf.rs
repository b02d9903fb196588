//! Two-queue cyclic queuing and forwarding behind a time-aware gate.
//!
//! Cycles are network-synchronized: cycle `k` spans `[k*CT, (k+1)*CT)`. The
//! ST gate is open for the first `st_window` of each cycle, BE for the rest.
//! ST frames received during cycle `k` go to `st_queues[k % 2]` and are sent
//! during cycle `k + 1`, when that queue takes the dequeue role.

use super::{pop_if_fits, BoundedQueue};
use crate::engine::SimTime;
use crate::network::{Frame, Klass};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Gate {
    StOpen,
    BeOpen,
}

#[derive(Debug)]
pub enum CqfEnqueue {
    Accepted,
    Dropped(Frame),
}

#[derive(Clone, Debug)]
pub struct CqfPort {
    st_queues: [BoundedQueue; 2],
    be_queue: BoundedQueue,
    cycle_index: u64,
    cycle_time: SimTime,
    st_window: SimTime,
    gate: Gate,
    rate_bps: u64,
    carryover: u64,
}

impl CqfPort {
    pub fn new(cycle_time: SimTime, st_window: SimTime, queue_bits: u64, rate_bps: u64) -> Self {
        assert!(st_window.0 > 0 && st_window <= cycle_time);
        Self {
            st_queues: [BoundedQueue::new(queue_bits), BoundedQueue::new(queue_bits)],
            be_queue: BoundedQueue::new(queue_bits),
            cycle_index: 0,
            cycle_time,
            st_window,
            gate: Gate::StOpen,
            rate_bps,
            carryover: 0,
        }
    }

    pub fn cycle_index(&self) -> u64 {
        self.cycle_index
    }

    pub fn gate(&self) -> Gate {
        self.gate
    }

    pub fn enqueue_slot(&self) -> usize {
        (self.cycle_index % 2) as usize
    }

    pub fn dequeue_slot(&self) -> usize {
        ((self.cycle_index + 1) % 2) as usize
    }

    pub fn st_queue(&self, slot: usize) -> &BoundedQueue {
        &self.st_queues[slot]
    }

    pub fn be_queue(&self) -> &BoundedQueue {
        &self.be_queue
    }

    /// Frames found in the dequeue queue at rollover, summed over the run.
    pub fn carryover(&self) -> u64 {
        self.carryover
    }

    pub fn queued_frames(&self) -> usize {
        self.st_queues[0].len() + self.st_queues[1].len() + self.be_queue.len()
    }

    pub fn enqueue(&mut self, f: Frame, _now: SimTime) -> CqfEnqueue {
        let q = match f.klass {
            Klass::St => &mut self.st_queues[(self.cycle_index % 2) as usize],
            Klass::Be => &mut self.be_queue,
        };
        match q.try_push(f) {
            Ok(()) => CqfEnqueue::Accepted,
            Err(f) => CqfEnqueue::Dropped(f),
        }
    }

    /// End of the window the gate is currently in.
    fn window_end(&self, now: SimTime) -> SimTime {
        let cycle_start = SimTime(now.0 - now.0 % self.cycle_time.0);
        match self.gate {
            Gate::StOpen => cycle_start + self.st_window,
            Gate::BeOpen => cycle_start + self.cycle_time,
        }
    }

    /// Next frame to put on the wire, honouring the guard band.
    pub fn select(&mut self, now: SimTime) -> Option<Frame> {
        let end = self.window_end(now);
        match self.gate {
            Gate::StOpen => {
                let slot = self.dequeue_slot();
                pop_if_fits(&mut self.st_queues[slot], now, end, self.rate_bps)
            }
            Gate::BeOpen => pop_if_fits(&mut self.be_queue, now, end, self.rate_bps),
        }
    }

    /// Cycle boundary: swap enqueue/dequeue roles and reopen the ST gate.
    /// Frames left in the finished dequeue queue stay put and go out two
    /// cycles later.
    pub fn rollover(&mut self, now: SimTime) {
        debug_assert_eq!(now.0 % self.cycle_time.0, 0, "rollover off the cycle grid");
        let leftover = self.st_queues[self.dequeue_slot()].len() as u64;
        self.carryover += leftover;
        self.cycle_index = now.0 / self.cycle_time.0;
        self.gate = Gate::StOpen;
    }

    /// Closes the ST window and opens BE.
    pub fn gate_change(&mut self, now: SimTime) {
        debug_assert_eq!(now.0 % self.cycle_time.0, self.st_window.0);
        self.gate = Gate::BeOpen;
    }
}
