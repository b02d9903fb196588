//! Experimental three-queue CQF.
//!
//! Adds a waiting queue for ST frames that arrive in a different cycle from
//! the one they were sent in. Within the ST window the dequeue queue has
//! strict priority over the waiting queue; both obey the guard band. Wrong
//! cycle detection relies on the sender's cycle index carried in the frame.
//! Dequeue timing for the waiting queue beyond that is not modelled.

use super::{pop_if_fits, BoundedQueue, Gate};
use crate::engine::SimTime;
use crate::network::{Frame, Klass};

#[derive(Debug)]
pub enum Cqf3qEnqueue {
    ToEnq,
    ToWaiting,
    /// BE frame accepted into the BE queue.
    ToBestEffort,
    Dropped(Frame),
}

#[derive(Clone, Debug)]
pub struct Cqf3qPort {
    st_queues: [BoundedQueue; 2],
    waiting: BoundedQueue,
    be_queue: BoundedQueue,
    cycle_index: u64,
    cycle_time: SimTime,
    st_window: SimTime,
    gate: Gate,
    rate_bps: u64,
    carryover: u64,
}

impl Cqf3qPort {
    pub fn new(cycle_time: SimTime, st_window: SimTime, queue_bits: u64, rate_bps: u64) -> Self {
        assert!(st_window.0 > 0 && st_window <= cycle_time);
        Self {
            st_queues: [BoundedQueue::new(queue_bits), BoundedQueue::new(queue_bits)],
            waiting: BoundedQueue::new(queue_bits),
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

    pub fn enq(&self) -> &BoundedQueue {
        &self.st_queues[(self.cycle_index % 2) as usize]
    }

    pub fn deq(&self) -> &BoundedQueue {
        &self.st_queues[((self.cycle_index + 1) % 2) as usize]
    }

    pub fn waiting(&self) -> &BoundedQueue {
        &self.waiting
    }

    pub fn be_queue(&self) -> &BoundedQueue {
        &self.be_queue
    }

    pub fn carryover(&self) -> u64 {
        self.carryover
    }

    pub fn queued_frames(&self) -> usize {
        self.st_queues[0].len() + self.st_queues[1].len() + self.waiting.len() + self.be_queue.len()
    }

    /// ST frames without a sender cycle are fresh from a local source and are
    /// stamped with the gateway's cycle here.
    pub fn enqueue(&mut self, mut f: Frame, _now: SimTime) -> Cqf3qEnqueue {
        if f.klass == Klass::Be {
            return match self.be_queue.try_push(f) {
                Ok(()) => Cqf3qEnqueue::ToBestEffort,
                Err(f) => Cqf3qEnqueue::Dropped(f),
            };
        }
        let sender_cycle = *f.sender_cycle_index.get_or_insert(self.cycle_index);
        let (q, verdict) = if sender_cycle == self.cycle_index {
            (
                &mut self.st_queues[(self.cycle_index % 2) as usize],
                Cqf3qEnqueue::ToEnq,
            )
        } else {
            (&mut self.waiting, Cqf3qEnqueue::ToWaiting)
        };
        match q.try_push(f) {
            Ok(()) => verdict,
            Err(f) => Cqf3qEnqueue::Dropped(f),
        }
    }

    pub fn select(&mut self, now: SimTime) -> Option<Frame> {
        let cycle_start = SimTime(now.0 - now.0 % self.cycle_time.0);
        match self.gate {
            Gate::StOpen => {
                let end = cycle_start + self.st_window;
                let deq = ((self.cycle_index + 1) % 2) as usize;
                if !self.st_queues[deq].is_empty() {
                    pop_if_fits(&mut self.st_queues[deq], now, end, self.rate_bps)
                } else {
                    pop_if_fits(&mut self.waiting, now, end, self.rate_bps)
                }
            }
            Gate::BeOpen => pop_if_fits(
                &mut self.be_queue,
                now,
                cycle_start + self.cycle_time,
                self.rate_bps,
            ),
        }
    }

    pub fn rollover(&mut self, now: SimTime) {
        debug_assert_eq!(now.0 % self.cycle_time.0, 0);
        self.carryover += self.deq().len() as u64;
        self.cycle_index = now.0 / self.cycle_time.0;
        self.gate = Gate::StOpen;
    }

    pub fn gate_change(&mut self, now: SimTime) {
        debug_assert_eq!(now.0 % self.cycle_time.0, self.st_window.0);
        self.gate = Gate::BeOpen;
    }
}
