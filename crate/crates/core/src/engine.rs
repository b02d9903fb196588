//! Discrete-event kernel: integer-nanosecond clock, totally ordered event
//! queue and the run loop.
//!
//! Events are ordered by `(time, kind rank, seq)`. The kind rank puts gate,
//! cycle and epoch changes ahead of traffic at the same instant, so a frame
//! that arrives exactly on a cycle boundary is handled by the new cycle.

use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::fmt;
use std::ops::{Add, AddAssign, Sub};

use serde::{Deserialize, Serialize};

use crate::error::SimError;

/// Simulated time in integer nanoseconds since the start of a run.
#[derive(
    Clone, Copy, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize,
)]
#[serde(transparent)]
pub struct SimTime(pub u64);

impl SimTime {
    pub const ZERO: SimTime = SimTime(0);

    pub const fn from_ns(ns: u64) -> Self {
        SimTime(ns)
    }

    pub const fn from_us(us: u64) -> Self {
        SimTime(us * 1_000)
    }

    pub const fn from_ms(ms: u64) -> Self {
        SimTime(ms * 1_000_000)
    }

    pub const fn from_secs(s: u64) -> Self {
        SimTime(s * 1_000_000_000)
    }

    pub const fn as_ns(self) -> u64 {
        self.0
    }

    pub fn as_secs_f64(self) -> f64 {
        self.0 as f64 * 1e-9
    }

    pub fn checked_sub(self, rhs: SimTime) -> Option<SimTime> {
        self.0.checked_sub(rhs.0).map(SimTime)
    }

    pub fn saturating_sub(self, rhs: SimTime) -> SimTime {
        SimTime(self.0.saturating_sub(rhs.0))
    }
}

impl Add for SimTime {
    type Output = SimTime;
    fn add(self, rhs: SimTime) -> SimTime {
        SimTime(self.0 + rhs.0)
    }
}

impl AddAssign for SimTime {
    fn add_assign(&mut self, rhs: SimTime) {
        self.0 += rhs.0;
    }
}

impl Sub for SimTime {
    type Output = SimTime;
    fn sub(self, rhs: SimTime) -> SimTime {
        SimTime(self.0 - rhs.0)
    }
}

impl fmt::Display for SimTime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}ns", self.0)
    }
}

/// Event kinds in tie-break rank order.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum EventKind {
    GateChange,
    CycleRollover,
    EpochRollover,
    SourceEmit,
    FrameArrival,
    TxComplete,
    MetricsFlush,
}

impl EventKind {
    pub const fn rank(self) -> u8 {
        self as u8
    }
}

#[derive(Debug)]
pub struct Event<P> {
    pub time: SimTime,
    pub kind: EventKind,
    pub seq: u64,
    pub target: usize,
    pub payload: P,
}

impl<P> Event<P> {
    fn key(&self) -> (SimTime, u8, u64) {
        (self.time, self.kind.rank(), self.seq)
    }
}

impl<P> PartialEq for Event<P> {
    fn eq(&self, other: &Self) -> bool {
        self.key() == other.key()
    }
}

impl<P> Eq for Event<P> {}

impl<P> PartialOrd for Event<P> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl<P> Ord for Event<P> {
    // Reversed: BinaryHeap is a max-heap.
    fn cmp(&self, other: &Self) -> Ordering {
        other.key().cmp(&self.key())
    }
}

/// Min-ordered pending event set.
#[derive(Debug)]
pub struct EventQueue<P> {
    pending: BinaryHeap<Event<P>>,
}

impl<P> Default for EventQueue<P> {
    fn default() -> Self {
        Self {
            pending: BinaryHeap::new(),
        }
    }
}

impl<P> EventQueue<P> {
    pub fn push(&mut self, ev: Event<P>) {
        self.pending.push(ev);
    }

    pub fn pop(&mut self) -> Option<Event<P>> {
        self.pending.pop()
    }

    pub fn peek_time(&self) -> Option<SimTime> {
        self.pending.peek().map(|e| e.time)
    }

    pub fn len(&self) -> usize {
        self.pending.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pending.is_empty()
    }
}

/// The clock plus pending events; handed to handlers so they can schedule.
#[derive(Debug)]
pub struct Scheduler<P> {
    now: SimTime,
    next_seq: u64,
    queue: EventQueue<P>,
}

impl<P> Default for Scheduler<P> {
    fn default() -> Self {
        Self {
            now: SimTime::ZERO,
            next_seq: 0,
            queue: EventQueue::default(),
        }
    }
}

impl<P> Scheduler<P> {
    pub fn now(&self) -> SimTime {
        self.now
    }

    /// Inserts an event. Scheduling before the current clock aborts the run.
    pub fn schedule(
        &mut self,
        time: SimTime,
        kind: EventKind,
        target: usize,
        payload: P,
    ) -> Result<(), SimError> {
        if time < self.now {
            return Err(SimError::ScheduledInPast {
                now: self.now,
                at: time,
                kind,
            });
        }
        let seq = self.next_seq;
        self.next_seq += 1;
        self.queue.push(Event {
            time,
            kind,
            seq,
            target,
            payload,
        });
        Ok(())
    }

    pub fn pending(&self) -> usize {
        self.queue.len()
    }

    pub fn queue(&self) -> &EventQueue<P> {
        &self.queue
    }
}

/// Reacts to events popped by [`Engine::run`].
pub trait Handler<P> {
    fn handle(&mut self, ev: Event<P>, sched: &mut Scheduler<P>) -> Result<(), SimError>;
}

#[derive(Debug)]
pub struct Engine<P> {
    sched: Scheduler<P>,
    processed: u64,
}

impl<P> Default for Engine<P> {
    fn default() -> Self {
        Self {
            sched: Scheduler::default(),
            processed: 0,
        }
    }
}

impl<P> Engine<P> {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn now(&self) -> SimTime {
        self.sched.now
    }

    pub fn processed(&self) -> u64 {
        self.processed
    }

    pub fn scheduler(&mut self) -> &mut Scheduler<P> {
        &mut self.sched
    }

    pub fn schedule(
        &mut self,
        time: SimTime,
        kind: EventKind,
        target: usize,
        payload: P,
    ) -> Result<(), SimError> {
        self.sched.schedule(time, kind, target, payload)
    }

    /// Processes every event with `time <= until` in total order, then parks
    /// the clock at `until`. Returns the number of events processed by this
    /// call.
    pub fn run<H: Handler<P>>(&mut self, until: SimTime, handler: &mut H) -> Result<u64, SimError> {
        let start = self.processed;
        while let Some(t) = self.sched.queue.peek_time() {
            if t > until {
                break;
            }
            let ev = self.sched.queue.pop().expect("peeked");
            debug_assert!(ev.time >= self.sched.now, "clock went backwards");
            self.sched.now = ev.time;
            self.processed += 1;
            handler.handle(ev, &mut self.sched)?;
        }
        if until > self.sched.now {
            self.sched.now = until;
        }
        Ok(self.processed - start)
    }
}
