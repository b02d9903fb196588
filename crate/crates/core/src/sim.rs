//! One simulation run: the ring, its sources and the metrics collector driven
//! by the event engine.

use crate::config::{IntensityScope, ScenarioPoint, StKind};
use crate::engine::{Engine, Event, EventKind, Handler, Scheduler, SimTime};
use crate::error::SimError;
use crate::metrics::{ClassSummary, DropSite, Metrics};
use crate::network::{build_ring, transmit, Frame, Ingest, Klass, RingTopology};
use crate::scheduling::EgressPort;
use crate::traffic::{sink_receive, Source, StreamKind, StreamSpec};

#[derive(Debug)]
pub enum Payload {
    None,
    Frame(Frame),
}

/// Everything a run mutates besides the event queue.
#[derive(Debug)]
pub struct World {
    pub ring: RingTopology,
    pub sources: Vec<Source>,
    pub metrics: Metrics,
    busy: Vec<bool>,
    /// Frames scheduled to arrive somewhere (on a link or an access link).
    in_transit: u64,
    purged: u64,
    next_frame_id: u64,
    access_delay: SimTime,
    cycle_time: SimTime,
}

impl World {
    pub fn frames_in_system(&self) -> u64 {
        let queued: usize = self.ring.switches.iter().map(|s| s.egress.queued_frames()).sum();
        queued as u64 + self.in_transit
    }

    pub fn carryover(&self) -> u64 {
        self.ring.switches.iter().map(|s| s.egress.carryover()).sum()
    }

    pub fn purged(&self) -> u64 {
        self.purged
    }

    fn try_transmit(&mut self, i: usize, sched: &mut Scheduler<Payload>) -> Result<(), SimError> {
        if self.busy[i] {
            return Ok(());
        }
        let now = sched.now();
        let sw = &mut self.ring.switches[i];
        let Some(mut f) = sw.egress.select(now) else {
            return Ok(());
        };
        f.sender_cycle_index = sw.egress.cycle_index();
        let link = self.ring.links[i];
        let tx = transmit(&link, &f, now);
        self.busy[i] = true;
        self.in_transit += 1;
        sched.schedule(tx.tx_complete, EventKind::TxComplete, i, Payload::None)?;
        sched.schedule(tx.arrival, EventKind::FrameArrival, link.dst_switch, Payload::Frame(f))
    }

    fn arrive(&mut self, i: usize, f: Frame, sched: &mut Scheduler<Payload>) -> Result<(), SimError> {
        self.in_transit -= 1;
        let now = sched.now();
        match self.ring.switches[i].ingest(f, now) {
            Ingest::Delivered(f) => {
                let d = sink_receive(&f, now)?;
                self.metrics.record_delivery(&d, now);
                Ok(())
            }
            Ingest::Enqueued => self.try_transmit(i, sched),
            Ingest::Dropped(f) => {
                self.metrics.record_drop(&f, DropSite::Overflow);
                Ok(())
            }
        }
    }

    fn emit(&mut self, s: usize, sched: &mut Scheduler<Payload>) -> Result<(), SimError> {
        let now = sched.now();
        let (frames, next) = self.sources[s].emit(now, &mut self.next_frame_id);
        let gateway = self.sources[s].spec.gateway;
        for f in frames {
            self.metrics.record_sent(&f);
            self.in_transit += 1;
            sched.schedule(
                now + self.access_delay,
                EventKind::FrameArrival,
                gateway,
                Payload::Frame(f),
            )?;
        }
        if let Some(t) = next {
            sched.schedule(t, EventKind::SourceEmit, s, Payload::None)?;
        }
        Ok(())
    }
}

impl Handler<Payload> for World {
    fn handle(&mut self, ev: Event<Payload>, sched: &mut Scheduler<Payload>) -> Result<(), SimError> {
        let now = ev.time;
        let i = ev.target;
        match ev.kind {
            EventKind::CycleRollover => {
                match &mut self.ring.switches[i].egress {
                    EgressPort::Cqf(p) => p.rollover(now),
                    EgressPort::Cqf3q(p) => p.rollover(now),
                    EgressPort::Paternoster(_) => unreachable!("no cycle events for paternoster"),
                }
                sched.schedule(now + self.cycle_time, EventKind::CycleRollover, i, Payload::None)?;
                self.try_transmit(i, sched)
            }
            EventKind::GateChange => {
                match &mut self.ring.switches[i].egress {
                    EgressPort::Cqf(p) => p.gate_change(now),
                    EgressPort::Cqf3q(p) => p.gate_change(now),
                    EgressPort::Paternoster(_) => unreachable!("no gate events for paternoster"),
                }
                sched.schedule(now + self.cycle_time, EventKind::GateChange, i, Payload::None)?;
                self.try_transmit(i, sched)
            }
            EventKind::EpochRollover => {
                let EgressPort::Paternoster(p) = &mut self.ring.switches[i].egress else {
                    unreachable!("epoch events only for paternoster");
                };
                let epoch = p.epoch_duration();
                for f in p.rollover(now) {
                    self.purged += 1;
                    self.metrics.record_drop(&f, DropSite::Purge);
                }
                sched.schedule(now + epoch, EventKind::EpochRollover, i, Payload::None)?;
                self.try_transmit(i, sched)
            }
            EventKind::SourceEmit => self.emit(i, sched),
            EventKind::FrameArrival => {
                let Payload::Frame(f) = ev.payload else {
                    unreachable!("arrival without a frame");
                };
                self.arrive(i, f, sched)
            }
            EventKind::TxComplete => {
                self.busy[i] = false;
                self.try_transmit(i, sched)
            }
            EventKind::MetricsFlush => Ok(()),
        }
    }
}

/// Results of one run.
#[derive(Clone, Debug)]
pub struct RunReport {
    pub point: ScenarioPoint,
    pub st: ClassSummary,
    pub be: ClassSummary,
    /// Indexed by stream id: ST streams `0..N`, BE streams `N..2N`.
    pub per_stream: Vec<ClassSummary>,
    pub measured_interval: SimTime,
    pub carryover: u64,
    pub purged: u64,
    pub frames_sent: u64,
    pub frames_delivered: u64,
    pub frames_dropped: u64,
    pub frames_in_system: u64,
    pub events: u64,
}

impl RunReport {
    pub fn class(&self, k: Klass) -> &ClassSummary {
        match k {
            Klass::St => &self.st,
            Klass::Be => &self.be,
        }
    }
}

pub struct Simulation {
    engine: Engine<Payload>,
    world: World,
    point: ScenarioPoint,
}

fn stream_specs(p: &ScenarioPoint) -> Vec<StreamSpec> {
    let n = p.switches;
    let duration = SimTime(p.stream_duration_ns);
    let st_kind = match p.st_kind {
        StKind::Periodic => StreamKind::Periodic {
            frames_per_cycle: p.pi,
        },
        StKind::Sporadic => StreamKind::Sporadic {
            intensity_bps: match p.st_intensity_scope {
                IntensityScope::PerSource => p.st_intensity_bps,
                IntensityScope::Aggregate => p.st_intensity_bps / n as f64,
            },
        },
    };
    let st = (0..n).map(|i| StreamSpec {
        stream_id: i as u32,
        klass: Klass::St,
        kind: st_kind,
        frame_bytes: p.st_frame_bytes,
        gateway: i,
        ttl: p.ttl,
        start: SimTime::ZERO,
        duration,
        phase_offset: SimTime(p.source_phase_offset_ns),
    });
    let be = (0..n).map(|i| StreamSpec {
        stream_id: (n + i) as u32,
        klass: Klass::Be,
        kind: StreamKind::Sporadic {
            intensity_bps: p.be_intensity_bps,
        },
        frame_bytes: p.be_frame_bytes,
        gateway: i,
        ttl: p.be_ttl,
        start: SimTime::ZERO,
        duration,
        phase_offset: SimTime::ZERO,
    });
    st.chain(be).collect()
}

impl Simulation {
    pub fn new(p: &ScenarioPoint) -> Result<Self, SimError> {
        let ring = build_ring(p)?;
        let n = ring.len();
        let cycle_time = SimTime(p.cycle_time_ns);
        let sources: Vec<Source> = stream_specs(p)
            .into_iter()
            .map(|s| Source::new(s, p.run_seed, cycle_time))
            .collect();
        let mut engine = Engine::new();
        for (i, sw) in ring.switches.iter().enumerate() {
            match &sw.egress {
                EgressPort::Cqf(_) | EgressPort::Cqf3q(_) => {
                    // cycle 0 starts in its initial state at t = 0
                    engine.schedule(cycle_time, EventKind::CycleRollover, i, Payload::None)?;
                    engine.schedule(
                        SimTime(p.st_window_ns),
                        EventKind::GateChange,
                        i,
                        Payload::None,
                    )?;
                }
                EgressPort::Paternoster(port) => {
                    // the initial role assignment holds until the first boundary after 0
                    let first = port.next_rollover_at_or_after(SimTime(1));
                    engine.schedule(first, EventKind::EpochRollover, i, Payload::None)?;
                }
            }
        }
        let mut sources = sources;
        for (s, src) in sources.iter_mut().enumerate() {
            if let Some(t) = src.first_emission() {
                engine.schedule(t, EventKind::SourceEmit, s, Payload::None)?;
            }
        }
        engine.schedule(SimTime(p.sim_limit_ns), EventKind::MetricsFlush, 0, Payload::None)?;
        let world = World {
            busy: vec![false; n],
            metrics: Metrics::new(sources.len(), SimTime(p.warmup_ns)),
            ring,
            sources,
            in_transit: 0,
            purged: 0,
            next_frame_id: 0,
            access_delay: if p.access_link {
                SimTime(p.prop_delay_ns)
            } else {
                SimTime::ZERO
            },
            cycle_time,
        };
        Ok(Self {
            engine,
            world,
            point: p.clone(),
        })
    }

    pub fn world(&self) -> &World {
        &self.world
    }

    pub fn now(&self) -> SimTime {
        self.engine.now()
    }

    /// Advances the run to `until` (capped at the configured limit).
    pub fn run_until(&mut self, until: SimTime) -> Result<u64, SimError> {
        let until = until.min(SimTime(self.point.sim_limit_ns));
        self.engine.run(until, &mut self.world)
    }

    pub fn finish(mut self) -> Result<RunReport, SimError> {
        self.run_until(SimTime(self.point.sim_limit_ns))?;
        let p = &self.point;
        let interval = SimTime(p.sim_limit_ns - p.warmup_ns);
        let m = &self.world.metrics;
        let [st, be] = &m.classes;
        Ok(RunReport {
            st: st.finalize(interval),
            be: be.finalize(interval),
            per_stream: m.streams.iter().map(|s| s.finalize(interval)).collect(),
            measured_interval: interval,
            carryover: self.world.carryover(),
            purged: self.world.purged,
            frames_sent: st.frames_sent + be.frames_sent,
            frames_delivered: st.frames_delivered + be.frames_delivered,
            frames_dropped: st.frames_dropped + be.frames_dropped,
            frames_in_system: self.world.frames_in_system(),
            events: self.engine.processed(),
            point: self.point,
        })
    }
}

/// Builds and runs one scenario point to its limit.
pub fn run_point(p: &ScenarioPoint) -> Result<RunReport, SimError> {
    Simulation::new(p)?.finish()
}
