//! Traffic sources and sinks.
//!
//! Periodic ST sources emit a burst of `pi` frames at every cycle start of
//! the global cycle grid. Sporadic sources (ST or BE) are homogeneous Poisson
//! processes. Every source draws from its own ChaCha substream keyed by
//! `(run seed, stream id)`, so adding or reordering sources never changes
//! another source's draws.

use rand::{Rng as _, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp};

use crate::engine::SimTime;
use crate::error::SimError;
use crate::network::{Frame, Klass};

pub type Rng = ChaCha8Rng;

/// Substream reserved for per-switch epoch phases.
const PHASE_STREAM: u64 = u64::MAX;

pub fn substream(seed: u64, stream: u64) -> Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Independent uniform phase in `[0, epoch)` for each of `n` switches.
pub fn epoch_phases(seed: u64, n: usize, epoch: SimTime) -> Vec<SimTime> {
    let mut rng = substream(seed, PHASE_STREAM);
    (0..n).map(|_| SimTime(rng.random_range(0..epoch.0))).collect()
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum StreamKind {
    Periodic { frames_per_cycle: u32 },
    Sporadic { intensity_bps: f64 },
}

#[derive(Clone, Debug, PartialEq)]
pub struct StreamSpec {
    pub stream_id: u32,
    pub klass: Klass,
    pub kind: StreamKind,
    pub frame_bytes: u32,
    pub gateway: usize,
    pub ttl: u32,
    pub start: SimTime,
    pub duration: SimTime,
    /// Shift of a periodic source against the cycle grid.
    pub phase_offset: SimTime,
}

impl StreamSpec {
    pub fn frame_bits(&self) -> u64 {
        self.frame_bytes as u64 * 8
    }

    pub fn stop(&self) -> SimTime {
        self.start + self.duration
    }

    pub fn is_active(&self, t: SimTime) -> bool {
        t >= self.start && t < self.stop()
    }
}

/// The burst a periodic source emits at `cycle_start`. Frame ids are taken
/// from `next_id`.
pub fn periodic_emit(s: &StreamSpec, cycle_start: SimTime, next_id: &mut u64) -> Vec<Frame> {
    let StreamKind::Periodic { frames_per_cycle } = s.kind else {
        panic!("periodic_emit on a sporadic stream {}", s.stream_id);
    };
    (0..frames_per_cycle)
        .map(|_| {
            let id = *next_id;
            *next_id += 1;
            Frame::new(
                id,
                s.stream_id,
                s.klass,
                s.frame_bytes,
                cycle_start,
                s.gateway as u32,
                s.ttl,
            )
        })
        .collect()
}

/// Exponential inter-arrival with mean `frame_bits / intensity`, rounded to
/// the nearest nanosecond.
pub fn sporadic_next_arrival(s: &StreamSpec, rng: &mut Rng, now: SimTime) -> SimTime {
    let StreamKind::Sporadic { intensity_bps } = s.kind else {
        panic!("sporadic_next_arrival on a periodic stream {}", s.stream_id);
    };
    let mean_ns = s.frame_bits() as f64 * 1e9 / intensity_bps;
    let exp = Exp::new(1.0 / mean_ns).expect("positive rate");
    now + SimTime(exp.sample(rng).round() as u64)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct DeliveryRecord {
    pub stream_id: u32,
    pub klass: Klass,
    pub delay: SimTime,
    pub bits: u64,
}

pub fn sink_receive(f: &Frame, now: SimTime) -> Result<DeliveryRecord, SimError> {
    debug_assert_eq!(f.remaining_hops, 0);
    let delay = now.checked_sub(f.created_at).ok_or(SimError::NegativeDelay {
        frame_id: f.id,
        created_at: f.created_at,
        now,
    })?;
    Ok(DeliveryRecord {
        stream_id: f.stream_id,
        klass: f.klass,
        delay,
        bits: f.bits(),
    })
}

/// A running source: its spec, RNG substream and next emission time.
#[derive(Clone, Debug)]
pub struct Source {
    pub spec: StreamSpec,
    rng: Rng,
    cycle_time: SimTime,
}

impl Source {
    pub fn new(spec: StreamSpec, run_seed: u64, cycle_time: SimTime) -> Self {
        let rng = substream(run_seed, spec.stream_id as u64);
        Self {
            spec,
            rng,
            cycle_time,
        }
    }

    /// First emission, if the source ever becomes active.
    pub fn first_emission(&mut self) -> Option<SimTime> {
        let t = match self.spec.kind {
            StreamKind::Periodic { .. } => {
                // first grid point at or after start
                let ct = self.cycle_time.0;
                let base = self.spec.start.0.div_ceil(ct) * ct;
                SimTime(base) + self.spec.phase_offset
            }
            StreamKind::Sporadic { .. } => {
                sporadic_next_arrival(&self.spec, &mut self.rng, self.spec.start)
            }
        };
        self.active_at(t).then_some(t)
    }

    /// Periodic bursts only count when their whole cycle fits in the active
    /// period, so a source active for `T` emits `floor(T / CT)` bursts.
    fn active_at(&self, t: SimTime) -> bool {
        match self.spec.kind {
            StreamKind::Periodic { .. } => {
                t >= self.spec.start && t + self.cycle_time <= self.spec.stop()
            }
            StreamKind::Sporadic { .. } => self.spec.is_active(t),
        }
    }

    /// Frames due at `now` plus the following emission time, if any.
    pub fn emit(&mut self, now: SimTime, next_id: &mut u64) -> (Vec<Frame>, Option<SimTime>) {
        let (frames, next) = match self.spec.kind {
            StreamKind::Periodic { .. } => (
                periodic_emit(&self.spec, now, next_id),
                now + self.cycle_time,
            ),
            StreamKind::Sporadic { .. } => {
                let id = *next_id;
                *next_id += 1;
                let f = Frame::new(
                    id,
                    self.spec.stream_id,
                    self.spec.klass,
                    self.spec.frame_bytes,
                    now,
                    self.spec.gateway as u32,
                    self.spec.ttl,
                );
                (vec![f], sporadic_next_arrival(&self.spec, &mut self.rng, now))
            }
        };
        (frames, self.active_at(next).then_some(next))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn periodic(pi: u32) -> StreamSpec {
        StreamSpec {
            stream_id: 0,
            klass: Klass::St,
            kind: StreamKind::Periodic { frames_per_cycle: pi },
            frame_bytes: 64,
            gateway: 0,
            ttl: 3,
            start: SimTime::ZERO,
            duration: SimTime::from_secs(1),
            phase_offset: SimTime::ZERO,
        }
    }

    fn sporadic(klass: Klass, bytes: u32, bps: f64) -> StreamSpec {
        StreamSpec {
            stream_id: 3,
            klass,
            kind: StreamKind::Sporadic { intensity_bps: bps },
            frame_bytes: bytes,
            ..periodic(1)
        }
    }

    #[test]
    fn one_frame_per_cycle() {
        let mut id = 0;
        let frames = periodic_emit(&periodic(1), SimTime::from_us(50), &mut id);
        assert_eq!(frames.len(), 1);
        assert_eq!(frames[0].size_bytes, 64);
        assert_eq!(frames[0].created_at, SimTime::from_us(50));
        assert_eq!(frames[0].remaining_hops, 3);
    }

    #[test]
    fn sixteen_frames_is_163_84_mbps() {
        let mut id = 0;
        let frames = periodic_emit(&periodic(16), SimTime::ZERO, &mut id);
        let bits: u64 = frames.iter().map(Frame::bits).sum();
        // 16 * 512 bits per 50 us
        assert_eq!(bits as f64 / 50e-6, 163.84e6);
        assert_eq!(id, 16);
    }

    #[test]
    fn emission_count_over_active_period() {
        // floor(T / CT) * pi
        let mut s = periodic(5);
        s.duration = SimTime::from_ms(10) + SimTime(123);
        let mut src = Source::new(s, 1, SimTime::from_us(50));
        let mut t = src.first_emission();
        let mut id = 0;
        let mut total = 0;
        while let Some(now) = t {
            assert_eq!(now.0 % 50_000, 0, "emits on the cycle grid");
            let (frames, next) = src.emit(now, &mut id);
            total += frames.len();
            t = next;
        }
        assert_eq!(total, 200 * 5);
    }

    #[test]
    fn full_second_is_twenty_thousand_bursts() {
        let mut src = Source::new(periodic(2), 1, SimTime::from_us(50));
        let mut t = src.first_emission();
        let (mut id, mut bursts) = (0, 0);
        while let Some(now) = t {
            t = src.emit(now, &mut id).1;
            bursts += 1;
        }
        assert_eq!(bursts, 20_000);
        assert_eq!(id, 40_000);
    }

    #[test]
    fn mean_interarrival_st_and_be() {
        // mean = frame bits / rate: 512 ns for ST at 1 Gbps, 4640 ns for BE
        for (spec, mean) in [
            (sporadic(Klass::St, 64, 1e9), 512.0),
            (sporadic(Klass::Be, 580, 1e9), 4640.0),
        ] {
            let mut rng = substream(42, 0);
            let n = 200_000;
            let mut now = SimTime::ZERO;
            for _ in 0..n {
                now = sporadic_next_arrival(&spec, &mut rng, now);
            }
            let m = now.0 as f64 / n as f64;
            assert!((m - mean).abs() / mean < 0.01, "mean {m} vs {mean}");
        }
    }

    #[test]
    fn empirical_rate_over_one_second() {
        let spec = StreamSpec {
            duration: SimTime::from_secs(1),
            ..sporadic(Klass::St, 64, 1e9)
        };
        let mut src = Source::new(spec, 7, SimTime::from_us(50));
        let mut id = 0;
        let mut bits = 0u64;
        let mut t = src.first_emission();
        while let Some(now) = t {
            let (frames, next) = src.emit(now, &mut id);
            bits += frames.iter().map(Frame::bits).sum::<u64>();
            t = next;
        }
        let rate = bits as f64;
        assert!((rate - 1e9).abs() / 1e9 < 0.01, "rate {rate}");
    }

    #[test]
    fn identical_seed_identical_draws() {
        let spec = sporadic(Klass::Be, 580, 1e9);
        let draw = |seed| {
            let mut rng = substream(seed, 9);
            (0..100)
                .scan(SimTime::ZERO, |t, _| {
                    *t = sporadic_next_arrival(&spec, &mut rng, *t);
                    Some(*t)
                })
                .collect::<Vec<_>>()
        };
        assert_eq!(draw(11), draw(11));
        assert_ne!(draw(11), draw(12));
    }

    #[test]
    fn substreams_differ_by_stream_id() {
        let a: Vec<u64> = (0..8).map({ let mut r = substream(5, 0); move |_| r.random() }).collect();
        let b: Vec<u64> = (0..8).map({ let mut r = substream(5, 1); move |_| r.random() }).collect();
        assert_ne!(a, b);
    }

    #[test]
    fn phases_lie_within_epoch() {
        let epoch = SimTime::from_us(50);
        let phases = epoch_phases(3, 1000, epoch);
        assert!(phases.iter().all(|p| *p < epoch));
        assert_eq!(phases, epoch_phases(3, 1000, epoch));
    }

    #[test]
    fn sink_delay_is_arrival_minus_creation() {
        let f = Frame::new(1, 0, Klass::St, 64, SimTime::ZERO, 0, 0);
        let d = sink_receive(&f, SimTime::from_us(150)).unwrap();
        assert_eq!(d.delay, SimTime::from_us(150));
        assert_eq!(d.bits, 512);
    }

    #[test]
    fn negative_delay_is_an_error() {
        let f = Frame::new(1, 0, Klass::St, 64, SimTime::from_us(10), 0, 0);
        assert!(matches!(
            sink_receive(&f, SimTime::from_us(5)),
            Err(SimError::NegativeDelay { .. })
        ));
    }
}
