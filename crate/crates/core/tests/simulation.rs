mod common;

use cyclesim::bounds::{cqf_delay_bounds, BoundInput};
use cyclesim::traffic::{sporadic_next_arrival, substream, StreamKind, StreamSpec};
use cyclesim::{
    parse_config, run_point, run_reports, run_sweep, IntensityScope, Klass, Param,
    ScenarioConfig, SchedulerKind, SimTime, Simulation, StKind,
};
use proptest::prelude::*;

fn short(f: impl FnOnce(&mut ScenarioConfig)) -> ScenarioConfig {
    let mut c = ScenarioConfig {
        pi: Param::Value(4),
        sim_limit_ns: 20_000_000,
        warmup_ns: 1_000_000,
        ..ScenarioConfig::default()
    };
    f(&mut c);
    c.validate().unwrap();
    c
}

#[test]
fn stopped_sources_drain_completely() {
    for sched in [SchedulerKind::Cqf, SchedulerKind::Paternoster, SchedulerKind::Cqf3q] {
        let c = short(|c| {
            c.scheduler = sched;
            c.pi = Param::Value(20);
            c.stream_duration_ns = Some(5_000_000);
        });
        let r = run_point(&c.points()[0]).unwrap();
        assert_eq!(r.frames_in_system, 0, "{sched:?}");
        assert_eq!(r.frames_sent, r.frames_delivered + r.frames_dropped, "{sched:?}");
        assert!(r.frames_dropped > 0, "{sched:?} pi 20 overloads the ST window");
    }
}

#[test]
fn drops_are_attributed_to_a_site() {
    let c = short(|c| {
        c.scheduler = SchedulerKind::Paternoster;
        c.pi = Param::Value(36);
    });
    let r = run_point(&c.points()[0]).unwrap();
    for s in [&r.st, &r.be] {
        assert_eq!(s.frames_dropped, s.purge_drops + s.overflow_drops);
    }
    assert_eq!(r.purged, r.st.purge_drops + r.be.purge_drops);
}

#[test]
fn simulated_delays_respect_cqf_bounds_for_every_hop_count() {
    for ttl in 1..=4 {
        for prop in [500, 12_500, 25_000] {
            let c = short(|c| {
                c.ttl = ttl;
                // largest conforming burst with `ttl` streams per link
                c.pi = Param::List(vec![1, 48 / ttl]);
                c.prop_delay_ns = Param::Value(prop);
                c.access_link = false;
            });
            let b = cqf_delay_bounds(&BoundInput {
                hops: ttl,
                prop_delay: SimTime(prop),
                ..BoundInput::reference()
            });
            assert!(b.conforming);
            for p in c.points() {
                let r = run_point(&p).unwrap();
                let (lo, hi) = (r.st.min_delay_ns.unwrap(), r.st.max_delay_ns.unwrap());
                assert!(lo >= b.d_min.0, "ttl {ttl} prop {prop} pi {}: min {lo}", p.pi);
                assert!(hi <= b.d_max.0, "ttl {ttl} prop {prop} pi {}: max {hi}", p.pi);
            }
        }
    }
}

#[test]
fn three_queue_cqf_recovers_late_frames() {
    let c = |sched| {
        short(|c| {
            c.scheduler = sched;
            c.pi = Param::Value(8);
            c.prop_delay_ns = Param::Value(50_000);
        })
    };
    let plain = run_point(&c(SchedulerKind::Cqf).points()[0]).unwrap();
    let three = run_point(&c(SchedulerKind::Cqf3q).points()[0]).unwrap();
    assert_eq!(three.st.loss_ratio, 0.0);
    assert!(three.st.max_delay_ns < plain.st.max_delay_ns);
}

#[test]
fn parallelism_does_not_change_rows() {
    let c = short(|c| {
        c.pi = Param::List(vec![2, 18]);
        c.replications = 3;
    });
    assert_eq!(run_sweep(&c, Some(1)).unwrap(), run_sweep(&c, Some(3)).unwrap());
}

#[test]
fn sweep_rows_come_in_point_order() {
    let c = short(|c| c.pi = Param::Range(cyclesim::RangeSpec { from: 1, to: 5, step: Some(2) }));
    let rows = run_sweep(&c, None).unwrap();
    let keys: Vec<(u32, Klass)> = rows.iter().map(|r| (r.scenario.pi, r.klass)).collect();
    assert_eq!(
        keys,
        [1, 1, 3, 3, 5, 5]
            .into_iter()
            .zip([Klass::St, Klass::Be].into_iter().cycle())
            .collect::<Vec<_>>()
    );
}

#[test]
fn aggregate_sporadic_intensity_saturates_past_one_gigabit() {
    let c = short(|c| {
        c.st_kind = StKind::Sporadic;
        c.st_intensity_scope = IntensityScope::Aggregate;
        c.st_intensity_bps = Param::List(vec![5e8, 1.5e9]);
        c.sim_limit_ns = 50_000_000;
    });
    let r = run_reports(&c, None).unwrap();
    assert_eq!(r[0].st.loss_ratio, 0.0);
    assert!(r[1].st.loss_ratio > 0.1);
    assert!(r[1].st.mean_delay_ns.unwrap() > 10.0 * r[0].st.mean_delay_ns.unwrap());
}

#[test]
fn warmup_excludes_early_deliveries() {
    let p = short(|c| c.warmup_ns = 10_000_000).points().remove(0);
    let r = run_point(&p).unwrap();
    // 4 frames per cycle from 6 sources, all delivered 150us after creation
    let measured_cycles = (20_000_000 - 10_000_000) / 50_000;
    let st = r.st.count as i64;
    assert!((st - 24 * measured_cycles).abs() <= 24 * 4, "{st}");
    assert_eq!(r.measured_interval, SimTime::from_ms(10));
}

#[test]
fn simulation_can_be_inspected_mid_run() {
    let p = short(|_| {}).points().remove(0);
    let mut sim = Simulation::new(&p).unwrap();
    sim.run_until(SimTime::from_ms(5)).unwrap();
    let w = sim.world();
    let st = w.metrics.class(Klass::St);
    assert!(st.frames_sent > 0);
    assert!(w.frames_in_system() > 0);
}

#[test]
fn sporadic_interarrivals_pass_ks_test() {
    let spec = StreamSpec {
        stream_id: 0,
        klass: Klass::St,
        kind: StreamKind::Sporadic { intensity_bps: 1e9 },
        frame_bytes: 64,
        gateway: 0,
        ttl: 3,
        start: SimTime::ZERO,
        duration: SimTime::from_secs(1),
        phase_offset: SimTime::ZERO,
    };
    let mut rng = substream(2024, 0);
    let n = 100_000;
    let mut now = SimTime::ZERO;
    let mut gaps: Vec<f64> = (0..n)
        .map(|_| {
            let next = sporadic_next_arrival(&spec, &mut rng, now);
            let gap = (next - now).0 as f64;
            now = next;
            gap
        })
        .collect();
    let d = common::ks_exponential(&mut gaps, 512.0);
    // 1% critical value; nanosecond rounding adds at most ~1/(2*512)
    assert!(d < 1.628 / (n as f64).sqrt() + 1e-3, "D = {d}");
}

#[test]
fn config_file_drives_a_sweep() {
    let c = parse_config(r#"{"pi":[3],"sim_limit_ns":5000000,"warmup_ns":0,"replications":2}"#).unwrap();
    let rows = run_sweep(&c, None).unwrap();
    assert_eq!(rows.len(), 4);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn frames_are_conserved(
        sched in 0usize..3,
        pi in 1u32..40,
        prop in prop::sample::select(vec![500u64, 25_000, 50_000]),
        seed in any::<u64>(),
        be_ttl in 1u32..4,
    ) {
        let c = short(|c| {
            c.scheduler = [SchedulerKind::Cqf, SchedulerKind::Paternoster, SchedulerKind::Cqf3q][sched];
            c.pi = Param::Value(pi);
            c.prop_delay_ns = Param::Value(prop);
            c.seed = seed;
            c.be_ttl = be_ttl;
            c.sim_limit_ns = 5_000_000;
            c.warmup_ns = 0;
        });
        let r = run_point(&c.points()[0]).unwrap();
        prop_assert_eq!(r.frames_sent, r.frames_delivered + r.frames_dropped + r.frames_in_system);
        for s in [&r.st, &r.be] {
            prop_assert!((0.0..=1.0).contains(&s.loss_ratio));
            if let (Some(lo), Some(m), Some(hi)) = (s.min_delay_ns, s.mean_delay_ns, s.max_delay_ns) {
                prop_assert!(lo as f64 <= m + 1e-6 && m <= hi as f64 + 1e-6);
            }
        }
        // a stream never outruns the line rate of its last link
        prop_assert!(r.st.throughput_bps <= 6.0 * 1e9);
        for s in &r.per_stream {
            prop_assert!(s.throughput_bps <= 1e9);
        }
    }
}
