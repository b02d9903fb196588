//! Brute-force oracles shared by the integration tests and the acceptance
//! harness. None of them call into `cyclesim::bounds`.

#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Walks every stream around the ring and counts traversals per link.
pub fn link_occupancy(switches: usize, ttl: u32) -> Vec<u64> {
    let mut load = vec![0u64; switches];
    for src in 0..switches {
        let mut at = src;
        for _ in 0..ttl {
            load[at] += 1;
            at = (at + 1) % switches;
        }
    }
    load
}

/// Places `frames` frames of `frame_ns` back to back from the window start,
/// refusing any that would overrun the window. Returns how many fit.
pub fn pack_window(frames: u64, frame_ns: u64, window_ns: u64) -> u64 {
    let mut t = 0;
    let mut sent = 0;
    for _ in 0..frames {
        if t + frame_ns > window_ns {
            break;
        }
        t += frame_ns;
        sent += 1;
    }
    sent
}

/// Largest per-source burst for which every frame of every stream sharing a
/// link fits in one window, found by trying bursts one by one.
pub fn saturation_by_packing(streams: u64, frame_ns: u64, window_ns: u64) -> u64 {
    let mut pi = 0;
    while pack_window(streams * (pi + 1), frame_ns, window_ns) == streams * (pi + 1) {
        pi += 1;
    }
    pi
}

/// Delay range of a frame crossing `hops` CQF links, enumerated at cycle
/// level over a grid of creation and final-window offsets. A frame received
/// in cycle `x` leaves in cycle `x + 1`; it is created at offset `o` of its
/// gateway cycle and reaches the sink at offset `e` of the cycle after the
/// last transmission. Returns `(min, max, conforming)` where conforming
/// means every hop lands in the cycle it was sent in.
pub fn enumerate_cqf_delays(hops: u64, ct: u64, window: u64, prop: u64, step: u64) -> (u64, u64, bool) {
    let mut lo = u64::MAX;
    let mut hi = 0;
    let mut conforming = true;
    let mut o = 0;
    while o < ct {
        // transmission offsets inside the window where the arrival still
        // lands in the same cycle
        let mut s = 0;
        while s < window {
            let land = s + prop;
            if land >= ct {
                conforming = false;
            } else {
                // leaves in cycle 1 .. hops, delivered in cycle `hops`
                let delay = hops * ct + land - o;
                lo = lo.min(delay);
                hi = hi.max(delay);
            }
            s += step;
        }
        o += step;
    }
    if prop > window {
        conforming = false;
    }
    (lo, hi, conforming)
}

/// Two-pass mean and population standard deviation.
pub fn two_pass(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let var = xs.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / n;
    (mean, var.sqrt())
}

/// Synthetic delay samples in nanoseconds.
pub fn synthetic_delays(n: usize, seed: u64) -> Vec<u64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n).map(|_| 100_000 + rng.random_range(0..100_000u64)).collect()
}

/// Kolmogorov-Smirnov statistic of `xs` against Exp(mean).
pub fn ks_exponential(xs: &mut [f64], mean: f64) -> f64 {
    xs.sort_by(f64::total_cmp);
    let n = xs.len() as f64;
    xs.iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = 1.0 - (-x / mean).exp();
            (f - i as f64 / n).abs().max((f - (i + 1) as f64 / n).abs())
        })
        .fold(0.0, f64::max)
}
