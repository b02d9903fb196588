//! Closed-form CQF delay bounds and ST saturation thresholds.

use crate::engine::SimTime;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct BoundInput {
    pub hops: u32,
    pub cycle_time: SimTime,
    pub st_window: SimTime,
    pub link_rate_bps: u64,
    pub streams_per_link: u64,
    pub frame_bits: u64,
    pub prop_delay: SimTime,
}

impl BoundInput {
    /// The reference ring: 3 hops, 50us cycles with a 25us ST window, 1 Gbps,
    /// 3 streams per link, 64-byte frames and 500ns links.
    pub fn reference() -> Self {
        Self {
            hops: 3,
            cycle_time: SimTime::from_us(50),
            st_window: SimTime::from_us(25),
            link_rate_bps: 1_000_000_000,
            streams_per_link: 3,
            frame_bits: 512,
            prop_delay: SimTime(500),
        }
    }

    fn check(&self) {
        assert!(self.hops >= 1, "at least one hop");
        assert!(
            self.st_window.0 > 0 && self.st_window <= self.cycle_time,
            "ST window must lie within the cycle"
        );
    }

    /// Frames arrive within the cycle they were sent in.
    pub fn is_conforming(&self) -> bool {
        self.prop_delay <= self.st_window
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CqfBounds {
    pub d_min: SimTime,
    pub d_max: SimTime,
    /// False when the propagation delay exceeds the ST window and the
    /// bounds no longer hold.
    pub conforming: bool,
}

/// `(H-1)·CT <= delay <= (H+1)·CT`.
pub fn cqf_delay_bounds(b: &BoundInput) -> CqfBounds {
    b.check();
    let ct = b.cycle_time.0;
    CqfBounds {
        d_min: SimTime((b.hops as u64 - 1) * ct),
        d_max: SimTime((b.hops as u64 + 1) * ct),
        conforming: b.is_conforming(),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Basis {
    Standard,
    /// Doubling observed in simulation once propagation reaches the cycle
    /// time; not derived.
    Observed,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct MaxDelay {
    pub value: SimTime,
    pub basis: Basis,
}

/// Worst-case delay that also covers long links. Conforming inputs get the
/// standard bound; beyond the ST window the observed doubling is returned.
pub fn cqf_nonconforming_max(b: &BoundInput) -> MaxDelay {
    let std = cqf_delay_bounds(b);
    if std.conforming {
        MaxDelay {
            value: std.d_max,
            basis: Basis::Standard,
        }
    } else {
        MaxDelay {
            value: SimTime(2 * std.d_max.0),
            basis: Basis::Observed,
        }
    }
}

/// Largest frames-per-cycle count per source whose ST load still fits one
/// window on a shared link.
pub fn saturation_pi(b: &BoundInput) -> u64 {
    assert!(b.streams_per_link >= 1);
    b.check();
    window_bits(b) / (b.streams_per_link * b.frame_bits)
}

/// Bits a link can carry in one ST window.
pub fn window_bits(b: &BoundInput) -> u64 {
    (b.st_window.0 as u128 * b.link_rate_bps as u128 / 1_000_000_000) as u64
}

/// Stream traversals per link when each of `switches` sources sends `ttl`
/// hops around the ring. Every link carries the same load.
pub fn streams_per_link(switches: usize, ttl: u32) -> u64 {
    assert!(switches >= 1);
    ttl as u64
}

#[cfg(test)]
mod tests {
    use super::*;

    fn input(f: impl FnOnce(&mut BoundInput)) -> BoundInput {
        let mut b = BoundInput::reference();
        f(&mut b);
        b
    }

    #[test]
    fn reference_bounds() {
        let b = cqf_delay_bounds(&BoundInput::reference());
        assert_eq!(b.d_max, SimTime::from_us(200));
        assert_eq!(b.d_min, SimTime::from_us(100));
        assert!(b.conforming);
    }

    #[test]
    fn single_hop_min_is_zero() {
        assert_eq!(cqf_delay_bounds(&input(|b| b.hops = 1)).d_min, SimTime::ZERO);
    }

    #[test]
    fn long_links_are_flagged() {
        let b = input(|b| b.prop_delay = SimTime::from_us(26));
        assert!(!cqf_delay_bounds(&b).conforming);
    }

    #[test]
    fn doubling_at_cycle_length_links() {
        let m = cqf_nonconforming_max(&input(|b| b.prop_delay = SimTime::from_us(50)));
        assert_eq!(m.value, SimTime::from_us(400));
        assert_eq!(m.basis, Basis::Observed);
        let m = cqf_nonconforming_max(&input(|b| b.prop_delay = SimTime::from_us(25)));
        assert_eq!(m.value, SimTime::from_us(200));
        assert_eq!(m.basis, Basis::Standard);
        let m = cqf_nonconforming_max(&input(|b| b.prop_delay = SimTime::ZERO));
        assert_eq!(m.basis, Basis::Standard);
    }

    #[test]
    fn saturation_thresholds() {
        assert_eq!(saturation_pi(&BoundInput::reference()), 16);
        assert_eq!(saturation_pi(&input(|b| b.st_window = SimTime::from_us(50))), 32);
        assert_eq!(saturation_pi(&input(|b| b.streams_per_link = 1)), 48);
    }

    #[test]
    fn reference_ring_has_three_streams_per_link() {
        assert_eq!(streams_per_link(6, 3), 3);
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn bound_width_is_two_cycles(h in 1u32..64, ct in 1u64..10_000_000, frac in 0.01f64..=1.0) {
                let b = BoundInput {
                    hops: h,
                    cycle_time: SimTime(ct),
                    st_window: SimTime(((ct as f64 * frac) as u64).max(1)),
                    ..BoundInput::reference()
                };
                let r = cqf_delay_bounds(&b);
                prop_assert_eq!(r.d_max.0 - r.d_min.0, 2 * ct);
            }
        }
    }
}
