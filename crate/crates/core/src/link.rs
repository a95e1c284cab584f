//! Per-link SIR under two-user NOMA with SIC, the OMA relay hop, decoding
//! thresholds and the effective SIR scalings ("G-factors") used by the
//! closed forms. The model is interference limited: noise power is zero.

use crate::error::{Error, Result};
use crate::interference::AggregateInterference;

/// Relative slack below the `a1 / a2` ceiling treated as the ceiling itself.
pub const SIC_MARGIN: f64 = 1e-12;

/// Power fractions of the superposed signal; D1 gets the larger share and
/// is decoded first.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PowerSplit {
    a1: f64,
    a2: f64,
}

impl PowerSplit {
    /// `a2 = 1 - a1`.
    pub fn from_a1(a1: f64) -> Result<Self> {
        let split = PowerSplit { a1, a2: 1.0 - a1 };
        split.validate()?;
        Ok(split)
    }

    pub fn new(a1: f64, a2: f64) -> Result<Self> {
        let split = PowerSplit { a1, a2 };
        split.validate()?;
        Ok(split)
    }

    pub fn validate(&self) -> Result<()> {
        let (a1, a2) = (self.a1, self.a2);
        if !a1.is_finite() || !a2.is_finite() || (a1 + a2 - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidScene(format!(
                "a1 + a2 must equal 1, got {a1} + {a2}"
            )));
        }
        if !(a2 > 0.0) {
            return Err(Error::InvalidScene(format!("a2 must be > 0, got {a2}")));
        }
        if a1 < a2 {
            return Err(Error::InvalidScene(format!(
                "a1 must be ≥ a2, got a1 = {a1}, a2 = {a2}"
            )));
        }
        Ok(())
    }

    pub fn a1(&self) -> f64 {
        self.a1
    }

    pub fn a2(&self) -> f64 {
        self.a2
    }

    /// Largest SIR the first SIC stage can reach, `a1 / a2`.
    pub fn sic_ceiling(&self) -> f64 {
        self.a1 / self.a2
    }

    /// Whether the first SIC stage can reach `theta` at all, i.e.
    /// `theta < a1 / a2`. Thresholds within a relative `SIC_MARGIN` of the
    /// ceiling count as unreachable so that `a2 = 1 - a1` rounding does not
    /// move the boundary.
    pub fn sic_feasible(&self, theta: f64) -> bool {
        self.a1 - theta * self.a2 > SIC_MARGIN * self.a1
    }
}

/// Decoding thresholds `2^(n R_i) - 1` for a transmission spread over
/// `n` phases.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Thresholds {
    theta: [[f64; 2]; 2],
}

impl Thresholds {
    pub fn from_rates(r1: f64, r2: f64) -> Self {
        let t = |n: f64, r: f64| (n * r).exp2() - 1.0;
        Thresholds {
            theta: [[t(1.0, r1), t(1.0, r2)], [t(2.0, r1), t(2.0, r2)]],
        }
    }

    /// Threshold for `phases` ∈ {1, 2} and destination index `dest` ∈ {1, 2}.
    pub fn get(&self, phases: usize, dest: usize) -> f64 {
        assert!((1..=2).contains(&phases) && (1..=2).contains(&dest));
        self.theta[phases - 1][dest - 1]
    }
}

/// Effective SIR scaling; infeasible when the threshold cannot be met by
/// the first SIC stage at any fading level.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum GFactor {
    Feasible(f64),
    Infeasible,
}

impl GFactor {
    pub fn value(self) -> Option<f64> {
        match self {
            GFactor::Feasible(g) => Some(g),
            GFactor::Infeasible => None,
        }
    }

    pub fn is_feasible(self) -> bool {
        matches!(self, GFactor::Feasible(_))
    }
}

/// G-factors for one- and two-phase thresholds, indexed by `phases - 1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GFactors {
    pub g1: [GFactor; 2],
    pub g2: [f64; 2],
    pub gmax: [GFactor; 2],
}

impl GFactors {
    pub fn new(split: PowerSplit, th: &Thresholds) -> Self {
        let g1 = |n| first_stage_gfactor(split, th.get(n, 1));
        let g2 = |n| th.get(n, 2) / split.a2();
        let gmax = |n| match g1(n) {
            GFactor::Feasible(g) => GFactor::Feasible(g.max(g2(n))),
            GFactor::Infeasible => GFactor::Infeasible,
        };
        GFactors {
            g1: [g1(1), g1(2)],
            g2: [g2(1), g2(2)],
            gmax: [gmax(1), gmax(2)],
        }
    }

    pub fn g1(&self, phases: usize) -> GFactor {
        self.g1[phases - 1]
    }

    pub fn g2(&self, phases: usize) -> f64 {
        self.g2[phases - 1]
    }

    pub fn gmax(&self, phases: usize) -> GFactor {
        self.gmax[phases - 1]
    }
}

/// `theta / (a1 - theta a2)`, infeasible for `theta >= a1 / a2`.
pub fn first_stage_gfactor(split: PowerSplit, theta: f64) -> GFactor {
    if split.sic_feasible(theta) {
        GFactor::Feasible(theta / (split.a1() - theta * split.a2()))
    } else {
        GFactor::Infeasible
    }
}

/// Signal-to-interference ratio. Interference-free links carry the
/// distinguished `Infinite` value, which satisfies every threshold.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Sir {
    Finite(f64),
    Infinite,
}

impl Sir {
    pub fn meets(self, threshold: f64) -> bool {
        match self {
            Sir::Finite(v) => v >= threshold,
            Sir::Infinite => true,
        }
    }

    pub fn finite(self) -> Option<f64> {
        match self {
            Sir::Finite(v) => Some(v),
            Sir::Infinite => None,
        }
    }
}

/// SIR for decoding the high-power (D1) message while the D2 message
/// still acts as interference. Bounded by `a1 / a2`.
pub fn sir_noma_strong(h2: f64, gain: f64, split: PowerSplit, agg: AggregateInterference) -> f64 {
    let signal = h2 * gain;
    let interference = agg.total();
    if interference == 0.0 {
        return if signal > 0.0 {
            split.sic_ceiling()
        } else {
            0.0
        };
    }
    signal * split.a1() / (signal * split.a2() + interference)
}

/// SIR for the low-power (D2) message after perfect SIC.
pub fn sir_noma_weak(h2: f64, gain: f64, split: PowerSplit, agg: AggregateInterference) -> Sir {
    ratio(h2 * gain * split.a2(), agg.total())
}

/// SIR of a full-power single-message hop.
pub fn sir_oma(h2: f64, gain: f64, agg: AggregateInterference) -> Sir {
    ratio(h2 * gain, agg.total())
}

fn ratio(signal: f64, interference: f64) -> Sir {
    if interference == 0.0 {
        Sir::Infinite
    } else {
        Sir::Finite(signal / interference)
    }
}

/// First SIC stage succeeds: the threshold lies strictly below the
/// `a1 / a2` ceiling and the SIR reaches it. The strict ceiling makes the
/// interference-free boundary case agree with the infeasible G-factor.
pub fn decodes_strong(sir: f64, theta: f64, split: PowerSplit) -> bool {
    split.sic_feasible(theta) && sir >= theta
}
