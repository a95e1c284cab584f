//! Per-realization success logic of the ACN protocol and the baselines it
//! is compared against.
//!
//! All decisions are pure functions of one [`SlotDraws`]: fading and
//! interference on the two source links during the broadcast slot, and on
//! the two destination-to-destination links during the relay slot.
//!
//! Baseline semantics:
//!
//! * `direct_noma`: one broadcast slot, SIC at each destination, rates
//!   over one phase.
//! * `ccn`: always two phases. Direct decoding at two-phase thresholds,
//!   otherwise the other destination relays the message over OMA.
//! * `coop_noma`: always two phases, relay path only. The relay decodes
//!   by SIC in the broadcast slot and forwards the superposed signal, so
//!   the destination decodes the relay hop by SIC as well.
//! * `coop_oma`: every hop is a full-power single-message transmission at
//!   two-phase thresholds; success is direct or relayed decoding.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::geometry::{Destination, Scene};
use crate::interference::AggregateInterference;
use crate::link::{
    decodes_strong, sir_noma_strong, sir_noma_weak, sir_oma, PowerSplit, Thresholds,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ProtocolKind {
    Acn,
    Ccn,
    CoopNoma,
    CoopOma,
    DirectNoma,
}

impl ProtocolKind {
    /// All protocols, in lexicographic order of their names.
    pub const ALL: [ProtocolKind; 5] = [
        ProtocolKind::Acn,
        ProtocolKind::Ccn,
        ProtocolKind::CoopNoma,
        ProtocolKind::CoopOma,
        ProtocolKind::DirectNoma,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ProtocolKind::Acn => "acn",
            ProtocolKind::Ccn => "ccn",
            ProtocolKind::CoopNoma => "coop_noma",
            ProtocolKind::CoopOma => "coop_oma",
            ProtocolKind::DirectNoma => "direct_noma",
        }
    }

    pub fn index(self) -> usize {
        self as usize
    }
}

impl fmt::Display for ProtocolKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ProtocolKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let key = s.trim().to_ascii_lowercase().replace('-', "_");
        ProtocolKind::ALL
            .into_iter()
            .find(|k| k.name() == key)
            .ok_or_else(|| Error::UnknownProtocol(s.trim().to_string()))
    }
}

/// Fading power and aggregate interference seen on one link.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct LinkDraw {
    pub fading: f64,
    pub interference: AggregateInterference,
}

/// Everything random in one transmission attempt.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct SlotDraws {
    /// Broadcast slot, S to D1.
    pub s_d1: LinkDraw,
    /// Broadcast slot, S to D2.
    pub s_d2: LinkDraw,
    /// Relay slot, D2 to D1.
    pub d2_d1: LinkDraw,
    /// Relay slot, D1 to D2.
    pub d1_d2: LinkDraw,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ProtocolOutcome {
    pub d1_success: bool,
    pub d2_success: bool,
    /// Phases spent serving D1 and D2 respectively.
    pub phases_used: [u8; 2],
}

impl ProtocolOutcome {
    pub fn success(&self, dest: Destination) -> bool {
        match dest {
            Destination::D1 => self.d1_success,
            Destination::D2 => self.d2_success,
        }
    }

    pub fn phases(&self, dest: Destination) -> u8 {
        self.phases_used[dest.index()]
    }
}

/// Link gains of a scene, computed once per run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinkGains {
    pub s_d1: f64,
    pub s_d2: f64,
    pub relay: f64,
}

impl LinkGains {
    pub fn of(scene: &Scene) -> Result<Self> {
        Ok(LinkGains {
            s_d1: scene.source_gain(Destination::D1)?,
            s_d2: scene.source_gain(Destination::D2)?,
            relay: scene.relay_gain()?,
        })
    }
}

/// Scene-derived constants needed by every decision.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DecisionContext {
    pub gains: LinkGains,
    pub split: PowerSplit,
    pub th: Thresholds,
}

impl DecisionContext {
    pub fn new(scene: &Scene) -> Result<Self> {
        Ok(DecisionContext {
            gains: LinkGains::of(scene)?,
            split: scene.split,
            th: scene.thresholds(),
        })
    }

    pub fn with_thresholds(scene: &Scene, th: Thresholds) -> Result<Self> {
        Ok(DecisionContext {
            th,
            ..Self::new(scene)?
        })
    }

    /// First SIC stage only: recovers D1's message.
    fn strong(&self, link: LinkDraw, gain: f64, theta: f64) -> bool {
        let sir = sir_noma_strong(link.fading, gain, self.split, link.interference);
        decodes_strong(sir, theta, self.split)
    }

    /// Both SIC stages: recovers D1's then D2's message.
    fn both(&self, link: LinkDraw, gain: f64, theta1: f64, theta2: f64) -> bool {
        self.strong(link, gain, theta1)
            && sir_noma_weak(link.fading, gain, self.split, link.interference).meets(theta2)
    }

    fn oma(&self, link: LinkDraw, gain: f64, theta: f64) -> bool {
        sir_oma(link.fading, gain, link.interference).meets(theta)
    }

    fn th(&self, phases: usize, dest: usize) -> f64 {
        self.th.get(phases, dest)
    }
}

/// D1 under ACN: direct NOMA decoding, else D2 relays D1's message.
/// Returns success and the number of phases used.
pub fn acn_d1(draws: &SlotDraws, ctx: &DecisionContext) -> (bool, u8) {
    let g = ctx.gains;
    if ctx.strong(draws.s_d1, g.s_d1, ctx.th(1, 1)) {
        return (true, 1);
    }
    let rescued =
        ctx.strong(draws.s_d2, g.s_d2, ctx.th(2, 1)) && ctx.oma(draws.d2_d1, g.relay, ctx.th(2, 1));
    (rescued, 2)
}

/// D2 under ACN: direct two-stage SIC, else D1 relays D2's message.
pub fn acn_d2(draws: &SlotDraws, ctx: &DecisionContext) -> (bool, u8) {
    let g = ctx.gains;
    if ctx.both(draws.s_d2, g.s_d2, ctx.th(1, 1), ctx.th(1, 2)) {
        return (true, 1);
    }
    let rescued = ctx.both(draws.s_d1, g.s_d1, ctx.th(2, 1), ctx.th(2, 2))
        && ctx.oma(draws.d1_d2, g.relay, ctx.th(2, 2));
    (rescued, 2)
}

pub fn evaluate_acn_d1(draws: &SlotDraws, scene: &Scene, th: &Thresholds) -> Result<bool> {
    Ok(acn_d1(draws, &DecisionContext::with_thresholds(scene, *th)?).0)
}

pub fn evaluate_acn_d2(draws: &SlotDraws, scene: &Scene, th: &Thresholds) -> Result<bool> {
    Ok(acn_d2(draws, &DecisionContext::with_thresholds(scene, *th)?).0)
}

/// Outcome of `kind` on one set of draws.
pub fn decide(kind: ProtocolKind, draws: &SlotDraws, ctx: &DecisionContext) -> ProtocolOutcome {
    let g = ctx.gains;
    let outcome = |d1: bool, d2: bool, phases: [u8; 2]| ProtocolOutcome {
        d1_success: d1,
        d2_success: d2,
        phases_used: phases,
    };
    match kind {
        ProtocolKind::Acn => {
            let (d1, p1) = acn_d1(draws, ctx);
            let (d2, p2) = acn_d2(draws, ctx);
            outcome(d1, d2, [p1, p2])
        }
        ProtocolKind::DirectNoma => {
            let d1 = ctx.strong(draws.s_d1, g.s_d1, ctx.th(1, 1));
            let d2 = ctx.both(draws.s_d2, g.s_d2, ctx.th(1, 1), ctx.th(1, 2));
            outcome(d1, d2, [1, 1])
        }
        ProtocolKind::Ccn => {
            let (t1, t2) = (ctx.th(2, 1), ctx.th(2, 2));
            let d1 = ctx.strong(draws.s_d1, g.s_d1, t1)
                || (ctx.strong(draws.s_d2, g.s_d2, t1) && ctx.oma(draws.d2_d1, g.relay, t1));
            let d2 = ctx.both(draws.s_d2, g.s_d2, t1, t2)
                || (ctx.both(draws.s_d1, g.s_d1, t1, t2) && ctx.oma(draws.d1_d2, g.relay, t2));
            outcome(d1, d2, [2, 2])
        }
        ProtocolKind::CoopNoma => {
            let (t1, t2) = (ctx.th(2, 1), ctx.th(2, 2));
            let d1 = ctx.strong(draws.s_d2, g.s_d2, t1) && ctx.strong(draws.d2_d1, g.relay, t1);
            let d2 = ctx.both(draws.s_d1, g.s_d1, t1, t2) && ctx.both(draws.d1_d2, g.relay, t1, t2);
            outcome(d1, d2, [2, 2])
        }
        ProtocolKind::CoopOma => {
            let (t1, t2) = (ctx.th(2, 1), ctx.th(2, 2));
            let d1 = ctx.oma(draws.s_d1, g.s_d1, t1)
                || (ctx.oma(draws.s_d2, g.s_d2, t1) && ctx.oma(draws.d2_d1, g.relay, t1));
            let d2 = ctx.oma(draws.s_d2, g.s_d2, t2)
                || (ctx.oma(draws.s_d1, g.s_d1, t2) && ctx.oma(draws.d1_d2, g.relay, t2));
            outcome(d1, d2, [2, 2])
        }
    }
}

/// Outcome of any protocol, including ACN, from a scene and thresholds.
pub fn evaluate_baseline(
    kind: ProtocolKind,
    draws: &SlotDraws,
    scene: &Scene,
    th: &Thresholds,
) -> Result<ProtocolOutcome> {
    Ok(decide(
        kind,
        draws,
        &DecisionContext::with_thresholds(scene, *th)?,
    ))
}
