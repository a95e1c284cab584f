//! Shared fixtures for the integration tests: a random case generator and
//! a truth-table evaluator for the protocol decisions that is written
//! without any of the library's SIR helpers.

#![allow(dead_code)]

use acn_core::interference::AggregateInterference;
use acn_core::link::{PowerSplit, SIC_MARGIN};
use acn_core::protocols::{LinkDraw, SlotDraws};
use acn_core::{Position, ProtocolKind, Scene};
use rand::Rng;

pub fn desk_scene(lambda: f64, a1: f64, r1: f64, r2: f64) -> Scene {
    Scene {
        source: Position::new(0.0, 100.0),
        dest1: Position::ORIGIN,
        dest2: Position::new(100.0, 100.0),
        alpha: 2.0,
        lambda_x: lambda,
        lambda_y: lambda,
        aloha_p: 0.5,
        split: PowerSplit::from_a1(a1).unwrap(),
        r1,
        r2,
    }
}

pub struct Case {
    pub scene: Scene,
    pub draws: SlotDraws,
}

fn random_link<R: Rng>(rng: &mut R, gain: f64) -> LinkDraw {
    let fading = if rng.random_bool(0.05) {
        0.0
    } else {
        -(1.0 - rng.random::<f64>()).ln() * 10f64.powf(rng.random_range(-1.0..1.0))
    };
    let mut road = || {
        if rng.random_bool(0.15) {
            0.0
        } else {
            gain * 10f64.powf(rng.random_range(-3.0..1.0))
        }
    };
    LinkDraw {
        fading,
        interference: AggregateInterference {
            i_x: road(),
            i_y: road(),
        },
    }
}

fn random_position<R: Rng>(rng: &mut R) -> Position {
    Position::new(
        rng.random_range(-250.0..250.0),
        rng.random_range(-250.0..250.0),
    )
}

/// Random scene and draws, tuned so that SIRs land near the thresholds
/// and every branch of every protocol is exercised.
pub fn random_case<R: Rng>(rng: &mut R) -> Case {
    loop {
        let (a1, r1) = if rng.random_bool(0.05) {
            // exactly on the a1/a2 = 4 ceiling
            (0.8, 5f64.log2())
        } else {
            (rng.random_range(0.5..0.95), rng.random_range(0.1..2.5))
        };
        let scene = Scene {
            source: random_position(rng),
            dest1: random_position(rng),
            dest2: random_position(rng),
            alpha: [2.0, 3.0, 4.0][rng.random_range(0..3)],
            lambda_x: 0.01,
            lambda_y: 0.01,
            aloha_p: 0.5,
            split: PowerSplit::from_a1(a1).unwrap(),
            r1,
            r2: rng.random_range(0.1..2.5),
        };
        if scene.validate().is_err() {
            continue;
        }
        let gain = |a: Position, b: Position| (a.x - b.x).hypot(a.y - b.y).powf(-scene.alpha);
        let draws = SlotDraws {
            s_d1: random_link(rng, gain(scene.source, scene.dest1)),
            s_d2: random_link(rng, gain(scene.source, scene.dest2)),
            d2_d1: random_link(rng, gain(scene.dest2, scene.dest1)),
            d1_d2: random_link(rng, gain(scene.dest1, scene.dest2)),
        };
        return Case { scene, draws };
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
enum Hop {
    SD1,
    SD2,
    D2D1,
    D1D2,
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
enum Decode {
    /// First SIC stage: D1's message.
    First,
    /// Both SIC stages: D1's then D2's message.
    Both,
    /// Single message at full power, for message 1 or 2.
    Oma(usize),
}

/// Atomic decoding event: hop, decoding kind, number of phases the
/// thresholds are spread over.
type Atom = (Hop, Decode, u32);

/// Disjunction of conjunctions of atoms.
type Dnf = &'static [&'static [Atom]];

use Decode::*;
use Hop::*;

const ACN_D1: Dnf = &[&[(SD1, First, 1)], &[(SD2, First, 2), (D2D1, Oma(1), 2)]];
const ACN_D2: Dnf = &[&[(SD2, Both, 1)], &[(SD1, Both, 2), (D1D2, Oma(2), 2)]];
const DIRECT_D1: Dnf = &[&[(SD1, First, 1)]];
const DIRECT_D2: Dnf = &[&[(SD2, Both, 1)]];
const CCN_D1: Dnf = &[&[(SD1, First, 2)], &[(SD2, First, 2), (D2D1, Oma(1), 2)]];
const CCN_D2: Dnf = &[&[(SD2, Both, 2)], &[(SD1, Both, 2), (D1D2, Oma(2), 2)]];
const COOP_NOMA_D1: Dnf = &[&[(SD2, First, 2), (D2D1, First, 2)]];
const COOP_NOMA_D2: Dnf = &[&[(SD1, Both, 2), (D1D2, Both, 2)]];
const COOP_OMA_D1: Dnf = &[&[(SD1, Oma(1), 2)], &[(SD2, Oma(1), 2), (D2D1, Oma(1), 2)]];
const COOP_OMA_D2: Dnf = &[&[(SD2, Oma(2), 2)], &[(SD1, Oma(2), 2), (D1D2, Oma(2), 2)]];

fn table(kind: ProtocolKind) -> [Dnf; 2] {
    match kind {
        ProtocolKind::Acn => [ACN_D1, ACN_D2],
        ProtocolKind::DirectNoma => [DIRECT_D1, DIRECT_D2],
        ProtocolKind::Ccn => [CCN_D1, CCN_D2],
        ProtocolKind::CoopNoma => [COOP_NOMA_D1, COOP_NOMA_D2],
        ProtocolKind::CoopOma => [COOP_OMA_D1, COOP_OMA_D2],
    }
}

fn atom_holds(case: &Case, (hop, decode, phases): Atom) -> bool {
    let s = &case.scene;
    let (link, tx, rx) = match hop {
        SD1 => (case.draws.s_d1, s.source, s.dest1),
        SD2 => (case.draws.s_d2, s.source, s.dest2),
        D2D1 => (case.draws.d2_d1, s.dest2, s.dest1),
        D1D2 => (case.draws.d1_d2, s.dest1, s.dest2),
    };
    let gain = (tx.x - rx.x).hypot(tx.y - rx.y).powf(-s.alpha);
    let received = link.fading * gain;
    let noise = link.interference.i_x + link.interference.i_y;
    let theta = |rate: f64| 2f64.powf(phases as f64 * rate) - 1.0;
    let (t1, t2) = (theta(s.r1), theta(s.r2));
    let (a1, a2) = (s.split.a1(), s.split.a2());
    // received·(a1 - t a2) ≥ t·I, with the ceiling t < a1/a2
    let first = || {
        let margin = a1 - t1 * a2;
        if margin <= SIC_MARGIN * a1 {
            false
        } else if noise == 0.0 {
            received > 0.0
        } else {
            received * margin >= t1 * noise
        }
    };
    let above = |power: f64, t: f64| noise == 0.0 || power >= t * noise;
    match decode {
        First => first(),
        Both => first() && above(received * a2, t2),
        Oma(1) => above(received, t1),
        Oma(_) => above(received, t2),
    }
}

fn dnf_holds(case: &Case, dnf: Dnf) -> bool {
    dnf.iter()
        .any(|clause| clause.iter().all(|&a| atom_holds(case, a)))
}

/// Success of D1 and D2 and the phases used, per the truth tables.
pub fn oracle(kind: ProtocolKind, case: &Case) -> ([bool; 2], [u8; 2]) {
    let [d1, d2] = table(kind);
    let success = [dnf_holds(case, d1), dnf_holds(case, d2)];
    let phases = match kind {
        ProtocolKind::DirectNoma => [1, 1],
        ProtocolKind::Acn => [
            if dnf_holds(case, DIRECT_D1) { 1 } else { 2 },
            if dnf_holds(case, DIRECT_D2) { 1 } else { 2 },
        ],
        _ => [2, 2],
    };
    (success, phases)
}

/// Runs the oracle against the library on `n` random cases of `kind`;
/// returns the number of mismatches and how often each destination
/// succeeded.
pub fn oracle_mismatches<R: Rng>(kind: ProtocolKind, n: usize, rng: &mut R) -> (usize, [usize; 2]) {
    use acn_core::protocols::evaluate_baseline;
    let mut mismatches = 0;
    let mut successes = [0; 2];
    for _ in 0..n {
        let case = random_case(rng);
        let th = case.scene.thresholds();
        let got = evaluate_baseline(kind, &case.draws, &case.scene, &th).unwrap();
        let (want, phases) = oracle(kind, &case);
        if [got.d1_success, got.d2_success] != want || got.phases_used != phases {
            mismatches += 1;
        }
        successes[0] += usize::from(want[0]);
        successes[1] += usize::from(want[1]);
    }
    (mismatches, successes)
}
