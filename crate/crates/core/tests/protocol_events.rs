mod common;

use acn_core::protocols::{evaluate_baseline, LinkDraw, ProtocolOutcome, SlotDraws};
use acn_core::{Destination, ProtocolKind, Scene};
use common::{oracle_mismatches, random_case};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn outcome(kind: ProtocolKind, scene: &Scene, draws: &SlotDraws) -> ProtocolOutcome {
    evaluate_baseline(kind, draws, scene, &scene.thresholds()).unwrap()
}

fn links(d: &mut SlotDraws) -> [&mut LinkDraw; 4] {
    [&mut d.s_d1, &mut d.s_d2, &mut d.d2_d1, &mut d.d1_d2]
}

#[test]
fn decisions_match_truth_tables() {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    for kind in ProtocolKind::ALL {
        let (bad, successes) = oracle_mismatches(kind, 10_000, &mut rng);
        assert_eq!(bad, 0, "{kind}");
        // both outcomes occur often enough for the comparison to mean something
        for s in successes {
            assert!((100..9_900).contains(&s), "{kind}: {successes:?}");
        }
    }
}

#[test]
fn acn_success_contains_direct_noma_success() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..10_000 {
        let c = random_case(&mut rng);
        let acn = outcome(ProtocolKind::Acn, &c.scene, &c.draws);
        let direct = outcome(ProtocolKind::DirectNoma, &c.scene, &c.draws);
        for dest in Destination::BOTH {
            assert!(!direct.success(dest) || acn.success(dest));
        }
    }
}

#[test]
fn more_fading_or_less_interference_never_hurts() {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    for _ in 0..4_000 {
        let c = random_case(&mut rng);
        let which = rng.random_range(0..4);
        let factor = rng.random_range(1.0..10.0);

        let mut stronger = c.draws;
        links(&mut stronger)[which].fading *= factor;
        let mut noisier = c.draws;
        {
            let l = links(&mut noisier).into_iter().nth(which).unwrap();
            if rng.random_bool(0.5) {
                l.interference.i_x = l.interference.i_x * factor + 1e-9;
            } else {
                l.interference.i_y = l.interference.i_y * factor + 1e-9;
            }
        }
        for kind in ProtocolKind::ALL {
            let base = outcome(kind, &c.scene, &c.draws);
            let up = outcome(kind, &c.scene, &stronger);
            let down = outcome(kind, &c.scene, &noisier);
            for dest in Destination::BOTH {
                assert!(
                    !base.success(dest) || up.success(dest),
                    "{kind} {dest:?} fading"
                );
                assert!(
                    base.success(dest) || !down.success(dest),
                    "{kind} {dest:?} interference"
                );
            }
        }
    }
}

#[test]
fn higher_rates_never_help() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..4_000 {
        let c = random_case(&mut rng);
        let mut harder = c.scene.clone();
        if rng.random_bool(0.5) {
            harder.r1 += rng.random_range(0.0..1.0);
        } else {
            harder.r2 += rng.random_range(0.0..1.0);
        }
        for kind in ProtocolKind::ALL {
            let base = outcome(kind, &c.scene, &c.draws);
            let hard = outcome(kind, &harder, &c.draws);
            for dest in Destination::BOTH {
                assert!(base.success(dest) || !hard.success(dest), "{kind} {dest:?}");
            }
        }
    }
}
