//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any criterion fails.

mod common;

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4};
use std::process::ExitCode;
use std::sync::OnceLock;
use std::time::Instant;

use acn_core::analytic::{acn_outage, direct_noma_outage};
use acn_core::experiments::sweep::deviation_z;
use acn_core::experiments::{parse_config, to_csv, Estimator, ExperimentConfig, ResultTable};
use acn_core::interference::{
    aggregate_at, far_field_mean, laplace_x, laplace_y, numerical_laplace, sample_field, Road,
    DEFAULT_WINDOW,
};
use acn_core::montecarlo::{paired_dominance, run_trials, trial_rng, McConfig, Mode};
use acn_core::{Destination, Position, ProtocolKind, Scene};
use common::{desk_scene, oracle_mismatches};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const Z_LIMIT: f64 = 3.0;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn check(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn preset(name: &str) -> ExperimentConfig {
    let text = match name {
        "fig4" => include_str!("../../../presets/fig4_lambda.conf"),
        "fig6" => include_str!("../../../presets/fig6_distance.conf"),
        _ => unreachable!(),
    };
    parse_config(text).expect("preset parses")
}

// Laplace transforms of both roads: empirical against the closed forms.
fn laplace_keystone() -> Outcome {
    const N: u64 = 100_000;
    let s_levels = [0.1, 1.0, 10.0];
    let d_levels = [0.0, 50.0, 200.0];
    let theta_levels = [0.0, FRAC_PI_4, FRAC_PI_2];
    let lambda_levels = [0.001, 0.01];
    let p_levels = [0.5, 1.0];

    // closed form vs quadrature over the full grid
    let mut worst_rel = 0.0f64;
    for &s in &s_levels {
        for &d in &d_levels {
            for &t in &theta_levels {
                for &l in &lambda_levels {
                    for &p in &p_levels {
                        let rx = Position::from_polar(d, t);
                        let nx = numerical_laplace(s, rx, Road::X, 2.0, l, p)
                            .map_err(|e| e.to_string())?;
                        let ny = numerical_laplace(s, rx, Road::Y, 2.0, l, p)
                            .map_err(|e| e.to_string())?;
                        // compare exponents: the transforms themselves sit within 1e-16 of 1 here
                        let rel = |num: f64, closed: f64| (num.ln() / closed.ln() - 1.0).abs();
                        let ex = rel(nx, laplace_x(s, d, t, l, p));
                        let ey = rel(ny, laplace_y(s, d, t, l, p));
                        if !(ex <= 1e-6 && ey <= 1e-6) {
                            return Err(format!(
                                "quadrature mismatch at s {s} d {d} theta {t} lambda {l} p {p}"
                            ));
                        }
                        worst_rel = worst_rel.max(ex).max(ey);
                    }
                }
            }
        }
    }

    // empirical transform of the total interference, one statistic per
    // combination: three rows of a Latin square in (s, d, theta) per (lambda, p)
    let mut combos = 0;
    let mut worst_z = 0.0f64;
    let mut worst_at = String::new();
    for (k, (l, p)) in lambda_levels
        .iter()
        .flat_map(|&l| p_levels.iter().map(move |&p| (l, p)))
        .enumerate()
    {
        let receivers: Vec<(f64, f64, f64)> = (0..3)
            .map(|i| {
                (
                    s_levels[i],
                    d_levels[(i + k) % 3],
                    theta_levels[(i + 2 * k) % 3],
                )
            })
            .collect();
        let positions: Vec<Position> = receivers
            .iter()
            .map(|&(_, d, t)| Position::from_polar(d, t))
            .collect();
        let far: Vec<_> = positions
            .iter()
            .map(|&rx| far_field_mean(rx, 2.0, l, l, p, DEFAULT_WINDOW))
            .collect::<Result<_, _>>()
            .map_err(|e| e.to_string())?;
        // per receiver: sum and sum of squares of e^{-sI}
        let mut acc = vec![[0.0f64; 2]; receivers.len()];
        for trial in 0..N {
            let mut rng = trial_rng(1_000 + k as u64, trial);
            let field = sample_field(l, l, p, DEFAULT_WINDOW, &mut rng);
            for (j, &(s, _, _)) in receivers.iter().enumerate() {
                let agg = aggregate_at(&field, positions[j], 2.0, &mut rng).interference;
                let e = (-s * (agg.i_x + far[j].i_x + agg.i_y + far[j].i_y)).exp();
                acc[j][0] += e;
                acc[j][1] += e * e;
            }
        }
        let n = N as f64;
        for (j, &(s, d, t)) in receivers.iter().enumerate() {
            let exact = laplace_x(s, d, t, l, p) * laplace_y(s, d, t, l, p);
            let mean = acc[j][0] / n;
            let se = ((acc[j][1] / n - mean * mean).max(0.0) / n).sqrt();
            let (_, z) = deviation_z(exact, mean, se, N);
            if z > worst_z {
                worst_z = z;
                worst_at =
                    format!("s {s} d {d} theta {t:.4} lambda {l} p {p}: {mean:.6} vs {exact:.6}");
            }
            combos += 1;
        }
    }
    check(
        worst_z <= Z_LIMIT && worst_rel <= 1e-6,
        format!(
            "{combos} combos at {N} realizations: max |z| = {worst_z:.2} (limit {Z_LIMIT}) at {worst_at}; \
             closed form vs quadrature on 108 points: max rel err of the exponent = {worst_rel:.1e} (limit 1e-6)"
        ),
    )
}

// ACN closed forms against factorized simulation on six desk-scale scenes.
fn acn_crosscheck() -> Outcome {
    let cfg = McConfig {
        trials: 200_000,
        seed: 2,
        mode: Mode::Factorized,
        ..McConfig::default()
    };
    let mut worst = (0.0f64, String::new());
    for lambda in [0.001, 0.005, 0.02] {
        for a1 in [0.7, 0.9] {
            let scene = desk_scene(lambda, a1, 0.5, 1.0);
            let run = run_trials(&scene, &[ProtocolKind::Acn], &cfg).map_err(|e| e.to_string())?;
            for dest in Destination::BOTH {
                let exact = acn_outage(&scene, dest).map_err(|e| e.to_string())?.p_out;
                let mc = run.get(ProtocolKind::Acn, dest).unwrap();
                let (_, z) = deviation_z(exact, mc.p_out, mc.stderr, mc.trials);
                if z >= worst.0 {
                    worst = (
                        z,
                        format!(
                            "lambda {lambda} a1 {a1} {}: {:.5} vs {exact:.5}",
                            dest.name(),
                            mc.p_out
                        ),
                    );
                }
            }
        }
    }
    check(
        worst.0 <= Z_LIMIT,
        format!(
            "6 scenes x 2 destinations at 200000 trials: max |z| = {:.2} ({})",
            worst.0, worst.1
        ),
    )
}

// Exact zeros and ones in the degenerate corners.
fn degenerate_exactness() -> Outcome {
    let cfg = McConfig {
        trials: 20_000,
        seed: 3,
        ..McConfig::default()
    };
    let mut problems = Vec::new();

    let quiet = desk_scene(0.0, 0.8, 0.5, 1.0);
    let run = run_trials(&quiet, &ProtocolKind::ALL, &cfg).map_err(|e| e.to_string())?;
    for e in &run.estimates {
        if e.failures != 0 {
            problems.push(format!(
                "lambda 0: {} {} failed {} times",
                e.protocol,
                e.destination.name(),
                e.failures
            ));
        }
    }
    for dest in Destination::BOTH {
        for (name, p) in [
            ("acn", acn_outage(&quiet, dest).map(|o| o.p_out)),
            (
                "direct_noma",
                direct_noma_outage(&quiet, dest).map(|o| o.p_out),
            ),
        ] {
            if p != Ok(0.0) {
                problems.push(format!("lambda 0 analytic {name} {}: {p:?}", dest.name()));
            }
        }
    }

    // both D1 thresholds at or above the a1/a2 = 4 ceiling
    for (lambda, r1) in [(0.0, 2.5), (0.005, 2.5), (0.005, 5f64.log2())] {
        let dead = desk_scene(lambda, 0.8, r1, 1.0);
        let exact = acn_outage(&dead, Destination::D1)
            .map_err(|e| e.to_string())?
            .p_out;
        let run = run_trials(&dead, &[ProtocolKind::Acn], &cfg).map_err(|e| e.to_string())?;
        let mc = run.get(ProtocolKind::Acn, Destination::D1).unwrap();
        if exact != 1.0 || mc.failures != mc.trials {
            problems.push(format!(
                "infeasible lambda {lambda} r1 {r1}: analytic {exact}, mc {}/{}",
                mc.failures, mc.trials
            ));
        }
    }
    check(
        problems.is_empty(),
        if problems.is_empty() {
            "lambda = 0: every protocol 0 failures in 20000 trials, analytic 0; \
             infeasible D1 SIC: analytic 1 and every trial fails"
                .to_string()
        } else {
            problems.join("; ")
        },
    )
}

fn fig4_table() -> &'static ResultTable {
    static TABLE: OnceLock<ResultTable> = OnceLock::new();
    TABLE.get_or_init(|| preset("fig4").run().expect("fig4 sweep runs"))
}

fn mc_row(t: &ResultTable, v: f64, k: ProtocolKind, d: Destination) -> (f64, f64) {
    let r = t.get(v, k, d, Estimator::Mc).expect("mc row");
    (r.p_out, r.stderr)
}

// ACN never loses to direct NOMA on shared draws, and beats the
// cooperative baselines on the fig-4 grid.
fn dominance() -> Outcome {
    let fig4 = preset("fig4");
    let cfg = McConfig {
        trials: 50_000,
        seed: 4,
        ..McConfig::default()
    };
    let mut violations = 0;
    for lambda in [0.001, 0.005, 0.02] {
        let scene = Scene {
            lambda_x: lambda,
            lambda_y: lambda,
            ..fig4.scene.clone()
        };
        let r = paired_dominance(&scene, ProtocolKind::Acn, ProtocolKind::DirectNoma, &cfg)
            .map_err(|e| e.to_string())?;
        violations += r.violations[0] + r.violations[1];
    }

    let table = fig4_table();
    let mut worst = (f64::NEG_INFINITY, String::new());
    for &v in &fig4.sweep.values {
        for dest in Destination::BOTH {
            let (acn, se_a) = mc_row(table, v, ProtocolKind::Acn, dest);
            for other in [ProtocolKind::CoopNoma, ProtocolKind::CoopOma] {
                let (p, se_o) = mc_row(table, v, other, dest);
                let joint = se_a.hypot(se_o);
                // excess of ACN over the baseline, in joint stderr
                let excess = if joint > 0.0 {
                    (acn - p) / joint
                } else if acn > p {
                    f64::INFINITY
                } else {
                    0.0
                };
                if excess > worst.0 {
                    worst = (excess, format!("{other} {} at lambda {v}", dest.name()));
                }
            }
        }
    }
    check(
        violations == 0 && worst.0 <= Z_LIMIT,
        format!(
            "paired ACN vs direct_noma: {violations} violations in 3 x 50000 trials; \
             unpaired ACN minus coop_noma/coop_oma on fig-4 grid: max {:.2} joint stderr ({})",
            worst.0, worst.1
        ),
    )
}

// Outage grows with intensity and near the intersection.
fn monotonicity() -> Outcome {
    let fig4 = preset("fig4");
    let table = fig4_table();
    let mut worst_mc = f64::NEG_INFINITY;
    let mut worst_an = f64::NEG_INFINITY;
    let mut values = fig4.sweep.values.clone();
    values.sort_by(f64::total_cmp);
    for w in values.windows(2) {
        for kind in ProtocolKind::ALL {
            for dest in Destination::BOTH {
                let (lo, se_lo) = mc_row(table, w[0], kind, dest);
                let (hi, se_hi) = mc_row(table, w[1], kind, dest);
                let joint = se_lo.hypot(se_hi);
                let drop = lo - hi;
                worst_mc = worst_mc.max(if joint > 0.0 {
                    drop / joint
                } else if drop > 0.0 {
                    f64::INFINITY
                } else {
                    0.0
                });
                if let (Some(a), Some(b)) = (
                    table.get(w[0], kind, dest, Estimator::Analytic),
                    table.get(w[1], kind, dest, Estimator::Analytic),
                ) {
                    worst_an = worst_an.max(a.p_out - b.p_out);
                }
            }
        }
    }

    let mut fig6 = preset("fig6");
    fig6.sweep.values = vec![0.0, 500.0];
    fig6.sweep.protocols = ProtocolKind::ALL.to_vec();
    let t6 = fig6.run().map_err(|e| e.to_string())?;
    let mut worst_d = (f64::NEG_INFINITY, String::new());
    for kind in ProtocolKind::ALL {
        for dest in Destination::BOTH {
            let (near, se_n) = mc_row(&t6, 0.0, kind, dest);
            let (far, se_f) = mc_row(&t6, 500.0, kind, dest);
            let joint = se_n.hypot(se_f);
            let drop = far - near;
            let z = if joint > 0.0 {
                drop / joint
            } else if drop > 0.0 {
                f64::INFINITY
            } else {
                0.0
            };
            if z > worst_d.0 {
                worst_d = (
                    z,
                    format!(
                        "{kind} {}: {near:.4} at 0 m vs {far:.4} at 500 m",
                        dest.name()
                    ),
                );
            }
        }
    }
    check(
        worst_mc <= Z_LIMIT && worst_an <= 1e-12 && worst_d.0 <= Z_LIMIT,
        format!(
            "lambda sweep: max MC drop {worst_mc:.2} joint stderr, max analytic drop {worst_an:.1e}; \
             distance 0 vs 500 m: max shortfall {:.2} joint stderr ({})",
            worst_d.0, worst_d.1
        ),
    )
}

// Protocol decisions against independent truth tables.
fn event_algebra() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut total = 0;
    for kind in ProtocolKind::ALL {
        total += oracle_mismatches(kind, 10_000, &mut rng).0;
    }
    check(
        total == 0,
        format!("5 protocols x 10000 random cases: {total} mismatches"),
    )
}

// Identical bytes at any thread count.
fn reproducibility() -> Outcome {
    let mut cfg = preset("fig4");
    cfg.mc.trials = 10_000;
    let max = std::thread::available_parallelism().map_or(1, |n| n.get());
    let mut outputs = Vec::new();
    for threads in [Some(1), Some(4), None] {
        cfg.mc.threads = threads;
        outputs.push(to_csv(&cfg.run().map_err(|e| e.to_string())?));
    }
    let same = outputs.windows(2).all(|w| w[0] == w[1]);
    check(
        same,
        format!(
            "fig-4 sweep CSV ({} bytes) at 1, 4 and {max} threads: {}",
            outputs[0].len(),
            if same { "byte-identical" } else { "differs" }
        ),
    )
}

fn main() -> ExitCode {
    let criteria: [Criterion; 7] = [
        ("laplace keystone", laplace_keystone),
        ("acn closed-form cross-check", acn_crosscheck),
        ("degenerate exactness", degenerate_exactness),
        ("dominance", dominance),
        ("monotonicity", monotonicity),
        ("event-algebra oracle", event_algebra),
        ("reproducibility", reproducibility),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = std::panic::catch_unwind(run).unwrap_or_else(|_| Err("panicked".into()));
        let secs = start.elapsed().as_secs_f64();
        let (tag, detail) = match outcome {
            Ok(d) => ("PASS", d),
            Err(d) => {
                failed += 1;
                ("FAIL", d)
            }
        };
        println!("criterion {} {tag} {name} [{secs:.1}s]: {detail}", i + 1);
    }
    println!(
        "acceptance: {} of {} criteria passed",
        criteria.len() - failed,
        criteria.len()
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
