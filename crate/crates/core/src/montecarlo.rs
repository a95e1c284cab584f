//! Seeded, parallel Monte-Carlo estimation of outage probabilities.
//!
//! Each trial owns a ChaCha8 stream selected by its index, so results do
//! not depend on batch size or thread count: batches only group trials,
//! and the reduction adds integer counts.

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp1};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::geometry::{Destination, Position, Scene};
use crate::interference::{
    aggregate_at, far_field_mean, sample_field, AggregateInterference, DEFAULT_WINDOW,
};
use crate::protocols::{decide, DecisionContext, LinkDraw, ProtocolKind, SlotDraws};

pub const DEFAULT_TRIALS: u64 = 50_000;
pub const DEFAULT_BATCH: u64 = 1_000;

/// Salt separating the correlated-mode streams from the factorized ones
/// in [`compare_modes`].
const MODE_SEED_SALT: u64 = 0x9E37_79B9_7F4A_7C15;
const STREAM_TRIAL_BITS: u32 = 48;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Mode {
    /// Every (receiver, slot) pair sees its own interferer realization.
    Factorized,
    /// One interferer realization per trial shared by all receivers and
    /// both slots; fading is fresh per link and slot.
    Correlated,
}

impl Mode {
    pub fn name(self) -> &'static str {
        match self {
            Mode::Factorized => "factorized",
            Mode::Correlated => "correlated",
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Mode {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s.trim().to_ascii_lowercase().as_str() {
            "factorized" => Ok(Mode::Factorized),
            "correlated" => Ok(Mode::Correlated),
            other => Err(format!("expected factorized or correlated, got `{other}`")),
        }
    }
}

/// Whether protocols evaluated in the same run share their draws.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Pairing {
    Paired,
    Unpaired,
}

impl Pairing {
    pub fn name(self) -> &'static str {
        match self {
            Pairing::Paired => "paired",
            Pairing::Unpaired => "unpaired",
        }
    }
}

impl FromStr for Pairing {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s.trim().to_ascii_lowercase().as_str() {
            "paired" => Ok(Pairing::Paired),
            "unpaired" => Ok(Pairing::Unpaired),
            other => Err(format!("expected paired or unpaired, got `{other}`")),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct McConfig {
    pub trials: u64,
    pub seed: u64,
    pub mode: Mode,
    /// Half-width of the sampled stretch of each road, meters.
    pub window: f64,
    /// Trials per work item.
    pub batch: u64,
    pub pairing: Pairing,
    /// Worker threads; `None` uses every available core.
    pub threads: Option<usize>,
}

impl Default for McConfig {
    fn default() -> Self {
        McConfig {
            trials: DEFAULT_TRIALS,
            seed: 0,
            mode: Mode::Factorized,
            window: DEFAULT_WINDOW,
            batch: DEFAULT_BATCH,
            pairing: Pairing::Unpaired,
            threads: None,
        }
    }
}

impl McConfig {
    pub fn validate(&self) -> Result<()> {
        if self.trials == 0 {
            return Err(Error::ZeroTrials);
        }
        if self.trials >= 1 << STREAM_TRIAL_BITS {
            return Err(Error::config("mc.trials", "must be below 2^48"));
        }
        if self.batch == 0 {
            return Err(Error::config("mc.batch", "must be at least 1"));
        }
        if !(self.window > 0.0) || !self.window.is_finite() {
            return Err(Error::config("mc.window", "must be a positive length"));
        }
        if self.threads == Some(0) {
            return Err(Error::config("mc.threads", "must be at least 1"));
        }
        Ok(())
    }
}

/// Outage estimate of one protocol at one destination.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OutageEstimate {
    pub protocol: ProtocolKind,
    pub destination: Destination,
    pub p_out: f64,
    pub stderr: f64,
    /// Normal-approximation 95% interval, clamped to `[0, 1]`.
    pub ci95: (f64, f64),
    pub trials: u64,
    pub failures: u64,
    pub phases_mean: f64,
}

impl OutageEstimate {
    pub fn from_counts(
        protocol: ProtocolKind,
        destination: Destination,
        failures: u64,
        trials: u64,
        phase_sum: u64,
    ) -> Self {
        let n = trials as f64;
        let p = failures as f64 / n;
        let stderr = (p * (1.0 - p) / n).sqrt();
        OutageEstimate {
            protocol,
            destination,
            p_out: p,
            stderr,
            ci95: ((p - 1.96 * stderr).max(0.0), (p + 1.96 * stderr).min(1.0)),
            trials,
            failures,
            phases_mean: phase_sum as f64 / n,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct McRun {
    pub estimates: Vec<OutageEstimate>,
    /// Interferer positions re-drawn for landing on a receiver.
    pub redraws: u64,
}

impl McRun {
    pub fn get(&self, kind: ProtocolKind, dest: Destination) -> Option<&OutageEstimate> {
        self.estimates
            .iter()
            .find(|e| e.protocol == kind && e.destination == dest)
    }
}

/// RNG for one trial: the run seed selects the key, the stream id the
/// ChaCha stream.
pub fn trial_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Per-batch accumulator merged by the parallel reduction.
pub trait Tally: Send + Sized {
    fn merge(self, other: Self) -> Self;
}

impl Tally for u64 {
    fn merge(self, other: Self) -> Self {
        self + other
    }
}

fn in_pool<T: Send>(threads: Option<usize>, job: impl FnOnce() -> T + Send) -> Result<T> {
    match threads {
        None => Ok(job()),
        Some(n) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build()
                .map_err(|e| Error::ThreadPool(e.to_string()))?;
            Ok(pool.install(job))
        }
    }
}

/// Runs `trial(index, tally)` for every trial index, in batches of
/// `batch`, on `threads` workers, and merges the per-batch tallies.
pub fn run_batched<T, I, F>(
    trials: u64,
    batch: u64,
    threads: Option<usize>,
    init: I,
    trial: F,
) -> Result<T>
where
    T: Tally,
    I: Fn() -> T + Sync + Send,
    F: Fn(u64, &mut T) + Sync + Send,
{
    if trials == 0 {
        return Err(Error::ZeroTrials);
    }
    let batch = batch.max(1);
    let batches = trials.div_ceil(batch);
    in_pool(threads, || {
        (0..batches)
            .into_par_iter()
            .map(|b| {
                let mut tally = init();
                for i in b * batch..((b + 1) * batch).min(trials) {
                    trial(i, &mut tally);
                }
                tally
            })
            .reduce(&init, Tally::merge)
    })
}

/// Counts trials for which `event` returns true, each trial drawing from
/// its own stream.
pub fn count_successes<F>(
    trials: u64,
    seed: u64,
    batch: u64,
    threads: Option<usize>,
    event: F,
) -> Result<u64>
where
    F: Fn(&mut ChaCha8Rng) -> bool + Sync + Send,
{
    run_batched(
        trials,
        batch,
        threads,
        || 0u64,
        |i, n| {
            let mut rng = trial_rng(seed, i);
            *n += u64::from(event(&mut rng));
        },
    )
}

/// Turns a scene into per-trial [`SlotDraws`].
#[derive(Debug, Clone)]
pub struct TrialSampler {
    scene: Scene,
    mode: Mode,
    window: f64,
    far_d1: AggregateInterference,
    far_d2: AggregateInterference,
}

impl TrialSampler {
    pub fn new(scene: &Scene, mode: Mode, window: f64) -> Result<Self> {
        scene.validate()?;
        let far = |rx: Position| {
            far_field_mean(
                rx,
                scene.alpha,
                scene.lambda_x,
                scene.lambda_y,
                scene.aloha_p,
                window,
            )
        };
        Ok(TrialSampler {
            scene: scene.clone(),
            mode,
            window,
            far_d1: far(scene.dest1)?,
            far_d2: far(scene.dest2)?,
        })
    }

    fn receiver(&self, dest: Destination) -> (Position, AggregateInterference) {
        match dest {
            Destination::D1 => (self.scene.dest1, self.far_d1),
            Destination::D2 => (self.scene.dest2, self.far_d2),
        }
    }

    fn field<R: Rng + ?Sized>(&self, rng: &mut R) -> crate::interference::InterfererField {
        let s = &self.scene;
        sample_field(s.lambda_x, s.lambda_y, s.aloha_p, self.window, rng)
    }

    /// Draws one trial; also returns the number of coincidence re-draws.
    pub fn draw<R: Rng + ?Sized>(&self, rng: &mut R) -> (SlotDraws, u32) {
        // receivers of s_d1, s_d2, d2_d1, d1_d2
        const RECEIVERS: [Destination; 4] = [
            Destination::D1,
            Destination::D2,
            Destination::D1,
            Destination::D2,
        ];
        let shared = match self.mode {
            Mode::Correlated => Some(self.field(rng)),
            Mode::Factorized => None,
        };
        let mut redraws = 0;
        let mut links = [LinkDraw::default(); 4];
        for (link, dest) in links.iter_mut().zip(RECEIVERS) {
            let (rx, far) = self.receiver(dest);
            let own;
            let field = match &shared {
                Some(f) => f,
                None => {
                    own = self.field(rng);
                    &own
                }
            };
            let agg = aggregate_at(field, rx, self.scene.alpha, rng);
            redraws += agg.redraws;
            *link = LinkDraw {
                fading: Exp1.sample(rng),
                interference: agg.interference.plus(far),
            };
        }
        let [s_d1, s_d2, d2_d1, d1_d2] = links;
        (
            SlotDraws {
                s_d1,
                s_d2,
                d2_d1,
                d1_d2,
            },
            redraws,
        )
    }
}

#[derive(Debug, Clone, Default)]
struct OutcomeTally {
    // [kind][dest] -> (failures, phase sum)
    counts: Vec<[(u64, u64); 2]>,
    redraws: u64,
}

impl Tally for OutcomeTally {
    fn merge(mut self, other: Self) -> Self {
        if self.counts.is_empty() {
            return other;
        }
        for (a, b) in self.counts.iter_mut().zip(other.counts) {
            for d in 0..2 {
                a[d].0 += b[d].0;
                a[d].1 += b[d].1;
            }
        }
        self.redraws += other.redraws;
        self
    }
}

fn stream_id(pairing: Pairing, kind: ProtocolKind, trial: u64) -> u64 {
    match pairing {
        Pairing::Paired => trial,
        Pairing::Unpaired => ((kind.index() as u64 + 1) << STREAM_TRIAL_BITS) | trial,
    }
}

/// Estimates the outage of every protocol in `kinds` at both
/// destinations.
pub fn run_trials(scene: &Scene, kinds: &[ProtocolKind], cfg: &McConfig) -> Result<McRun> {
    cfg.validate()?;
    let sampler = TrialSampler::new(scene, cfg.mode, cfg.window)?;
    let ctx = DecisionContext::new(scene)?;
    let k = kinds.len();
    let tally = run_batched(
        cfg.trials,
        cfg.batch,
        cfg.threads,
        || OutcomeTally {
            counts: vec![[(0, 0); 2]; k],
            redraws: 0,
        },
        |trial, tally| {
            let mut shared = None;
            for (slot, &kind) in kinds.iter().enumerate() {
                let draws = match (cfg.pairing, &shared) {
                    (Pairing::Paired, Some(d)) => *d,
                    _ => {
                        let mut rng = trial_rng(cfg.seed, stream_id(cfg.pairing, kind, trial));
                        let (d, r) = sampler.draw(&mut rng);
                        tally.redraws += u64::from(r);
                        shared = Some(d);
                        d
                    }
                };
                let outcome = decide(kind, &draws, &ctx);
                for dest in Destination::BOTH {
                    let c = &mut tally.counts[slot][dest.index()];
                    c.0 += u64::from(!outcome.success(dest));
                    c.1 += u64::from(outcome.phases(dest));
                }
            }
        },
    )?;
    let mut estimates = Vec::with_capacity(2 * k);
    for (slot, &kind) in kinds.iter().enumerate() {
        for dest in Destination::BOTH {
            let (failures, phases) = tally.counts[slot][dest.index()];
            estimates.push(OutageEstimate::from_counts(
                kind, dest, failures, cfg.trials, phases,
            ));
        }
    }
    Ok(McRun {
        estimates,
        redraws: tally.redraws,
    })
}

/// Factorized vs correlated estimate of one protocol at one destination.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModeComparison {
    pub factorized: OutageEstimate,
    pub correlated: OutageEstimate,
    pub gap: f64,
}

impl ModeComparison {
    /// Standard error of the difference of the two independent estimates.
    pub fn joint_stderr(&self) -> f64 {
        self.factorized.stderr.hypot(self.correlated.stderr)
    }
}

/// Runs `kind` in both interference modes on decorrelated seeds.
pub fn compare_modes(
    scene: &Scene,
    kind: ProtocolKind,
    cfg: &McConfig,
) -> Result<[ModeComparison; 2]> {
    let fact = run_trials(
        scene,
        &[kind],
        &McConfig {
            mode: Mode::Factorized,
            ..cfg.clone()
        },
    )?;
    let corr = run_trials(
        scene,
        &[kind],
        &McConfig {
            mode: Mode::Correlated,
            seed: cfg.seed ^ MODE_SEED_SALT,
            ..cfg.clone()
        },
    )?;
    Ok(Destination::BOTH.map(|dest| {
        let f = *fact.get(kind, dest).expect("estimate present");
        let c = *corr.get(kind, dest).expect("estimate present");
        ModeComparison {
            factorized: f,
            correlated: c,
            gap: (f.p_out - c.p_out).abs(),
        }
    }))
}

/// Paired-trial check that `better` succeeds whenever `worse` does.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DominanceReport {
    pub trials: u64,
    /// Trials where `worse` succeeded but `better` did not, per destination.
    pub violations: [u64; 2],
}

#[derive(Default)]
struct Violations([u64; 2]);

impl Tally for Violations {
    fn merge(self, other: Self) -> Self {
        Violations([self.0[0] + other.0[0], self.0[1] + other.0[1]])
    }
}

pub fn paired_dominance(
    scene: &Scene,
    better: ProtocolKind,
    worse: ProtocolKind,
    cfg: &McConfig,
) -> Result<DominanceReport> {
    cfg.validate()?;
    let sampler = TrialSampler::new(scene, cfg.mode, cfg.window)?;
    let ctx = DecisionContext::new(scene)?;
    let v = run_batched(
        cfg.trials,
        cfg.batch,
        cfg.threads,
        Violations::default,
        |trial, v| {
            let mut rng = trial_rng(cfg.seed, trial);
            let (draws, _) = sampler.draw(&mut rng);
            let (b, w) = (decide(better, &draws, &ctx), decide(worse, &draws, &ctx));
            for dest in Destination::BOTH {
                v.0[dest.index()] += u64::from(w.success(dest) && !b.success(dest));
            }
        },
    )?;
    Ok(DominanceReport {
        trials: cfg.trials,
        violations: v.0,
    })
}
