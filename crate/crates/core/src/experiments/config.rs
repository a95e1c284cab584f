//! Flat `key = value` configuration documents.
//!
//! ```text
//! # geometry: cartesian x/y or polar d/theta_deg per node
//! scene.source.x = 0
//! scene.source.y = 100
//! scene.dest1.d = 0
//! scene.dest1.theta_deg = 0
//! scene.dest2.x = 100
//! scene.dest2.y = 100
//! scene.lambda = 0.005          # or scene.lambda_x / scene.lambda_y
//! scene.r1 = 0.5
//! scene.r2 = 1
//! sweep.parameter = lambda
//! sweep.values = 0.001, 0.002, 0.005
//! mc.trials = 50000
//! ```
//!
//! Blank lines and `#` comments are ignored. Unknown and repeated keys
//! are errors.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::geometry::{Position, Scene};
use crate::interference::DEFAULT_WINDOW;
use crate::link::PowerSplit;
use crate::montecarlo::{McConfig, Mode, Pairing, DEFAULT_BATCH, DEFAULT_TRIALS};
use crate::protocols::ProtocolKind;

pub const DEFAULT_ALPHA: f64 = 2.0;
pub const DEFAULT_ALOHA_P: f64 = 0.5;
pub const DEFAULT_A1: f64 = 0.8;
pub const DEFAULT_DIRECTION_DEG: f64 = 90.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SweepParameter {
    /// Single evaluation of the configured scene.
    None,
    /// Both road intensities together.
    Lambda,
    /// Rigid translation of all three nodes along the approach direction.
    DistanceToIntersection,
    A1,
    AlohaP,
    RateR1,
    RateR2,
}

impl SweepParameter {
    const ALL: [SweepParameter; 7] = [
        SweepParameter::None,
        SweepParameter::Lambda,
        SweepParameter::DistanceToIntersection,
        SweepParameter::A1,
        SweepParameter::AlohaP,
        SweepParameter::RateR1,
        SweepParameter::RateR2,
    ];

    pub fn name(self) -> &'static str {
        match self {
            SweepParameter::None => "none",
            SweepParameter::Lambda => "lambda",
            SweepParameter::DistanceToIntersection => "distance_to_intersection",
            SweepParameter::A1 => "a1",
            SweepParameter::AlohaP => "aloha_p",
            SweepParameter::RateR1 => "rate_r1",
            SweepParameter::RateR2 => "rate_r2",
        }
    }

    fn parse(s: &str) -> Option<Self> {
        let s = s.trim().to_ascii_lowercase();
        let s = if s == "distance" {
            "distance_to_intersection"
        } else {
            s.as_str()
        };
        Self::ALL.into_iter().find(|p| p.name() == s)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Outputs {
    Mc,
    Analytic,
    Both,
}

impl Outputs {
    pub fn name(self) -> &'static str {
        match self {
            Outputs::Mc => "mc",
            Outputs::Analytic => "analytic",
            Outputs::Both => "both",
        }
    }

    pub fn mc(self) -> bool {
        matches!(self, Outputs::Mc | Outputs::Both)
    }

    pub fn analytic(self) -> bool {
        matches!(self, Outputs::Analytic | Outputs::Both)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub parameter: SweepParameter,
    pub values: Vec<f64>,
    pub protocols: Vec<ProtocolKind>,
    pub outputs: Outputs,
    /// Approach direction for distance sweeps, radians from the X road.
    pub direction: f64,
}

impl SweepSpec {
    /// The configured scene only, every protocol, MC output.
    pub fn single() -> Self {
        SweepSpec {
            parameter: SweepParameter::None,
            values: vec![0.0],
            protocols: ProtocolKind::ALL.to_vec(),
            outputs: Outputs::Mc,
            direction: DEFAULT_DIRECTION_DEG.to_radians(),
        }
    }

    /// Scene at one sweep value.
    pub fn scene_at(&self, base: &Scene, value: f64) -> Result<Scene> {
        let mut s = base.clone();
        match self.parameter {
            SweepParameter::None => {}
            SweepParameter::Lambda => {
                s.lambda_x = value;
                s.lambda_y = value;
            }
            SweepParameter::DistanceToIntersection => {
                s = base.translated(value * self.direction.cos(), value * self.direction.sin());
            }
            SweepParameter::A1 => s.split = PowerSplit::from_a1(value)?,
            SweepParameter::AlohaP => s.aloha_p = value,
            SweepParameter::RateR1 => s.r1 = value,
            SweepParameter::RateR2 => s.r2 = value,
        }
        s.validate()?;
        Ok(s)
    }
}

/// A fully resolved experiment: base scene, sweep, and Monte-Carlo setup.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub scene: Scene,
    pub sweep: SweepSpec,
    pub mc: McConfig,
}

const NODES: [&str; 3] = ["source", "dest1", "dest2"];

fn known_key(key: &str) -> bool {
    const FLAT: [&str; 24] = [
        "scene.alpha",
        "scene.lambda",
        "scene.lambda_x",
        "scene.lambda_y",
        "scene.aloha_p",
        "scene.a1",
        "scene.a2",
        "scene.r1",
        "scene.r2",
        "sweep.parameter",
        "sweep.values",
        "sweep.start",
        "sweep.stop",
        "sweep.steps",
        "sweep.protocols",
        "sweep.outputs",
        "sweep.direction_deg",
        "mc.trials",
        "mc.seed",
        "mc.mode",
        "mc.window",
        "mc.batch",
        "mc.pairing",
        "mc.threads",
    ];
    if FLAT.contains(&key) {
        return true;
    }
    NODES.iter().any(|n| {
        ["x", "y", "d", "theta_deg"]
            .iter()
            .any(|c| key == format!("scene.{n}.{c}"))
    })
}

struct Document {
    entries: BTreeMap<String, String>,
}

impl Document {
    fn parse(text: &str) -> Result<Self> {
        let mut entries = BTreeMap::new();
        for (n, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                return Err(Error::config(
                    format!("line {}", n + 1),
                    format!("expected `key = value`, got `{line}`"),
                ));
            };
            let key = key.trim().to_string();
            if !known_key(&key) {
                return Err(Error::config(key, "unknown key"));
            }
            if entries
                .insert(key.clone(), value.trim().to_string())
                .is_some()
            {
                return Err(Error::config(key, "given more than once"));
            }
        }
        Ok(Document { entries })
    }

    fn raw(&self, key: &str) -> Option<&str> {
        self.entries.get(key).map(String::as_str)
    }

    fn has(&self, key: &str) -> bool {
        self.entries.contains_key(key)
    }

    fn f64(&self, key: &str) -> Result<Option<f64>> {
        self.raw(key).map(|v| parse_f64(key, v)).transpose()
    }

    fn f64_or(&self, key: &str, default: f64) -> Result<f64> {
        Ok(self.f64(key)?.unwrap_or(default))
    }

    fn required_f64(&self, key: &str) -> Result<f64> {
        self.f64(key)?
            .ok_or_else(|| Error::config(key, "missing required key"))
    }

    fn u64_or(&self, key: &str, default: u64) -> Result<u64> {
        match self.raw(key) {
            None => Ok(default),
            Some(v) => v.replace('_', "").parse().map_err(|_| {
                Error::config(key, format!("expected a non-negative integer, got `{v}`"))
            }),
        }
    }
}

fn parse_f64(key: &str, v: &str) -> Result<f64> {
    let x: f64 = v
        .parse()
        .map_err(|_| Error::config(key, format!("expected a number, got `{v}`")))?;
    if !x.is_finite() {
        return Err(Error::config(
            key,
            format!("expected a finite number, got `{v}`"),
        ));
    }
    Ok(x)
}

fn parse_protocols(key: &str, v: &str) -> Result<Vec<ProtocolKind>> {
    let mut kinds = v
        .split(',')
        .filter(|s| !s.trim().is_empty())
        .map(|s| s.parse::<ProtocolKind>())
        .collect::<Result<Vec<_>>>()
        .map_err(|e| Error::config(key, e.to_string()))?;
    kinds.sort();
    kinds.dedup();
    if kinds.is_empty() {
        return Err(Error::config(key, "at least one protocol is required"));
    }
    Ok(kinds)
}

/// Parses a comma-separated protocol list as given on the command line.
pub fn parse_protocol_list(v: &str) -> Result<Vec<ProtocolKind>> {
    parse_protocols("--protocols", v)
}

fn node(doc: &Document, name: &str) -> Result<Position> {
    let key = |c: &str| format!("scene.{name}.{c}");
    let cart = doc.has(&key("x")) || doc.has(&key("y"));
    let polar = doc.has(&key("d")) || doc.has(&key("theta_deg"));
    match (cart, polar) {
        (true, true) => Err(Error::config(
            format!("scene.{name}"),
            "give either x/y or d/theta_deg, not both",
        )),
        (true, false) => Ok(Position::new(
            doc.required_f64(&key("x"))?,
            doc.required_f64(&key("y"))?,
        )),
        (false, true) => {
            let d = doc.required_f64(&key("d"))?;
            if d < 0.0 {
                return Err(Error::config(key("d"), "distance must be >= 0"));
            }
            let theta = doc.required_f64(&key("theta_deg"))?.to_radians();
            Ok(Position::from_polar(d, theta))
        }
        (false, false) => Err(Error::config(
            format!("scene.{name}"),
            "missing required key (x/y or d/theta_deg)",
        )),
    }
}

/// Maps a scene validation failure onto the config key it concerns.
fn scene_error(e: Error) -> Error {
    match e {
        Error::InvalidScene(msg) => {
            let field = msg.split_whitespace().next().unwrap_or("");
            let key = match field {
                "alpha" | "lambda_x" | "lambda_y" | "aloha_p" | "a1" | "a2" | "r1" | "r2" => {
                    format!("scene.{field}")
                }
                f if NODES.contains(&f) => format!("scene.{f}"),
                _ => "scene".to_string(),
            };
            Error::Config { key, message: msg }
        }
        Error::DegenerateGeometry { a, b, distance } => Error::Config {
            key: format!("scene.{a}"),
            message: format!("{a} and {b} are only {distance:e} m apart"),
        },
        other => other,
    }
}

fn parse_scene(doc: &Document) -> Result<Scene> {
    let (lx, ly) = match (
        doc.f64("scene.lambda")?,
        doc.has("scene.lambda_x") || doc.has("scene.lambda_y"),
    ) {
        (Some(_), true) => {
            return Err(Error::config(
                "scene.lambda",
                "give either lambda or lambda_x/lambda_y, not both",
            ))
        }
        (Some(l), false) => (l, l),
        (None, _) => (
            doc.required_f64("scene.lambda_x")
                .map_err(|_| Error::config("scene.lambda", "missing required key"))?,
            doc.required_f64("scene.lambda_y")
                .map_err(|_| Error::config("scene.lambda", "missing required key"))?,
        ),
    };
    let a1 = doc.f64_or("scene.a1", DEFAULT_A1)?;
    let a2 = doc.f64_or("scene.a2", 1.0 - a1)?;
    let split = PowerSplit::new(a1, a2).map_err(scene_error)?;
    let scene = Scene {
        source: node(doc, "source")?,
        dest1: node(doc, "dest1")?,
        dest2: node(doc, "dest2")?,
        alpha: doc.f64_or("scene.alpha", DEFAULT_ALPHA)?,
        lambda_x: lx,
        lambda_y: ly,
        aloha_p: doc.f64_or("scene.aloha_p", DEFAULT_ALOHA_P)?,
        split,
        r1: doc.required_f64("scene.r1")?,
        r2: doc.required_f64("scene.r2")?,
    };
    scene.validate().map_err(scene_error)?;
    Ok(scene)
}

fn parse_sweep(doc: &Document, scene: &Scene) -> Result<SweepSpec> {
    let parameter = match doc.raw("sweep.parameter") {
        None => SweepParameter::None,
        Some(v) => SweepParameter::parse(v).ok_or_else(|| {
            Error::config(
                "sweep.parameter",
                format!(
                    "expected one of none, lambda, distance_to_intersection, a1, aloha_p, rate_r1, rate_r2; got `{v}`"
                ),
            )
        })?,
    };
    let range_given = doc.has("sweep.start") || doc.has("sweep.stop") || doc.has("sweep.steps");
    let values = match (doc.raw("sweep.values"), range_given) {
        (Some(_), true) => {
            return Err(Error::config(
                "sweep.values",
                "give either values or start/stop/steps, not both",
            ))
        }
        (Some(list), false) => list
            .split(',')
            .filter(|s| !s.trim().is_empty())
            .map(|s| parse_f64("sweep.values", s.trim()))
            .collect::<Result<Vec<_>>>()?,
        (None, true) => {
            let start = doc.required_f64("sweep.start")?;
            let stop = doc.required_f64("sweep.stop")?;
            let steps = doc.u64_or("sweep.steps", 0)?;
            if steps == 0 {
                return Err(Error::config("sweep.steps", "missing required key or zero"));
            }
            if steps == 1 {
                vec![start]
            } else {
                (0..steps)
                    .map(|i| start + (stop - start) * i as f64 / (steps - 1) as f64)
                    .collect()
            }
        }
        (None, false) if parameter == SweepParameter::None => vec![0.0],
        (None, false) => {
            return Err(Error::config(
                "sweep.values",
                "missing required key for a sweep",
            ))
        }
    };
    if values.is_empty() {
        return Err(Error::config("sweep.values", "must not be empty"));
    }
    let protocols = match doc.raw("sweep.protocols") {
        None => ProtocolKind::ALL.to_vec(),
        Some(v) => parse_protocols("sweep.protocols", v)?,
    };
    let outputs = match doc
        .raw("sweep.outputs")
        .map(|s| s.trim().to_ascii_lowercase())
    {
        None => Outputs::Mc,
        Some(v) => match v.as_str() {
            "mc" => Outputs::Mc,
            "analytic" => Outputs::Analytic,
            "both" => Outputs::Both,
            _ => {
                return Err(Error::config(
                    "sweep.outputs",
                    format!("expected mc, analytic or both, got `{v}`"),
                ))
            }
        },
    };
    let direction = doc
        .f64_or("sweep.direction_deg", DEFAULT_DIRECTION_DEG)?
        .to_radians();
    let spec = SweepSpec {
        parameter,
        values,
        protocols,
        outputs,
        direction,
    };
    if spec.outputs.analytic() && scene.alpha != 2.0 {
        return Err(Error::config(
            "sweep.outputs",
            format!(
                "analytic output requires scene.alpha = 2, got {}",
                scene.alpha
            ),
        ));
    }
    for &v in &spec.values {
        spec.scene_at(scene, v).map_err(|e| match scene_error(e) {
            Error::Config { message, .. } => Error::config(
                "sweep.values",
                format!("value {v} gives an invalid scene: {message}"),
            ),
            other => other,
        })?;
    }
    Ok(spec)
}

fn parse_mc(doc: &Document) -> Result<McConfig> {
    let mode = match doc.raw("mc.mode") {
        None => Mode::Factorized,
        Some(v) => v.parse().map_err(|e: String| Error::config("mc.mode", e))?,
    };
    let pairing = match doc.raw("mc.pairing") {
        None => Pairing::Unpaired,
        Some(v) => v
            .parse()
            .map_err(|e: String| Error::config("mc.pairing", e))?,
    };
    let threads = match doc.raw("mc.threads").map(str::trim) {
        None | Some("max") => None,
        Some(_) => Some(doc.u64_or("mc.threads", 0)? as usize),
    };
    let mc = McConfig {
        trials: doc.u64_or("mc.trials", DEFAULT_TRIALS)?,
        seed: doc.u64_or("mc.seed", 0)?,
        mode,
        window: doc.f64_or("mc.window", DEFAULT_WINDOW)?,
        batch: doc.u64_or("mc.batch", DEFAULT_BATCH)?,
        pairing,
        threads,
    };
    mc.validate().map_err(|e| match e {
        Error::ZeroTrials => Error::config("mc.trials", "must be at least 1"),
        other => other,
    })?;
    Ok(mc)
}

/// Parses and validates a configuration document.
pub fn parse_config(text: &str) -> Result<ExperimentConfig> {
    let doc = Document::parse(text)?;
    let scene = parse_scene(&doc)?;
    let sweep = parse_sweep(&doc, &scene)?;
    let mc = parse_mc(&doc)?;
    // receivers must stay inside the sampled stretch at every sweep point
    for &v in &sweep.values {
        let s = sweep.scene_at(&scene, v)?;
        for (name, p) in [("dest1", s.dest1), ("dest2", s.dest2)] {
            if p.x.abs() >= mc.window || p.y.abs() >= mc.window {
                return Err(Error::config(
                    "mc.window",
                    format!(
                        "{name} at ({}, {}) lies outside the sampling window",
                        p.x, p.y
                    ),
                ));
            }
        }
    }
    Ok(ExperimentConfig { scene, sweep, mc })
}

impl ExperimentConfig {
    /// Canonical document that parses back to this exact configuration.
    pub fn to_text(&self) -> String {
        let s = &self.scene;
        let mut out = String::new();
        let mut kv = |k: &str, v: String| {
            let _ = writeln!(out, "{k} = {v}");
        };
        for (name, p) in [("source", s.source), ("dest1", s.dest1), ("dest2", s.dest2)] {
            kv(&format!("scene.{name}.x"), format!("{:?}", p.x));
            kv(&format!("scene.{name}.y"), format!("{:?}", p.y));
        }
        kv("scene.alpha", format!("{:?}", s.alpha));
        kv("scene.lambda_x", format!("{:?}", s.lambda_x));
        kv("scene.lambda_y", format!("{:?}", s.lambda_y));
        kv("scene.aloha_p", format!("{:?}", s.aloha_p));
        kv("scene.a1", format!("{:?}", s.split.a1()));
        kv("scene.a2", format!("{:?}", s.split.a2()));
        kv("scene.r1", format!("{:?}", s.r1));
        kv("scene.r2", format!("{:?}", s.r2));

        let w = &self.sweep;
        kv("sweep.parameter", w.parameter.name().to_string());
        kv(
            "sweep.values",
            w.values
                .iter()
                .map(|v| format!("{v:?}"))
                .collect::<Vec<_>>()
                .join(", "),
        );
        kv(
            "sweep.protocols",
            w.protocols
                .iter()
                .map(|p| p.name())
                .collect::<Vec<_>>()
                .join(", "),
        );
        kv("sweep.outputs", w.outputs.name().to_string());
        // degrees survive the round trip only if radians convert back exactly
        kv(
            "sweep.direction_deg",
            format!("{:?}", w.direction * 180.0 / PI),
        );

        let m = &self.mc;
        kv("mc.trials", m.trials.to_string());
        kv("mc.seed", m.seed.to_string());
        kv("mc.mode", m.mode.name().to_string());
        kv("mc.window", format!("{:?}", m.window));
        kv("mc.batch", m.batch.to_string());
        kv("mc.pairing", m.pairing.name().to_string());
        kv(
            "mc.threads",
            m.threads
                .map_or_else(|| "max".to_string(), |t| t.to_string()),
        );
        out
    }
}
