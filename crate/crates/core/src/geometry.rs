//! Intersection frame: the X road is the x-axis, the Y road is the y-axis,
//! and the junction sits at the origin. Nodes may be placed anywhere,
//! on or off either road.

use std::f64::consts::TAU;

use crate::error::{Error, Result};
use crate::link::{PowerSplit, Thresholds};

/// Pairs of communicating nodes closer than this are rejected.
pub const MIN_LINK_DISTANCE: f64 = 1e-6;

/// Cartesian position in meters.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Position {
    pub x: f64,
    pub y: f64,
}

impl Position {
    pub const ORIGIN: Position = Position { x: 0.0, y: 0.0 };

    pub const fn new(x: f64, y: f64) -> Self {
        Position { x, y }
    }

    /// Builds a position from its distance to the junction and its angle
    /// from the X road axis.
    pub fn from_polar(d: f64, theta: f64) -> Self {
        Position {
            x: d * theta.cos(),
            y: d * theta.sin(),
        }
    }

    pub fn is_finite(&self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }

    /// Distance to the Y road (|x|).
    pub fn offset_from_y_road(&self) -> f64 {
        self.x.abs()
    }

    /// Distance to the X road (|y|).
    pub fn offset_from_x_road(&self) -> f64 {
        self.y.abs()
    }

    pub fn translated(&self, dx: f64, dy: f64) -> Self {
        Position {
            x: self.x + dx,
            y: self.y + dy,
        }
    }
}

pub fn distance(a: Position, b: Position) -> f64 {
    (a.x - b.x).hypot(a.y - b.y)
}

/// Path gain `|a - b|^-alpha`.
pub fn path_loss(a: Position, b: Position, alpha: f64) -> Result<f64> {
    let d = distance(a, b);
    if d < MIN_LINK_DISTANCE {
        return Err(Error::DegenerateGeometry {
            a: "transmitter",
            b: "receiver",
            distance: d,
        });
    }
    Ok(gain_at_distance(d, alpha))
}

#[inline]
pub(crate) fn gain_at_distance(d: f64, alpha: f64) -> f64 {
    if alpha == 2.0 {
        1.0 / (d * d)
    } else {
        d.powf(-alpha)
    }
}

/// Distance to the junction and angle from the X road in `[0, 2π)`.
/// The origin maps to `(0, 0)`.
pub fn polar_of(node: Position) -> (f64, f64) {
    let d = node.x.hypot(node.y);
    if d == 0.0 {
        return (0.0, 0.0);
    }
    let mut theta = node.y.atan2(node.x);
    if theta < 0.0 {
        theta += TAU;
    }
    // atan2 can round up to exactly 2π after the shift
    if theta >= TAU {
        theta = 0.0;
    }
    (d, theta)
}

/// Which of the two nodes' destinations.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Destination {
    D1,
    D2,
}

impl Destination {
    pub const BOTH: [Destination; 2] = [Destination::D1, Destination::D2];

    pub fn name(self) -> &'static str {
        match self {
            Destination::D1 => "D1",
            Destination::D2 => "D2",
        }
    }

    pub fn index(self) -> usize {
        match self {
            Destination::D1 => 0,
            Destination::D2 => 1,
        }
    }

    /// The destination that acts as relay for this one.
    pub fn other(self) -> Destination {
        match self {
            Destination::D1 => Destination::D2,
            Destination::D2 => Destination::D1,
        }
    }
}

/// The source, both destinations, and the propagation and traffic
/// parameters of one intersection scenario.
#[derive(Debug, Clone, PartialEq)]
pub struct Scene {
    pub source: Position,
    pub dest1: Position,
    pub dest2: Position,
    /// Path-loss exponent.
    pub alpha: f64,
    /// Vehicle intensity on the X road, per meter.
    pub lambda_x: f64,
    /// Vehicle intensity on the Y road, per meter.
    pub lambda_y: f64,
    /// ALOHA medium-access probability.
    pub aloha_p: f64,
    pub split: PowerSplit,
    /// Target rate of D1, bits/s/Hz.
    pub r1: f64,
    /// Target rate of D2, bits/s/Hz.
    pub r2: f64,
}

impl Scene {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidScene(msg));
        for (name, p) in [
            ("source", self.source),
            ("dest1", self.dest1),
            ("dest2", self.dest2),
        ] {
            if !p.is_finite() {
                return bad(format!("{name} position must be finite"));
            }
        }
        if !(self.alpha > 1.0) || !self.alpha.is_finite() {
            return bad(format!("alpha must be > 1, got {}", self.alpha));
        }
        if !(self.lambda_x >= 0.0) || !self.lambda_x.is_finite() {
            return bad(format!("lambda_x must be >= 0, got {}", self.lambda_x));
        }
        if !(self.lambda_y >= 0.0) || !self.lambda_y.is_finite() {
            return bad(format!("lambda_y must be >= 0, got {}", self.lambda_y));
        }
        if !(0.0..=1.0).contains(&self.aloha_p) {
            return bad(format!("aloha_p must be in [0, 1], got {}", self.aloha_p));
        }
        if !(self.r1 > 0.0) || !self.r1.is_finite() {
            return bad(format!("r1 must be > 0, got {}", self.r1));
        }
        if !(self.r2 > 0.0) || !self.r2.is_finite() {
            return bad(format!("r2 must be > 0, got {}", self.r2));
        }
        self.split.validate()?;
        for (a, b, pa, pb) in [
            ("source", "dest1", self.source, self.dest1),
            ("source", "dest2", self.source, self.dest2),
            ("dest1", "dest2", self.dest1, self.dest2),
        ] {
            let d = distance(pa, pb);
            if d < MIN_LINK_DISTANCE {
                return Err(Error::DegenerateGeometry { a, b, distance: d });
            }
        }
        Ok(())
    }

    pub fn destination(&self, dest: Destination) -> Position {
        match dest {
            Destination::D1 => self.dest1,
            Destination::D2 => self.dest2,
        }
    }

    pub fn thresholds(&self) -> Thresholds {
        Thresholds::from_rates(self.r1, self.r2)
    }

    /// Gain of the source-to-destination link.
    pub fn source_gain(&self, dest: Destination) -> Result<f64> {
        path_loss(self.source, self.destination(dest), self.alpha)
    }

    /// Gain of the destination-to-destination relay link.
    pub fn relay_gain(&self) -> Result<f64> {
        path_loss(self.dest1, self.dest2, self.alpha)
    }

    /// Moves all three nodes by the same offset.
    pub fn translated(&self, dx: f64, dy: f64) -> Scene {
        Scene {
            source: self.source.translated(dx, dy),
            dest1: self.dest1.translated(dx, dy),
            dest2: self.dest2.translated(dx, dy),
            ..self.clone()
        }
    }
}
