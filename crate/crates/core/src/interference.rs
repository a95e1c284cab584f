//! Interferers on the two roads: ALOHA-thinned 1D Poisson processes,
//! the aggregate Rayleigh-faded interference they create at a receiver,
//! and the Laplace transform of that interference.
//!
//! Sampling is restricted to `[-window, window]` on each road. The mean
//! interference of the infinite remainder is available through
//! [`far_field_mean`]; the Monte-Carlo engine adds it to every aggregate
//! so that large Laplace arguments are not biased by the truncation.

use std::f64::consts::PI;

use rand::Rng;
use rand_distr::{Distribution, Exp1, Poisson};

use crate::error::{Error, Result};
use crate::geometry::{gain_at_distance, Position, MIN_LINK_DISTANCE};
use crate::quadrature::Quadrature;

pub const DEFAULT_WINDOW: f64 = 5_000.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Road {
    /// The horizontal road, points `(u, 0)`.
    X,
    /// The vertical road, points `(0, u)`.
    Y,
}

impl Road {
    /// Perpendicular distance from `p` to this road.
    pub fn offset(self, p: Position) -> f64 {
        match self {
            Road::X => p.offset_from_x_road(),
            Road::Y => p.offset_from_y_road(),
        }
    }

    /// Coordinate of the foot of the perpendicular from `p`.
    pub fn along(self, p: Position) -> f64 {
        match self {
            Road::X => p.x,
            Road::Y => p.y,
        }
    }
}

/// One realization of active interferers, as scalar coordinates along
/// each road.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct InterfererField {
    pub on_x: Vec<f64>,
    pub on_y: Vec<f64>,
    pub window: f64,
}

/// Interference power from each road at one receiver.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct AggregateInterference {
    pub i_x: f64,
    pub i_y: f64,
}

impl AggregateInterference {
    pub const ZERO: AggregateInterference = AggregateInterference { i_x: 0.0, i_y: 0.0 };

    pub fn total(&self) -> f64 {
        self.i_x + self.i_y
    }

    pub fn plus(self, other: AggregateInterference) -> Self {
        AggregateInterference {
            i_x: self.i_x + other.i_x,
            i_y: self.i_y + other.i_y,
        }
    }
}

/// Aggregate plus the number of interferer positions that had to be
/// re-drawn because they coincided with the receiver.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct AggregateDraw {
    pub interference: AggregateInterference,
    pub redraws: u32,
}

fn poisson_count<R: Rng + ?Sized>(mean: f64, rng: &mut R) -> usize {
    if mean <= 0.0 {
        return 0;
    }
    let dist = Poisson::new(mean).expect("positive finite mean");
    dist.sample(rng) as usize
}

/// Samples the active interferers on both roads. Thinning is folded into
/// the intensity, so each road carries `Poisson(2 window λ p)` points,
/// uniform on `[-window, window]`.
pub fn sample_field<R: Rng + ?Sized>(
    lambda_x: f64,
    lambda_y: f64,
    aloha_p: f64,
    window: f64,
    rng: &mut R,
) -> InterfererField {
    debug_assert!(window > 0.0 && lambda_x >= 0.0 && lambda_y >= 0.0);
    let mut road = |lambda: f64| -> Vec<f64> {
        let n = poisson_count(2.0 * window * lambda * aloha_p, rng);
        (0..n).map(|_| rng.random_range(-window..=window)).collect()
    };
    let on_x = road(lambda_x);
    let on_y = road(lambda_y);
    InterfererField { on_x, on_y, window }
}

/// Sums faded interference from every point of `field` at `receiver`,
/// with a fresh unit-mean exponential fading draw per interferer.
pub fn aggregate_at<R: Rng + ?Sized>(
    field: &InterfererField,
    receiver: Position,
    alpha: f64,
    rng: &mut R,
) -> AggregateDraw {
    aggregate_inner(field, receiver, alpha, rng, false)
}

/// Same as [`aggregate_at`] with every fading coefficient set to one.
#[cfg(test)]
pub(crate) fn aggregate_unit_fading<R: Rng + ?Sized>(
    field: &InterfererField,
    receiver: Position,
    alpha: f64,
    rng: &mut R,
) -> AggregateDraw {
    aggregate_inner(field, receiver, alpha, rng, true)
}

fn aggregate_inner<R: Rng + ?Sized>(
    field: &InterfererField,
    receiver: Position,
    alpha: f64,
    rng: &mut R,
    unit_fading: bool,
) -> AggregateDraw {
    let mut redraws = 0u32;
    let min_sq = MIN_LINK_DISTANCE * MIN_LINK_DISTANCE;
    let mut road_sum = |points: &[f64], along: f64, offset: f64| -> f64 {
        let mut sum = 0.0;
        for &u in points {
            let mut du = u - along;
            let mut d2 = du * du + offset * offset;
            while d2 < min_sq {
                redraws += 1;
                du = rng.random_range(-field.window..=field.window) - along;
                d2 = du * du + offset * offset;
            }
            let gain = if alpha == 2.0 {
                1.0 / d2
            } else {
                gain_at_distance(d2.sqrt(), alpha)
            };
            let fading: f64 = if unit_fading { 1.0 } else { Exp1.sample(rng) };
            sum += fading * gain;
        }
        sum
    };
    let i_x = road_sum(&field.on_x, receiver.x, receiver.y);
    let i_y = road_sum(&field.on_y, receiver.y, receiver.x);
    AggregateDraw {
        interference: AggregateInterference { i_x, i_y },
        redraws,
    }
}

/// Mean interference at `receiver` from the active vehicles lying outside
/// `[-window, window]` on each road.
pub fn far_field_mean(
    receiver: Position,
    alpha: f64,
    lambda_x: f64,
    lambda_y: f64,
    aloha_p: f64,
    window: f64,
) -> Result<AggregateInterference> {
    let road = |road: Road, lambda: f64| -> Result<f64> {
        let intensity = lambda * aloha_p;
        if intensity == 0.0 {
            return Ok(0.0);
        }
        let c = road.along(receiver);
        let h = road.offset(receiver);
        if c.abs() >= window {
            return Err(Error::InvalidScene(format!(
                "receiver at ({}, {}) lies outside the {window} m sampling window",
                receiver.x, receiver.y
            )));
        }
        Ok(intensity
            * (tail_integral(window - c, h, alpha)? + tail_integral(window + c, h, alpha)?))
    };
    Ok(AggregateInterference {
        i_x: road(Road::X, lambda_x)?,
        i_y: road(Road::Y, lambda_y)?,
    })
}

/// `∫_a^∞ (v² + h²)^(-α/2) dv` for `a > 0`.
fn tail_integral(a: f64, h: f64, alpha: f64) -> Result<f64> {
    if alpha == 2.0 {
        return Ok(if h == 0.0 {
            1.0 / a
        } else {
            (h / a).atan() / h
        });
    }
    // v = a / t maps the tail onto (0, 1]
    let q = Quadrature::default();
    let est = q.integrate(
        |t| a * t.powf(alpha - 2.0) / (a * a + h * h * t * t).powf(alpha / 2.0),
        0.0,
        1.0,
    )?;
    Ok(est.value)
}

/// `ln L(s)` for one road with perpendicular receiver offset `offset`,
/// path-loss exponent 2: `-s p λ π / sqrt(s + offset²)`.
pub fn log_laplace_road(s: f64, offset: f64, lambda: f64, aloha_p: f64) -> f64 {
    if s == 0.0 || lambda == 0.0 || aloha_p == 0.0 {
        return 0.0;
    }
    -s * aloha_p * lambda * PI / (s + offset * offset).sqrt()
}

/// Laplace transform of the X-road interference at a receiver at distance
/// `d` from the junction and angle `theta` from the X road (α = 2).
pub fn laplace_x(s: f64, d: f64, theta: f64, lambda_x: f64, aloha_p: f64) -> f64 {
    log_laplace_road(s, d * theta.sin(), lambda_x, aloha_p).exp()
}

/// Laplace transform of the Y-road interference (α = 2).
pub fn laplace_y(s: f64, d: f64, theta: f64, lambda_y: f64, aloha_p: f64) -> f64 {
    log_laplace_road(s, d * theta.cos(), lambda_y, aloha_p).exp()
}

/// Laplace transform of one road's interference by direct quadrature of
/// the Poisson functional, `exp(-p λ ∫ s / (r(u)^α + s) du)` over the
/// whole road. Valid for any `alpha > 1`.
pub fn numerical_laplace(
    s: f64,
    receiver: Position,
    road: Road,
    alpha: f64,
    lambda: f64,
    aloha_p: f64,
) -> Result<f64> {
    if !(alpha > 1.0) {
        return Err(Error::InvalidScene(format!(
            "alpha must exceed 1 for an integrable interference functional, got {alpha}"
        )));
    }
    if s == 0.0 || lambda == 0.0 || aloha_p == 0.0 {
        return Ok(1.0);
    }
    let h2 = road.offset(receiver).powi(2);
    let integrand = |v: f64| s / ((v * v + h2).powf(alpha / 2.0) + s);
    // split where r^α ≈ s, then fold the tail onto (0, 1]
    let split = s.powf(1.0 / alpha).max(h2.sqrt()).max(1.0);
    let q = Quadrature::default();
    let near = q.integrate(integrand, 0.0, split)?;
    let far = q.integrate(|t| integrand(split / t) * split / (t * t), 0.0, 1.0)?;
    let half_line = near.value + far.value;
    Ok((-aloha_p * lambda * 2.0 * half_line).exp())
}
