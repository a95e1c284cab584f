//! Closed-form ACN outage probabilities for α = 2.
//!
//! Every success event reduces to `P[|h|² ≥ G I / l]` with unit-mean
//! exponential fading, i.e. the product of the two road Laplace
//! transforms evaluated at `G / l`. Events at different receivers and in
//! different slots are treated as independent.

use crate::error::{Error, Result};
use crate::geometry::{Destination, Position, Scene};
use crate::interference::log_laplace_road;
use crate::link::{GFactor, GFactors};

/// Outage of one destination with its success decomposition.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AnalyticOutage {
    pub p_out: f64,
    /// Probability that the direct phase succeeds.
    pub direct: f64,
    /// Probability that the direct phase fails and the relay phase
    /// succeeds.
    pub rescue: f64,
}

impl AnalyticOutage {
    /// Mean number of phases: the relay phase runs whenever the direct
    /// one fails.
    pub fn expected_phases(&self) -> f64 {
        2.0 - self.direct
    }
}

fn require_alpha_2(scene: &Scene) -> Result<()> {
    if scene.alpha != 2.0 {
        return Err(Error::AnalyticDomain { alpha: scene.alpha });
    }
    Ok(())
}

/// `ln W(s)` at `receiver`: sum of the log Laplace transforms of both
/// roads.
pub fn log_w_function(receiver: Position, s: f64, scene: &Scene) -> Result<f64> {
    require_alpha_2(scene)?;
    Ok(log_laplace_road(
        s,
        receiver.offset_from_x_road(),
        scene.lambda_x,
        scene.aloha_p,
    ) + log_laplace_road(
        s,
        receiver.offset_from_y_road(),
        scene.lambda_y,
        scene.aloha_p,
    ))
}

/// Product of the two road Laplace transforms at `receiver`.
pub fn w_function(receiver: Position, s: f64, scene: &Scene) -> Result<f64> {
    log_w_function(receiver, s, scene).map(f64::exp)
}

/// `ln P[|h|² l ≥ G I]` at `receiver`; `None` for an infeasible factor.
fn log_success(receiver: Position, g: GFactor, gain: f64, scene: &Scene) -> Result<Option<f64>> {
    match g {
        GFactor::Feasible(g) => log_w_function(receiver, g / gain, scene).map(Some),
        GFactor::Infeasible => Ok(None),
    }
}

fn combine(log_direct: Option<f64>, log_rescue: [Option<f64>; 2]) -> AnalyticOutage {
    let direct = log_direct.map_or(0.0, f64::exp);
    // 1 - W computed as -expm1(ln W) to keep precision near W = 1
    let direct_fail = log_direct.map_or(1.0, |l| -l.exp_m1());
    let rescue = match log_rescue {
        [Some(a), Some(b)] => direct_fail * (a + b).exp(),
        _ => 0.0,
    };
    let success = (direct + rescue).min(1.0);
    AnalyticOutage {
        p_out: (1.0 - success).max(0.0),
        direct,
        rescue,
    }
}

/// ACN outage at D1: direct decoding at `G1(1) / l_SD1`, otherwise D2
/// decodes at `G1(2) / l_SD2` and forwards over OMA at `Θ(2)_1 / l_D2D1`.
pub fn acn_outage_d1(scene: &Scene) -> Result<AnalyticOutage> {
    scene.validate()?;
    require_alpha_2(scene)?;
    let g = GFactors::new(scene.split, &scene.thresholds());
    let l_sd1 = scene.source_gain(Destination::D1)?;
    let l_sd2 = scene.source_gain(Destination::D2)?;
    let l_rel = scene.relay_gain()?;
    let theta = scene.thresholds().get(2, 1);
    let direct = log_success(scene.dest1, g.g1(1), l_sd1, scene)?;
    let decode_at_relay = log_success(scene.dest2, g.g1(2), l_sd2, scene)?;
    let hop = log_w_function(scene.dest1, theta / l_rel, scene)?;
    Ok(combine(direct, [decode_at_relay, Some(hop)]))
}

/// ACN outage at D2: both SIC stages pass at `Gmax(1) / l_SD2`, otherwise
/// D1 decodes both messages at `Gmax(2) / l_SD1` and forwards over OMA at
/// `Θ(2)_2 / l_D1D2`.
pub fn acn_outage_d2(scene: &Scene) -> Result<AnalyticOutage> {
    scene.validate()?;
    require_alpha_2(scene)?;
    let g = GFactors::new(scene.split, &scene.thresholds());
    let l_sd1 = scene.source_gain(Destination::D1)?;
    let l_sd2 = scene.source_gain(Destination::D2)?;
    let l_rel = scene.relay_gain()?;
    let theta = scene.thresholds().get(2, 2);
    let direct = log_success(scene.dest2, g.gmax(1), l_sd2, scene)?;
    let decode_at_relay = log_success(scene.dest1, g.gmax(2), l_sd1, scene)?;
    let hop = log_w_function(scene.dest2, theta / l_rel, scene)?;
    Ok(combine(direct, [decode_at_relay, Some(hop)]))
}

pub fn acn_outage(scene: &Scene, dest: Destination) -> Result<AnalyticOutage> {
    match dest {
        Destination::D1 => acn_outage_d1(scene),
        Destination::D2 => acn_outage_d2(scene),
    }
}

/// One-phase NOMA without relaying: the direct term of the ACN
/// expression alone.
pub fn direct_noma_outage(scene: &Scene, dest: Destination) -> Result<AnalyticOutage> {
    let acn = acn_outage(scene, dest)?;
    Ok(AnalyticOutage {
        p_out: 1.0 - acn.direct,
        direct: acn.direct,
        rescue: 0.0,
    })
}
