use std::cmp::Ordering;

use crate::analytic::{acn_outage, direct_noma_outage};
use crate::error::{Error, Result};
use crate::geometry::{Destination, Scene};
use crate::montecarlo::{run_trials, McConfig};
use crate::protocols::ProtocolKind;

use super::config::{ExperimentConfig, SweepParameter, SweepSpec};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Estimator {
    Analytic,
    Mc,
}

impl Estimator {
    pub fn name(self) -> &'static str {
        match self {
            Estimator::Analytic => "analytic",
            Estimator::Mc => "mc",
        }
    }
}

/// Protocols with a closed-form outage.
pub fn has_closed_form(kind: ProtocolKind) -> bool {
    matches!(kind, ProtocolKind::Acn | ProtocolKind::DirectNoma)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ResultRow {
    pub sweep_param: SweepParameter,
    pub sweep_value: f64,
    pub protocol: ProtocolKind,
    pub destination: Destination,
    pub estimator: Estimator,
    pub p_out: f64,
    pub stderr: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    /// Zero for analytic rows.
    pub trials: u64,
    pub phases_mean: f64,
}

impl ResultRow {
    fn order(&self, other: &Self) -> Ordering {
        self.sweep_value
            .total_cmp(&other.sweep_value)
            .then_with(|| self.protocol.name().cmp(other.protocol.name()))
            .then_with(|| self.destination.cmp(&other.destination))
            .then_with(|| self.estimator.cmp(&other.estimator))
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct ResultTable {
    pub rows: Vec<ResultRow>,
    /// Interferer positions re-drawn over the whole sweep.
    pub redraws: u64,
}

impl ResultTable {
    pub fn get(
        &self,
        value: f64,
        kind: ProtocolKind,
        dest: Destination,
        estimator: Estimator,
    ) -> Option<&ResultRow> {
        self.rows.iter().find(|r| {
            r.sweep_value == value
                && r.protocol == kind
                && r.destination == dest
                && r.estimator == estimator
        })
    }
}

fn analytic_rows(spec: &SweepSpec, value: f64, scene: &Scene) -> Result<Vec<ResultRow>> {
    let mut rows = Vec::new();
    for &kind in spec.protocols.iter().filter(|k| has_closed_form(**k)) {
        for dest in Destination::BOTH {
            let (p, phases) = match kind {
                ProtocolKind::Acn => {
                    let a = acn_outage(scene, dest)?;
                    (a.p_out, a.expected_phases())
                }
                _ => (direct_noma_outage(scene, dest)?.p_out, 1.0),
            };
            rows.push(ResultRow {
                sweep_param: spec.parameter,
                sweep_value: value,
                protocol: kind,
                destination: dest,
                estimator: Estimator::Analytic,
                p_out: p,
                stderr: 0.0,
                ci_low: p,
                ci_high: p,
                trials: 0,
                phases_mean: phases,
            });
        }
    }
    Ok(rows)
}

/// Evaluates every sweep point. Each point reuses the run seed, so
/// neighbouring points share their random streams.
pub fn run_sweep(base: &Scene, spec: &SweepSpec, mc: &McConfig) -> Result<ResultTable> {
    if spec.outputs.analytic() && base.alpha != 2.0 {
        return Err(Error::AnalyticDomain { alpha: base.alpha });
    }
    if spec.outputs.mc() {
        mc.validate()?;
    }
    let scenes = spec
        .values
        .iter()
        .map(|&v| spec.scene_at(base, v).map(|s| (v, s)))
        .collect::<Result<Vec<_>>>()?;

    let mut table = ResultTable::default();
    for (value, scene) in &scenes {
        if spec.outputs.analytic() {
            table.rows.extend(analytic_rows(spec, *value, scene)?);
        }
        if spec.outputs.mc() {
            let run = run_trials(scene, &spec.protocols, mc)?;
            table.redraws += run.redraws;
            table.rows.extend(run.estimates.iter().map(|e| ResultRow {
                sweep_param: spec.parameter,
                sweep_value: *value,
                protocol: e.protocol,
                destination: e.destination,
                estimator: Estimator::Mc,
                p_out: e.p_out,
                stderr: e.stderr,
                ci_low: e.ci95.0,
                ci_high: e.ci95.1,
                trials: e.trials,
                phases_mean: e.phases_mean,
            }));
        }
    }
    table.rows.sort_by(ResultRow::order);
    Ok(table)
}

impl ExperimentConfig {
    pub fn run(&self) -> Result<ResultTable> {
        run_sweep(&self.scene, &self.sweep, &self.mc)
    }
}

/// One closed-form versus simulation comparison.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Deviation {
    pub sweep_value: f64,
    pub protocol: ProtocolKind,
    pub destination: Destination,
    pub analytic: f64,
    pub simulated: f64,
    /// Standard error used for the ratio.
    pub stderr: f64,
    /// `|simulated - analytic| / stderr`.
    pub z: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CrosscheckReport {
    pub deviations: Vec<Deviation>,
}

impl CrosscheckReport {
    pub fn max_z(&self) -> f64 {
        self.deviations.iter().map(|d| d.z).fold(0.0, f64::max)
    }

    pub fn worst(&self) -> Option<&Deviation> {
        self.deviations.iter().max_by(|a, b| a.z.total_cmp(&b.z))
    }
}

/// Standard-error ratio of a simulated outage against its closed form.
///
/// When every trial agreed the sample stderr is zero; the binomial stderr
/// at the analytic value is used instead.
pub fn deviation_z(analytic: f64, simulated: f64, sample_stderr: f64, trials: u64) -> (f64, f64) {
    let se = if sample_stderr > 0.0 {
        sample_stderr
    } else {
        (analytic * (1.0 - analytic) / trials as f64).sqrt()
    };
    let diff = (simulated - analytic).abs();
    let z = if se > 0.0 {
        diff / se
    } else if diff == 0.0 {
        0.0
    } else {
        f64::INFINITY
    };
    (se, z)
}

/// Runs the sweep with both estimators for the closed-form protocols and
/// compares them point by point.
pub fn crosscheck(base: &Scene, spec: &SweepSpec, mc: &McConfig) -> Result<CrosscheckReport> {
    let mut spec = spec.clone();
    spec.protocols.retain(|k| has_closed_form(*k));
    if spec.protocols.is_empty() {
        spec.protocols = vec![ProtocolKind::Acn, ProtocolKind::DirectNoma];
    }
    spec.outputs = super::config::Outputs::Both;
    let table = run_sweep(base, &spec, mc)?;
    let mut deviations = Vec::new();
    for row in table.rows.iter().filter(|r| r.estimator == Estimator::Mc) {
        let Some(an) = table.get(
            row.sweep_value,
            row.protocol,
            row.destination,
            Estimator::Analytic,
        ) else {
            continue;
        };
        let (stderr, z) = deviation_z(an.p_out, row.p_out, row.stderr, row.trials);
        deviations.push(Deviation {
            sweep_value: row.sweep_value,
            protocol: row.protocol,
            destination: row.destination,
            analytic: an.p_out,
            simulated: row.p_out,
            stderr,
            z,
        });
    }
    Ok(CrosscheckReport { deviations })
}
