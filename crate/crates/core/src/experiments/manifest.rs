use std::fmt::Write as _;
use std::time::{SystemTime, UNIX_EPOCH};

use crate::geometry::Scene;

use super::config::ExperimentConfig;
use super::sweep::ResultTable;

/// Everything needed to rerun an experiment, written next to its CSV.
///
/// The body is a canonical config document; run metadata lives in
/// comments so the manifest parses back as a config.
#[derive(Debug, Clone, PartialEq)]
pub struct RunManifest {
    pub config: ExperimentConfig,
    pub tool_version: &'static str,
    pub threads_used: usize,
    /// Seconds since the Unix epoch when the run started.
    pub created_unix: u64,
    pub rows: usize,
    /// Resolved scene at every sweep value.
    pub points: Vec<(f64, Scene)>,
    pub redraws: u64,
}

impl RunManifest {
    pub fn new(config: &ExperimentConfig, table: &ResultTable, threads_used: usize) -> Self {
        RunManifest {
            config: config.clone(),
            tool_version: env!("CARGO_PKG_VERSION"),
            threads_used,
            created_unix: SystemTime::now()
                .duration_since(UNIX_EPOCH)
                .map_or(0, |d| d.as_secs()),
            rows: table.rows.len(),
            points: config
                .sweep
                .values
                .iter()
                .filter_map(|&v| config.sweep.scene_at(&config.scene, v).ok().map(|s| (v, s)))
                .collect(),
            redraws: table.redraws,
        }
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "# acn-outage {} run manifest", self.tool_version);
        let _ = writeln!(out, "# created (unix seconds): {}", self.created_unix);
        let _ = writeln!(out, "# seed: {}", self.config.mc.seed);
        let _ = writeln!(out, "# threads used: {}", self.threads_used);
        let _ = writeln!(out, "# rows: {}", self.rows);
        let _ = writeln!(out, "# interferer redraws: {}", self.redraws);
        for (v, s) in &self.points {
            let _ = writeln!(
                out,
                "# point {v:?}: source ({:?}, {:?}) dest1 ({:?}, {:?}) dest2 ({:?}, {:?}) \
                 lambda_x {:?} lambda_y {:?} aloha_p {:?} a1 {:?} a2 {:?} r1 {:?} r2 {:?}",
                s.source.x,
                s.source.y,
                s.dest1.x,
                s.dest1.y,
                s.dest2.x,
                s.dest2.y,
                s.lambda_x,
                s.lambda_y,
                s.aloha_p,
                s.split.a1(),
                s.split.a2(),
                s.r1,
                s.r2,
            );
        }
        out.push_str(&self.config.to_text());
        out
    }
}
