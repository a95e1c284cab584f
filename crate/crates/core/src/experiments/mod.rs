//! Config-driven sweeps and their tabular output.

pub mod config;
pub mod csv;
pub mod manifest;
pub mod sweep;

pub use config::{
    parse_config, parse_protocol_list, ExperimentConfig, Outputs, SweepParameter, SweepSpec,
};
pub use csv::{sci, to_csv, write_csv};
pub use manifest::RunManifest;
pub use sweep::{
    crosscheck, run_sweep, CrosscheckReport, Deviation, Estimator, ResultRow, ResultTable,
};
