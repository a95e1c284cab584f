//! Outage probabilities of adaptive cooperative NOMA (ACN) and four
//! baselines for a source and two destinations near a road intersection,
//! with Poisson vehicular interference on both roads.
//!
//! Outage is computed by Monte-Carlo simulation ([`montecarlo`]) and, for
//! a path-loss exponent of 2, in closed form ([`analytic`]).

// `!(x > 0.0)` rejects NaN as well; that is intended throughout.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analytic;
pub mod error;
pub mod experiments;
pub mod geometry;
pub mod interference;
pub mod link;
pub mod montecarlo;
pub mod protocols;
pub mod quadrature;

pub use analytic::{acn_outage, direct_noma_outage, AnalyticOutage};
pub use error::{Error, Result};
pub use geometry::{Destination, Position, Scene};
pub use link::{PowerSplit, Thresholds};
pub use montecarlo::{run_trials, McConfig, Mode, OutageEstimate, Pairing};
pub use protocols::ProtocolKind;
