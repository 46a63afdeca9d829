//! Toolkit for testing asymmetric adjustment to a long-run equilibrium when
//! the equilibrium deviations carry long memory.
//!
//! The crate fits log-log cointegration relationships between a dependent
//! price series and an exogenous driver, extracts the error-correction term,
//! measures its fractional integration order, and applies three
//! surrogate-calibrated asymmetry tests (median, wave, rescaled range ratio)
//! with Monte Carlo p-values computed from Fourier phase-randomized replicas.

pub mod asymmetry;
pub mod error;
pub mod hypothesis;
pub mod longmemory;
pub mod pipeline;
pub mod regression;
pub mod report;
pub mod surrogate;
pub mod synth;
pub mod timeseries;
pub(crate) mod util;

pub use error::{Error, Result};
