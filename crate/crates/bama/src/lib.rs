//! Experiments, file formats and the command-line front end for
//! [`bama_core`].
//!
//! - [`experiments`]: seeded sweeps, convergence studies, isocurves and the
//!   decision case study, plus Monte Carlo oracles.
//! - [`reproduce`]: named experiment runs writing CSV, JSON and a manifest.
//! - [`config`]: JSON run configurations.
//! - [`cli`]: the `bama` command.

pub mod cli;
pub mod config;
pub mod error;
pub mod experiments;
pub mod output;
pub mod reproduce;

pub use error::{Error, Result};
