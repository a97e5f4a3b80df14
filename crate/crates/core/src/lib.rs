//! Simulation of small (2- or 3-neuron) stochastic leaky integrate-and-fire
//! networks and copula-based analysis of the dependence between their spike
//! timings.
//!
//! The library covers the full pipeline:
//! - [`engine`]: correlated Wiener increments, Euler-Maruyama integration,
//!   deterministic per-stream RNG;
//! - [`network`]: network definitions, validation, first-passage-time trials
//!   and free-running spike-train simulation;
//! - [`intervals`]: extraction of forward/backward interspike intervals and
//!   cross-neuron waiting times;
//! - [`stats`]: empirical copulas, Kendall/Spearman/Pearson dependence
//!   summaries;
//! - [`viz`]: deterministic SVG scatterplots, panel matrices, network
//!   diagrams and aligned summary tables;
//! - [`io`]: the CSV formats every artifact uses.
//!
//! Trial-level Monte Carlo runs in parallel via rayon when the default
//! `parallel` feature is on; disabling it swaps in a sequential fallback
//! with bitwise identical output.

pub mod engine;
pub mod error;
pub mod intervals;
pub mod io;
pub mod network;
pub mod stats;
pub mod viz;

pub use error::{Error, Result};
