//! Command-line harness around the `spikecopula` library: config parsing,
//! the simulate/analyze/render pipeline, bundled reproduction presets, and
//! hashed artifact manifests.

pub mod config;
pub mod error;
pub mod manifest;
pub mod pipeline;
pub mod presets;

pub use config::{load_config, parse_config, ExperimentConfig, Protocol};
pub use error::{CliError, CliResult};
