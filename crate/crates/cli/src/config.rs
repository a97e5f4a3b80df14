//! Experiment configuration: a single TOML file with units spelled out in
//! every key name, resolved into validated core types.
//!
//! ```toml
//! [[neuron]]
//! mu_mv_per_ms = 1.2
//! tau_ms = 10.0
//! sigma2_mv2_per_ms = 0.3
//! theta_mv = 10.0
//! reset_mv = 0.0
//! # one [[neuron]] block per neuron, 2 or 3 of them
//!
//! [coupling]
//! noise_correlation = 0.5        # scalar (uniform pairwise) or full matrix
//! jumps_mv = [[0.0, 1.0], [1.0, 0.0]]
//!
//! [simulation]
//! protocol = "spike_train"       # or "fpt"
//! duration_ms = 250000.0         # spike_train only
//! n_trials = 10000               # fpt only
//! dt_ms = 0.01
//! burn_in_spikes = 50
//! master_seed = 42
//! trial_timeout_ms = 10000.0
//!
//! [analysis]
//! cases = ["FWD-A", "BWD-A"]     # optional filter, default all
//! rank_denominator = "n"         # or "n_plus_one"
//!
//! [output]
//! dir = "artifacts"
//! ```

use std::path::{Path, PathBuf};

use serde::Deserialize;
use spikecopula::engine::CorrelationMatrix;
use spikecopula::intervals::{fpt_pair_indices, fpt_pair_label, neuron_letter, Direction};
use spikecopula::network::{validate_network, NetworkSpec, NeuronParams, SimConfig};
use spikecopula::stats::RankDenominator;

use crate::error::{CliError, CliResult};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Protocol {
    Fpt,
    SpikeTrain,
}

impl Protocol {
    pub fn as_str(self) -> &'static str {
        match self {
            Protocol::Fpt => "fpt",
            Protocol::SpikeTrain => "spike_train",
        }
    }
}

/// A fully resolved experiment: validated network, protocol-consistent
/// simulation settings, and the analysis/output options.
#[derive(Debug, Clone)]
pub struct ExperimentConfig {
    /// Artifact file-name prefix.
    pub name: String,
    pub network: NetworkSpec,
    pub sim: SimConfig,
    pub protocol: Protocol,
    /// Case labels to analyze; `None` means every case.
    pub cases: Option<Vec<String>>,
    pub rank_denominator: RankDenominator,
    pub output_dir: Option<PathBuf>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    neuron: Vec<RawNeuron>,
    coupling: Option<RawCoupling>,
    simulation: RawSimulation,
    analysis: Option<RawAnalysis>,
    output: Option<RawOutput>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawNeuron {
    mu_mv_per_ms: f64,
    tau_ms: f64,
    sigma2_mv2_per_ms: f64,
    theta_mv: f64,
    reset_mv: f64,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawCoupling {
    noise_correlation: Option<Correlation>,
    jumps_mv: Option<Vec<Vec<f64>>>,
}

#[derive(Deserialize)]
#[serde(untagged)]
enum Correlation {
    Uniform(f64),
    Matrix(Vec<Vec<f64>>),
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSimulation {
    protocol: RawProtocol,
    dt_ms: Option<f64>,
    duration_ms: Option<f64>,
    n_trials: Option<usize>,
    burn_in_spikes: Option<usize>,
    master_seed: Option<u64>,
    trial_timeout_ms: Option<f64>,
}

#[derive(Deserialize, Clone, Copy)]
#[serde(rename_all = "snake_case")]
enum RawProtocol {
    Fpt,
    SpikeTrain,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawAnalysis {
    cases: Option<Vec<String>>,
    rank_denominator: Option<RawDenominator>,
}

#[derive(Deserialize, Clone, Copy)]
#[serde(rename_all = "snake_case")]
enum RawDenominator {
    N,
    NPlusOne,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawOutput {
    dir: Option<String>,
}

/// Every case label an experiment of this shape can produce, in canonical
/// order.
pub fn valid_case_labels(protocol: Protocol, n_neurons: usize) -> Vec<String> {
    match protocol {
        Protocol::Fpt => fpt_pair_indices(n_neurons)
            .into_iter()
            .map(|(i, j)| fpt_pair_label(i, j))
            .collect(),
        Protocol::SpikeTrain => {
            let mut out = Vec::new();
            for target in 0..n_neurons {
                for dir in [Direction::Forward, Direction::Backward] {
                    if n_neurons <= 2 {
                        out.push(format!("{}-{}", dir.short(), neuron_letter(target)));
                    } else {
                        for partner in 0..n_neurons {
                            if partner != target {
                                out.push(format!(
                                    "{}-{}:{}",
                                    dir.short(),
                                    neuron_letter(target),
                                    neuron_letter(partner)
                                ));
                            }
                        }
                    }
                }
            }
            out
        }
    }
}

fn sanitize_name(stem: &str) -> String {
    let mut s: String = stem
        .chars()
        .map(|c| {
            if c.is_ascii_alphanumeric() || c == '_' || c == '-' {
                c
            } else {
                '_'
            }
        })
        .collect();
    if s.is_empty() {
        s.push_str("experiment");
    }
    s
}

/// Parse and validate a config. `name` becomes the artifact prefix.
pub fn parse_config(text: &str, name: &str) -> CliResult<ExperimentConfig> {
    let raw: RawConfig = toml::from_str(text).map_err(CliError::validation)?;

    if raw.neuron.is_empty() {
        return Err(CliError::Validation(
            "neuron: at least one [[neuron]] block is required".into(),
        ));
    }
    let n = raw.neuron.len();
    let neurons: Vec<NeuronParams> = raw
        .neuron
        .iter()
        .map(|r| NeuronParams {
            mu_mv_per_ms: r.mu_mv_per_ms,
            tau_ms: r.tau_ms,
            sigma2_mv2_per_ms: r.sigma2_mv2_per_ms,
            theta_mv: r.theta_mv,
            reset_mv: r.reset_mv,
        })
        .collect();

    let (corr, jumps) = match raw.coupling {
        None => (CorrelationMatrix::identity(n), vec![vec![0.0; n]; n]),
        Some(c) => {
            let corr = match c.noise_correlation {
                None => CorrelationMatrix::identity(n),
                Some(Correlation::Uniform(v)) => CorrelationMatrix::uniform(n, v).map_err(|e| {
                    CliError::Validation(format!("coupling.noise_correlation: {e}"))
                })?,
                Some(Correlation::Matrix(rows)) => CorrelationMatrix::new(rows).map_err(|e| {
                    CliError::Validation(format!("coupling.noise_correlation: {e}"))
                })?,
            };
            let jumps = c.jumps_mv.unwrap_or_else(|| vec![vec![0.0; n]; n]);
            (corr, jumps)
        }
    };

    let network = NetworkSpec::new(neurons, corr, jumps)
        .map_err(|e| CliError::Validation(format!("network: {e}")))?;
    validate_network(&network)
        .into_result()
        .map_err(|e| CliError::Validation(format!("network: {e}")))?;

    let protocol = match raw.simulation.protocol {
        RawProtocol::Fpt => Protocol::Fpt,
        RawProtocol::SpikeTrain => Protocol::SpikeTrain,
    };

    let mut sim = match protocol {
        Protocol::Fpt => {
            let n_trials = raw.simulation.n_trials.ok_or_else(|| {
                CliError::Validation("simulation.n_trials: required when protocol = \"fpt\"".into())
            })?;
            SimConfig::fpt(n_trials)
        }
        Protocol::SpikeTrain => {
            let duration = raw.simulation.duration_ms.ok_or_else(|| {
                CliError::Validation(
                    "simulation.duration_ms: required when protocol = \"spike_train\"".into(),
                )
            })?;
            SimConfig::spike_train(duration)
        }
    };
    if let Some(dt) = raw.simulation.dt_ms {
        sim.dt_ms = dt;
    }
    if let Some(d) = raw.simulation.duration_ms {
        sim.duration_ms = d;
    }
    if let Some(t) = raw.simulation.n_trials {
        sim.n_trials = t;
    }
    if let Some(b) = raw.simulation.burn_in_spikes {
        sim.burn_in_spikes = b;
    }
    if let Some(s) = raw.simulation.master_seed {
        sim.master_seed = s;
    }
    if let Some(t) = raw.simulation.trial_timeout_ms {
        sim.trial_timeout_ms = t;
    }
    check_sim(&sim, protocol)?;

    let (cases, rank_denominator) = match raw.analysis {
        None => (None, RankDenominator::N),
        Some(a) => {
            let denom = match a.rank_denominator {
                None | Some(RawDenominator::N) => RankDenominator::N,
                Some(RawDenominator::NPlusOne) => RankDenominator::NPlusOne,
            };
            if let Some(cases) = &a.cases {
                let valid = valid_case_labels(protocol, n);
                for c in cases {
                    if !valid.contains(c) {
                        return Err(CliError::Validation(format!(
                            "analysis.cases: unknown case {c:?}; valid cases are {}",
                            valid.join(", ")
                        )));
                    }
                }
            }
            (a.cases, denom)
        }
    };

    Ok(ExperimentConfig {
        name: sanitize_name(name),
        network,
        sim,
        protocol,
        cases,
        rank_denominator,
        output_dir: raw.output.and_then(|o| o.dir).map(PathBuf::from),
    })
}

fn check_sim(sim: &SimConfig, protocol: Protocol) -> CliResult<()> {
    if !(sim.dt_ms.is_finite() && sim.dt_ms > 0.0) {
        return Err(CliError::Validation(format!(
            "simulation.dt_ms: must be positive, got {}",
            sim.dt_ms
        )));
    }
    match protocol {
        Protocol::Fpt => {
            if sim.n_trials == 0 {
                return Err(CliError::Validation(
                    "simulation.n_trials: must be at least 1".into(),
                ));
            }
            if !(sim.trial_timeout_ms.is_finite() && sim.trial_timeout_ms > 0.0) {
                return Err(CliError::Validation(format!(
                    "simulation.trial_timeout_ms: must be positive, got {}",
                    sim.trial_timeout_ms
                )));
            }
        }
        Protocol::SpikeTrain => {
            if !(sim.duration_ms.is_finite() && sim.duration_ms > sim.dt_ms) {
                return Err(CliError::Validation(format!(
                    "simulation.duration_ms: must exceed dt_ms {}, got {}",
                    sim.dt_ms, sim.duration_ms
                )));
            }
        }
    }
    Ok(())
}

/// Load a config file; the file stem becomes the experiment name.
pub fn load_config(path: &Path) -> CliResult<ExperimentConfig> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Validation(format!("cannot read {}: {e}", path.display())))?;
    let stem = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "experiment".into());
    parse_config(&text, &stem)
}
