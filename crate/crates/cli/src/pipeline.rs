//! The experiment pipeline: simulate, extract, summarize, render. Every
//! stage turns into a list of named artifact bytes so the caller can write
//! one manifest over the whole run.

use spikecopula::intervals::{
    enumerate_cases, fpt_pair_indices, fpt_pair_label, fpt_pairs, neuron_letter, Direction,
    PairedSample,
};
use spikecopula::io;
use spikecopula::network::{simulate_fpt_trials, simulate_spike_trains, FptSample, SpikeTrains};
use spikecopula::stats::{pseudo_observations_with, summarize, DependenceSummary};
use spikecopula::viz::{
    dependence_table, fpt_panel_grid, network_diagram, panel_grid_svg, scatterplot_svg,
    target_panel_grid, PlotSpec,
};

use crate::config::{ExperimentConfig, Protocol};
use crate::error::{CliError, CliResult};

/// Simulation output of either protocol.
#[derive(Debug, Clone)]
pub enum RawData {
    Fpt(FptSample),
    Trains(SpikeTrains),
}

impl RawData {
    pub fn protocol(&self) -> Protocol {
        match self {
            RawData::Fpt(_) => Protocol::Fpt,
            RawData::Trains(_) => Protocol::SpikeTrain,
        }
    }

    pub fn n_neurons(&self) -> usize {
        match self {
            RawData::Fpt(s) => s.n_neurons(),
            RawData::Trains(t) => t.n_neurons(),
        }
    }
}

/// A named artifact ready to be written.
pub type FileEntry = (String, Vec<u8>);

/// Everything one experiment produced.
pub struct RunOutput {
    pub files: Vec<FileEntry>,
    pub summaries: Vec<DependenceSummary>,
}

/// File-name fragment for a case label: `FWD-A:B` becomes `fwd_a_b`.
pub fn slug(label: &str) -> String {
    label
        .chars()
        .map(|c| match c {
            '-' | ':' => '_',
            c => c.to_ascii_lowercase(),
        })
        .collect()
}

pub fn raw_file_name(cfg: &ExperimentConfig) -> String {
    match cfg.protocol {
        Protocol::Fpt => format!("{}_fpt.csv", cfg.name),
        Protocol::SpikeTrain => format!("{}_spikes.csv", cfg.name),
    }
}

pub fn simulate(cfg: &ExperimentConfig) -> CliResult<RawData> {
    match cfg.protocol {
        Protocol::Fpt => simulate_fpt_trials(&cfg.network, &cfg.sim)
            .map(RawData::Fpt)
            .map_err(CliError::runtime),
        Protocol::SpikeTrain => simulate_spike_trains(&cfg.network, &cfg.sim)
            .map(RawData::Trains)
            .map_err(CliError::runtime),
    }
}

pub fn raw_csv(raw: &RawData) -> String {
    match raw {
        RawData::Fpt(s) => io::write_fpt_csv(s),
        RawData::Trains(t) => io::write_spike_csv(t),
    }
}

/// Parse a previously written raw CSV. The header decides the kind; it must
/// match the config's protocol.
pub fn load_raw(text: &str, protocol: Protocol) -> CliResult<RawData> {
    let first_line = text.lines().next().unwrap_or("");
    let kind = if first_line == io::SPIKE_HEADER {
        Protocol::SpikeTrain
    } else if first_line.starts_with("trial,") {
        Protocol::Fpt
    } else {
        return Err(CliError::Validation(format!(
            "input is neither a spike CSV nor an FPT CSV (header {first_line:?})"
        )));
    };
    if kind != protocol {
        return Err(CliError::Validation(format!(
            "input is a {} file but the config protocol is {}",
            kind.as_str(),
            protocol.as_str()
        )));
    }
    match kind {
        Protocol::SpikeTrain => io::read_spike_csv(text)
            .map(RawData::Trains)
            .map_err(CliError::validation),
        Protocol::Fpt => io::read_fpt_csv(text)
            .map(RawData::Fpt)
            .map_err(CliError::validation),
    }
}

fn case_wanted(cfg: &ExperimentConfig, label: &str) -> bool {
    match &cfg.cases {
        None => true,
        Some(list) => list.iter().any(|c| c == label),
    }
}

fn spike_samples(cfg: &ExperimentConfig, trains: &SpikeTrains) -> CliResult<Vec<PairedSample>> {
    let cases = enumerate_cases(trains, cfg.sim.burn_in_spikes).map_err(CliError::runtime)?;
    let n = trains.n_neurons();
    Ok(cases
        .samples
        .into_iter()
        .filter(|s| case_wanted(cfg, &s.label(n)))
        .collect())
}

/// Labeled (T, Delta) or (FPT_i, FPT_j) point sets, one entry per kept case.
type LabeledPairs = Vec<(String, Vec<(f64, f64)>)>;

fn fpt_pair_set(cfg: &ExperimentConfig, sample: &FptSample) -> CliResult<LabeledPairs> {
    let mut out = Vec::new();
    for (i, j) in fpt_pair_indices(sample.n_neurons()) {
        let label = fpt_pair_label(i, j);
        if case_wanted(cfg, &label) {
            let pairs = fpt_pairs(sample, i, j).map_err(CliError::runtime)?;
            out.push((label, pairs));
        }
    }
    Ok(out)
}

/// Extract and summarize. Produces per-case paired CSVs (+ sidecar metadata)
/// for the spike-train protocol, and the summary CSV and aligned text table
/// for both protocols. `source` names the raw artifact the samples came from.
pub fn analyze(cfg: &ExperimentConfig, raw: &RawData, source: &str) -> CliResult<RunOutput> {
    let mut files: Vec<FileEntry> = Vec::new();
    let mut summaries = Vec::new();
    match raw {
        RawData::Trains(trains) => {
            let n = trains.n_neurons();
            for sample in spike_samples(cfg, trains)? {
                let label = sample.label(n);
                let s = slug(&label);
                files.push((
                    format!("{}_{}.csv", cfg.name, s),
                    io::write_paired_csv(&sample).into_bytes(),
                ));
                files.push((
                    format!("{}_{}.toml", cfg.name, s),
                    io::paired_sample_meta(&sample, cfg.sim.burn_in_spikes, source).into_bytes(),
                ));
                summaries.push(summarize(&sample.pairs, &label).map_err(CliError::runtime)?);
            }
        }
        RawData::Fpt(sample) => {
            for (label, pairs) in fpt_pair_set(cfg, sample)? {
                summaries.push(summarize(&pairs, &label).map_err(CliError::runtime)?);
            }
        }
    }
    files.push((
        format!("{}_summary.csv", cfg.name),
        io::write_summary_csv(&summaries).into_bytes(),
    ));
    files.push((
        format!("{}_summary.txt", cfg.name),
        dependence_table(&summaries).text.into_bytes(),
    ));
    Ok(RunOutput { files, summaries })
}

fn copula_points(cfg: &ExperimentConfig, pairs: &[(f64, f64)]) -> CliResult<Vec<(f64, f64)>> {
    Ok(pseudo_observations_with(pairs, cfg.rank_denominator)
        .map_err(CliError::runtime)?
        .pairs()
        .to_vec())
}

/// Render the figure set: the network diagram plus copula scatterplots
/// (2-neuron experiments) or panel grids (3-neuron experiments).
pub fn render(cfg: &ExperimentConfig, raw: &RawData) -> CliResult<Vec<FileEntry>> {
    let mut files: Vec<FileEntry> = Vec::new();
    files.push((
        format!("{}_network.svg", cfg.name),
        network_diagram(&cfg.network).into_bytes(),
    ));
    match raw {
        RawData::Fpt(sample) => {
            for (label, pairs) in fpt_pair_set(cfg, sample)? {
                let points = copula_points(cfg, &pairs)?;
                let (i, j) = pair_indices_of(&label);
                let spec = PlotSpec {
                    title: label.clone(),
                    x_label: format!("rank FPT {i}"),
                    y_label: format!("rank FPT {j}"),
                };
                files.push((
                    format!("{}_{}.svg", cfg.name, slug(&label)),
                    scatterplot_svg(&points, &spec).into_bytes(),
                ));
            }
            if sample.n_neurons() > 2 {
                let grid = fpt_panel_grid(sample, &cfg.name).map_err(CliError::runtime)?;
                files.push((
                    format!("{}_fpt_panels.svg", cfg.name),
                    panel_grid_svg(&grid).into_bytes(),
                ));
            }
        }
        RawData::Trains(trains) => {
            let n = trains.n_neurons();
            if n <= 2 {
                for sample in spike_samples(cfg, trains)? {
                    let label = sample.label(n);
                    let points = copula_points(cfg, &sample.pairs)?;
                    let spec = PlotSpec {
                        title: label.clone(),
                        x_label: "rank T".into(),
                        y_label: "rank D".into(),
                    };
                    files.push((
                        format!("{}_{}.svg", cfg.name, slug(&label)),
                        scatterplot_svg(&points, &spec).into_bytes(),
                    ));
                }
            } else {
                for target in 0..n {
                    for dir in [Direction::Forward, Direction::Backward] {
                        let title = format!("{} {}", dir.short(), neuron_letter(target));
                        let grid =
                            target_panel_grid(trains, target, dir, cfg.sim.burn_in_spikes, &title)
                                .map_err(CliError::runtime)?;
                        files.push((
                            format!(
                                "{}_panels_{}_{}.svg",
                                cfg.name,
                                dir.short().to_ascii_lowercase(),
                                neuron_letter(target).to_ascii_lowercase()
                            ),
                            panel_grid_svg(&grid).into_bytes(),
                        ));
                    }
                }
            }
        }
    }
    Ok(files)
}

/// "FPT-12" -> (1, 2) for axis labels.
fn pair_indices_of(label: &str) -> (char, char) {
    let digits: Vec<char> = label.chars().filter(|c| c.is_ascii_digit()).collect();
    (digits[0], digits[1])
}

/// The full pipeline for one experiment: simulate, write the raw CSV,
/// analyze, render.
pub fn run(cfg: &ExperimentConfig) -> CliResult<RunOutput> {
    let raw = simulate(cfg)?;
    let raw_name = raw_file_name(cfg);
    let mut files: Vec<FileEntry> = vec![(raw_name.clone(), raw_csv(&raw).into_bytes())];
    let analysis = analyze(cfg, &raw, &raw_name)?;
    files.extend(analysis.files);
    files.extend(render(cfg, &raw)?);
    Ok(RunOutput {
        files,
        summaries: analysis.summaries,
    })
}

/// `run`, optionally repeated with dt halved; the convergence artifacts go
/// under a `dt_halved/` subdirectory of the same manifest.
pub fn run_with_options(cfg: &ExperimentConfig, dt_halve: bool) -> CliResult<RunOutput> {
    let mut out = run(cfg)?;
    if dt_halve {
        let mut half = cfg.clone();
        half.sim.dt_ms /= 2.0;
        let half_out = run(&half)?;
        out.files.extend(
            half_out
                .files
                .into_iter()
                .map(|(name, bytes)| (format!("dt_halved/{name}"), bytes)),
        );
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::parse_config;

    fn spike_cfg(duration_ms: f64) -> ExperimentConfig {
        let text = format!(
            r#"
[[neuron]]
mu_mv_per_ms = 1.2
tau_ms = 10.0
sigma2_mv2_per_ms = 0.3
theta_mv = 10.0
reset_mv = 0.0

[[neuron]]
mu_mv_per_ms = 1.2
tau_ms = 10.0
sigma2_mv2_per_ms = 0.3
theta_mv = 10.0
reset_mv = 0.0

[coupling]
noise_correlation = 0.5

[simulation]
protocol = "spike_train"
duration_ms = {duration_ms}
burn_in_spikes = 5
"#
        );
        parse_config(&text, "t").unwrap()
    }

    fn fpt_cfg(n_trials: usize) -> ExperimentConfig {
        let text = format!(
            r#"
[[neuron]]
mu_mv_per_ms = 1.2
tau_ms = 10.0
sigma2_mv2_per_ms = 0.3
theta_mv = 10.0
reset_mv = 0.0

[[neuron]]
mu_mv_per_ms = 1.2
tau_ms = 10.0
sigma2_mv2_per_ms = 0.3
theta_mv = 10.0
reset_mv = 0.0

[coupling]
noise_correlation = 0.5

[simulation]
protocol = "fpt"
n_trials = {n_trials}
"#
        );
        parse_config(&text, "t").unwrap()
    }

    #[test]
    fn spike_run_produces_the_expected_artifact_set() {
        let cfg = spike_cfg(5000.0);
        let out = run(&cfg).unwrap();
        let names: Vec<&str> = out.files.iter().map(|(n, _)| n.as_str()).collect();
        let expected = [
            "t_spikes.csv",
            "t_fwd_a.csv",
            "t_fwd_a.toml",
            "t_bwd_a.csv",
            "t_bwd_a.toml",
            "t_fwd_b.csv",
            "t_fwd_b.toml",
            "t_bwd_b.csv",
            "t_bwd_b.toml",
            "t_summary.csv",
            "t_summary.txt",
            "t_network.svg",
            "t_fwd_a.svg",
            "t_bwd_a.svg",
            "t_fwd_b.svg",
            "t_bwd_b.svg",
        ];
        for e in expected {
            assert!(names.contains(&e), "missing {e} in {names:?}");
        }
        assert_eq!(names.len(), expected.len());
        assert_eq!(out.summaries.len(), 4);
        assert_eq!(out.summaries[0].label, "FWD-A");
        assert_eq!(out.summaries[1].label, "BWD-A");
    }

    #[test]
    fn fpt_run_produces_the_expected_artifact_set() {
        let cfg = fpt_cfg(50);
        let out = run(&cfg).unwrap();
        let names: Vec<&str> = out.files.iter().map(|(n, _)| n.as_str()).collect();
        assert_eq!(
            names,
            vec![
                "t_fpt.csv",
                "t_summary.csv",
                "t_summary.txt",
                "t_network.svg",
                "t_fpt_12.svg"
            ]
        );
        assert_eq!(out.summaries.len(), 1);
        assert_eq!(out.summaries[0].label, "FPT-12");
        assert_eq!(out.summaries[0].n, 50);
    }

    #[test]
    fn case_filter_restricts_artifacts_and_summaries() {
        let mut cfg = spike_cfg(5000.0);
        cfg.cases = Some(vec!["FWD-A".into()]);
        let out = run(&cfg).unwrap();
        let names: Vec<&str> = out.files.iter().map(|(n, _)| n.as_str()).collect();
        assert!(names.contains(&"t_fwd_a.csv"));
        assert!(!names.iter().any(|n| n.contains("bwd")));
        assert_eq!(out.summaries.len(), 1);
    }

    #[test]
    fn loaded_csv_analysis_matches_in_memory_analysis() {
        let cfg = spike_cfg(5000.0);
        let raw = simulate(&cfg).unwrap();
        let csv = raw_csv(&raw);
        let loaded = load_raw(&csv, Protocol::SpikeTrain).unwrap();
        let a = analyze(&cfg, &raw, "src.csv").unwrap();
        let b = analyze(&cfg, &loaded, "src.csv").unwrap();
        assert_eq!(a.summaries, b.summaries);
        let af: Vec<_> = a.files.iter().collect();
        let bf: Vec<_> = b.files.iter().collect();
        assert_eq!(af, bf);
    }

    #[test]
    fn load_raw_rejects_protocol_mismatch_and_garbage() {
        let cfg = fpt_cfg(10);
        let raw = simulate(&cfg).unwrap();
        let csv = raw_csv(&raw);
        let err = load_raw(&csv, Protocol::SpikeTrain).unwrap_err();
        assert_eq!(err.exit_code(), 1);
        let err = load_raw("nonsense\n1,2\n", Protocol::Fpt).unwrap_err();
        assert_eq!(err.exit_code(), 1);
    }

    #[test]
    fn dt_halve_doubles_the_artifacts_under_a_subdirectory() {
        let cfg = fpt_cfg(20);
        let out = run_with_options(&cfg, true).unwrap();
        let plain = out
            .files
            .iter()
            .filter(|(n, _)| !n.starts_with("dt_halved/"))
            .count();
        let halved = out
            .files
            .iter()
            .filter(|(n, _)| n.starts_with("dt_halved/"))
            .count();
        assert_eq!(plain, halved);
    }

    #[test]
    fn run_is_deterministic_for_a_fixed_seed() {
        let cfg = spike_cfg(2000.0);
        let a = run(&cfg).unwrap();
        let b = run(&cfg).unwrap();
        assert_eq!(a.files, b.files);
        let mut seeded = cfg.clone();
        seeded.sim.master_seed = 43;
        let c = run(&seeded).unwrap();
        assert_ne!(a.files, c.files);
    }
}
