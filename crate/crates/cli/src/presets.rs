//! Bundled experiment presets: the published 2-neuron coefficient tables,
//! the 3-neuron topology family, and the scatterplot galleries. Each preset
//! expands to a list of `ExperimentConfig`s plus reference coefficient rows;
//! running it emits every experiment's artifacts and, where references
//! exist, a reference-vs-computed comparison table.

use spikecopula::engine::CorrelationMatrix;
use spikecopula::network::{NetworkSpec, NeuronParams, SimConfig};
use spikecopula::stats::{DependenceSummary, RankDenominator};

use crate::config::{ExperimentConfig, Protocol};
use crate::error::{CliError, CliResult};
use crate::pipeline::{self, FileEntry};

pub const PRESET_NAMES: [&str; 7] = [
    "table2",
    "table3",
    "table4-family",
    "table5",
    "table6",
    "fpt-3neuron-gallery",
    "spiketrain-3neuron-gallery",
];

/// Reference coefficients for one case. `r`/`rho` are absent where the
/// source table reports Kendall tau only.
#[derive(Debug, Clone, Copy)]
pub struct RefVal {
    pub r: Option<f64>,
    pub tau: f64,
    pub rho: Option<f64>,
}

impl RefVal {
    fn full(r: f64, tau: f64, rho: f64) -> Self {
        RefVal {
            r: Some(r),
            tau,
            rho: Some(rho),
        }
    }

    fn tau_only(tau: f64) -> Self {
        RefVal {
            r: None,
            tau,
            rho: None,
        }
    }
}

/// One comparison row: which experiment and case to read the computed
/// summary from, how to head the row, and the reference values.
#[derive(Debug, Clone)]
pub struct CompareRow {
    pub experiment: String,
    pub case: String,
    pub display: String,
    pub refs: RefVal,
}

/// A preset expanded into concrete experiments.
#[derive(Debug, Clone)]
pub struct PresetPlan {
    pub preset: String,
    pub experiments: Vec<ExperimentConfig>,
    pub compare: Vec<CompareRow>,
}

fn std_neurons(n: usize) -> Vec<NeuronParams> {
    vec![NeuronParams::standard(); n]
}

fn corr_pair(c: f64) -> NetworkSpec {
    NetworkSpec::correlated(std_neurons(2), CorrelationMatrix::pair(c).expect("valid c"))
        .expect("valid network")
}

fn jump_pair(h12: f64, h21: f64) -> NetworkSpec {
    NetworkSpec::jump_coupled(std_neurons(2), vec![vec![0.0, h12], vec![h21, 0.0]])
        .expect("valid network")
}

fn corr_triple(c: f64) -> NetworkSpec {
    NetworkSpec::correlated(
        std_neurons(3),
        CorrelationMatrix::uniform(3, c).expect("valid c"),
    )
    .expect("valid network")
}

fn jump_triple(h: [[f64; 3]; 3]) -> NetworkSpec {
    NetworkSpec::jump_coupled(std_neurons(3), h.iter().map(|r| r.to_vec()).collect())
        .expect("valid network")
}

fn fpt_exp(name: &str, network: NetworkSpec, seed: Option<u64>) -> ExperimentConfig {
    let mut sim = SimConfig::fpt(10_000);
    if let Some(s) = seed {
        sim.master_seed = s;
    }
    ExperimentConfig {
        name: name.into(),
        network,
        sim,
        protocol: Protocol::Fpt,
        cases: None,
        rank_denominator: RankDenominator::N,
        output_dir: None,
    }
}

fn spike_exp(name: &str, network: NetworkSpec, seed: Option<u64>) -> ExperimentConfig {
    let mut sim = SimConfig::spike_train(250_000.0);
    if let Some(s) = seed {
        sim.master_seed = s;
    }
    ExperimentConfig {
        name: name.into(),
        network,
        sim,
        protocol: Protocol::SpikeTrain,
        cases: None,
        rank_denominator: RankDenominator::N,
        output_dir: None,
    }
}

/// The six 3-neuron topologies: (short name, display label, network).
fn triple_topologies() -> Vec<(&'static str, &'static str, NetworkSpec)> {
    vec![
        ("corr", "corr c = 0.91", corr_triple(0.91)),
        (
            "full",
            "full h = 1",
            jump_triple([[0.0, 1.0, 1.0], [1.0, 0.0, 1.0], [1.0, 1.0, 0.0]]),
        ),
        (
            "hub",
            "hub h = 3",
            jump_triple([[0.0, 3.0, 3.0], [0.0, 0.0, 0.0], [0.0, 0.0, 0.0]]),
        ),
        (
            "converging",
            "converging h = 3",
            jump_triple([[0.0, 0.0, 3.0], [0.0, 0.0, 3.0], [0.0, 0.0, 0.0]]),
        ),
        (
            "chain",
            "chain h = 3",
            jump_triple([[0.0, 3.0, 0.0], [0.0, 0.0, 3.0], [0.0, 0.0, 0.0]]),
        ),
        (
            "excite_inhibit",
            "excite-inhibit h = +/-3",
            jump_triple([[0.0, 0.0, -3.0], [0.0, 0.0, 3.0], [0.0, 0.0, 0.0]]),
        ),
    ]
}

/// Expand a preset name. `seed` overrides every experiment's master seed.
pub fn plan(preset: &str, seed: Option<u64>) -> CliResult<PresetPlan> {
    let mut experiments = Vec::new();
    let mut compare = Vec::new();
    match preset {
        "table2" => {
            let rows: [(&str, &str, f64, RefVal); 4] = [
                (
                    "table2_c0_50",
                    "c = 0.5",
                    0.5,
                    RefVal::full(0.38, 0.28, 0.40),
                ),
                (
                    "table2_c0_80",
                    "c = 0.8",
                    0.8,
                    RefVal::full(0.68, 0.52, 0.68),
                ),
                (
                    "table2_c0_91",
                    "c = 0.91",
                    0.91,
                    RefVal::full(0.80, 0.68, 0.83),
                ),
                (
                    "table2_c_neg0_91",
                    "c = -0.91",
                    -0.91,
                    RefVal::full(-0.56, -0.48, -0.70),
                ),
            ];
            for (name, display, c, refs) in rows {
                experiments.push(fpt_exp(name, corr_pair(c), seed));
                compare.push(CompareRow {
                    experiment: name.into(),
                    case: "FPT-12".into(),
                    display: display.into(),
                    refs,
                });
            }
        }
        "table3" => {
            let rows: [(&str, &str, (f64, f64), RefVal); 7] = [
                (
                    "table3_h_1_1",
                    "h = (1, 1)",
                    (1.0, 1.0),
                    RefVal::full(0.34, 0.35, 0.43),
                ),
                (
                    "table3_h_3_3",
                    "h = (3, 3)",
                    (3.0, 3.0),
                    RefVal::full(0.93, 0.92, 0.94),
                ),
                (
                    "table3_h_3_0",
                    "h = (3, 0)",
                    (3.0, 0.0),
                    RefVal::full(0.49, 0.45, 0.55),
                ),
                (
                    "table3_h_3_1",
                    "h = (3, 1)",
                    (3.0, 1.0),
                    RefVal::full(0.62, 0.63, 0.70),
                ),
                (
                    "table3_h_neg1_neg1",
                    "h = (-1, -1)",
                    (-1.0, -1.0),
                    RefVal::full(-0.23, -0.18, -0.30),
                ),
                (
                    "table3_h_neg3_neg3",
                    "h = (-3, -3)",
                    (-3.0, -3.0),
                    RefVal::full(-0.47, -0.29, -0.53),
                ),
                (
                    "table3_h_3_neg3",
                    "h = (3, -3)",
                    (3.0, -3.0),
                    RefVal::full(0.35, 0.32, 0.36),
                ),
            ];
            for (name, display, (h12, h21), refs) in rows {
                experiments.push(fpt_exp(name, jump_pair(h12, h21), seed));
                compare.push(CompareRow {
                    experiment: name.into(),
                    case: "FPT-12".into(),
                    display: display.into(),
                    refs,
                });
            }
        }
        "table4-family" => {
            // Reference tau per pair, keyed (FPT-12, FPT-13, FPT-23).
            let refs: [(&str, [f64; 3]); 6] = [
                ("corr", [0.67, 0.67, 0.67]),
                ("full", [0.48, 0.48, 0.48]),
                ("hub", [0.28, 0.28, 0.46]),
                ("converging", [0.0, 0.31, 0.30]),
                ("chain", [0.47, 0.53, 0.28]),
                ("excite_inhibit", [0.0, 0.14, 0.44]),
            ];
            for (short, display, network) in triple_topologies() {
                let name = format!("table4_{short}");
                experiments.push(fpt_exp(&name, network, seed));
                let taus = refs
                    .iter()
                    .find(|(s, _)| *s == short)
                    .map(|(_, t)| *t)
                    .expect("every topology has reference taus");
                for (case, tau) in ["FPT-12", "FPT-13", "FPT-23"].iter().zip(taus) {
                    compare.push(CompareRow {
                        experiment: name.clone(),
                        case: (*case).into(),
                        display: format!("{display} {case}"),
                        refs: RefVal::tau_only(tau),
                    });
                }
            }
        }
        "table5" => {
            let name = "table5_c0_50";
            experiments.push(spike_exp(name, corr_pair(0.5), seed));
            let rows: [(&str, RefVal); 4] = [
                ("FWD-A", RefVal::full(0.16, 0.09, 0.13)),
                ("BWD-A", RefVal::full(0.19, 0.11, 0.16)),
                ("FWD-B", RefVal::full(0.17, 0.10, 0.15)),
                ("BWD-B", RefVal::full(0.16, 0.09, 0.13)),
            ];
            for (case, refs) in rows {
                compare.push(CompareRow {
                    experiment: name.into(),
                    case: case.into(),
                    display: case.into(),
                    refs,
                });
            }
        }
        "table6" => {
            let name = "table6_h_1_1";
            experiments.push(spike_exp(name, jump_pair(1.0, 1.0), seed));
            let rows: [(&str, RefVal); 4] = [
                ("FWD-A", RefVal::full(0.15, 0.13, 0.16)),
                ("BWD-A", RefVal::full(0.19, 0.15, 0.19)),
                ("FWD-B", RefVal::full(0.16, 0.14, 0.17)),
                ("BWD-B", RefVal::full(0.20, 0.16, 0.21)),
            ];
            for (case, refs) in rows {
                compare.push(CompareRow {
                    experiment: name.into(),
                    case: case.into(),
                    display: case.into(),
                    refs,
                });
            }
        }
        "fpt-3neuron-gallery" => {
            for (short, _, network) in triple_topologies() {
                experiments.push(fpt_exp(&format!("fpt3_{short}"), network, seed));
            }
        }
        "spiketrain-3neuron-gallery" => {
            for (short, _, network) in triple_topologies() {
                experiments.push(spike_exp(&format!("spk3_{short}"), network, seed));
            }
        }
        other => {
            return Err(CliError::Validation(format!(
                "unknown preset {other:?}; available presets: {}",
                PRESET_NAMES.join(", ")
            )));
        }
    }
    Ok(PresetPlan {
        preset: preset.into(),
        experiments,
        compare,
    })
}

fn fmt_opt(v: Option<f64>, precision: usize) -> String {
    v.map(|x| format!("{x:.precision$}")).unwrap_or_default()
}

/// Computed tau as the text table shows it: indistinguishable-from-zero
/// dependence (p > 0.05) renders as a bare 0.
fn tau_display(s: &DependenceSummary) -> String {
    if s.tau_p_value > 0.05 {
        "0".into()
    } else {
        format!("{:.2}", s.kendall_tau)
    }
}

/// Reference-vs-computed table over the finished summaries.
pub fn comparison(
    rows: &[CompareRow],
    lookup: &dyn Fn(&str, &str) -> Option<DependenceSummary>,
) -> CliResult<(String, String)> {
    let has_r = rows.iter().any(|r| r.refs.r.is_some());
    let mut csv = String::from(
        "experiment,case,ref_r,computed_r,ref_tau,computed_tau,ref_rho,computed_rho,tau_p_value\n",
    );
    let mut header: Vec<String> = vec!["case".into()];
    if has_r {
        header.extend(["ref_r".into(), "r_hat".into()]);
    }
    header.extend(["ref_tau".into(), "tau_hat".into()]);
    if has_r {
        header.extend(["ref_rho".into(), "rho_hat".into()]);
    }
    let mut table: Vec<Vec<String>> = vec![header];

    for row in rows {
        let s = lookup(&row.experiment, &row.case).ok_or_else(|| {
            CliError::Runtime(format!(
                "no computed summary for {} / {}",
                row.experiment, row.case
            ))
        })?;
        csv.push_str(&format!(
            "{},{},{},{:.4},{},{:.4},{},{:.4},{:.4}\n",
            row.experiment,
            row.case,
            fmt_opt(row.refs.r, 2),
            s.pearson_r,
            format_args!("{:.2}", row.refs.tau),
            s.kendall_tau,
            fmt_opt(row.refs.rho, 2),
            s.spearman_rho,
            s.tau_p_value
        ));
        let mut cells: Vec<String> = vec![row.display.clone()];
        if has_r {
            cells.push(fmt_opt(row.refs.r, 2));
            cells.push(format!("{:.2}", s.pearson_r));
        }
        cells.push(format!("{:.2}", row.refs.tau));
        cells.push(tau_display(&s));
        if has_r {
            cells.push(fmt_opt(row.refs.rho, 2));
            cells.push(format!("{:.2}", s.spearman_rho));
        }
        table.push(cells);
    }

    let cols = table[0].len();
    let widths: Vec<usize> = (0..cols)
        .map(|c| table.iter().map(|r| r[c].len()).max().unwrap_or(0))
        .collect();
    let mut text = String::new();
    for row in &table {
        let mut line = String::new();
        for (c, cell) in row.iter().enumerate() {
            if c == 0 {
                line.push_str(&format!("{:<w$}", cell, w = widths[0]));
            } else {
                line.push_str(&format!("  {:>w$}", cell, w = widths[c]));
            }
        }
        text.push_str(line.trim_end());
        text.push('\n');
    }
    Ok((text, csv))
}

/// Artifacts of a finished preset run plus the report printed to stdout.
pub struct PresetRunOutput {
    pub files: Vec<FileEntry>,
    pub report: String,
}

pub fn run_plan(plan: &PresetPlan) -> CliResult<PresetRunOutput> {
    let mut files: Vec<FileEntry> = Vec::new();
    let mut all: Vec<(String, Vec<DependenceSummary>)> = Vec::new();
    for exp in &plan.experiments {
        let out = pipeline::run(exp)?;
        files.extend(out.files);
        all.push((exp.name.clone(), out.summaries));
    }

    let report = if plan.compare.is_empty() {
        format!(
            "preset {}: ran {} experiments ({})",
            plan.preset,
            plan.experiments.len(),
            plan.experiments
                .iter()
                .map(|e| e.name.as_str())
                .collect::<Vec<_>>()
                .join(", ")
        )
    } else {
        let lookup = |exp: &str, case: &str| -> Option<DependenceSummary> {
            all.iter()
                .find(|(name, _)| name == exp)
                .and_then(|(_, sums)| sums.iter().find(|s| s.label == case).cloned())
        };
        let (text, csv) = comparison(&plan.compare, &lookup)?;
        let stem = plan.preset.replace('-', "_");
        files.push((format!("{stem}_comparison.txt"), text.clone().into_bytes()));
        files.push((format!("{stem}_comparison.csv"), csv.into_bytes()));
        text
    };
    Ok(PresetRunOutput { files, report })
}
