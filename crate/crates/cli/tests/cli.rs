//! End-to-end tests of the `spikecopula` binary: every subcommand, the
//! exit-code contract (0 ok, 1 validation, 2 runtime), and stage
//! separability through real files.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use spikecopula_cli::config::load_config;

const TINY_SPIKE_CONFIG: &str = r#"
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
duration_ms = 3000.0
burn_in_spikes = 5
master_seed = 9
"#;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_spikecopula"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn write_config(dir: &Path, name: &str, body: &str) -> PathBuf {
    let path = dir.join(name);
    std::fs::write(&path, body).unwrap();
    path
}

#[test]
fn shipped_example_configs_parse_and_validate() {
    let configs = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs");
    let mut seen = 0;
    for entry in std::fs::read_dir(configs).unwrap() {
        let path = entry.unwrap().path();
        if path.extension().is_some_and(|e| e == "toml") {
            load_config(&path).unwrap_or_else(|e| panic!("{} invalid: {e}", path.display()));
            seen += 1;
        }
    }
    assert!(seen >= 3, "expected shipped example configs, found {seen}");
}

#[test]
fn help_exits_zero() {
    let out = run(&["--help"]);
    assert!(out.status.success());
    let text = String::from_utf8_lossy(&out.stdout);
    for sub in ["simulate", "analyze", "report", "reproduce"] {
        assert!(text.contains(sub), "help missing {sub}: {text}");
    }
}

#[test]
fn simulate_analyze_report_stage_separability() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(dir.path(), "tiny.toml", TINY_SPIKE_CONFIG);
    let sim_dir = dir.path().join("sim");
    let out = run(&[
        "simulate",
        "--config",
        config.to_str().unwrap(),
        "--out",
        sim_dir.to_str().unwrap(),
    ]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(stdout.contains("FWD-A"), "summary table missing: {stdout}");
    for name in [
        "tiny_spikes.csv",
        "tiny_summary.csv",
        "tiny_summary.txt",
        "tiny_fwd_a.csv",
        "tiny_fwd_a.toml",
        "tiny_fwd_a.svg",
        "tiny_network.svg",
        "manifest.txt",
    ] {
        assert!(sim_dir.join(name).exists(), "missing {name}");
    }

    // Analyzing the exported CSV reproduces the simulate run's summary bytes.
    let an_dir = dir.path().join("an");
    let spikes = sim_dir.join("tiny_spikes.csv");
    let out = run(&[
        "analyze",
        "--config",
        config.to_str().unwrap(),
        "--input",
        spikes.to_str().unwrap(),
        "--out",
        an_dir.to_str().unwrap(),
    ]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let a = std::fs::read(sim_dir.join("tiny_summary.csv")).unwrap();
    let b = std::fs::read(an_dir.join("tiny_summary.csv")).unwrap();
    assert_eq!(
        a, b,
        "summary differs between simulate and analyze-from-csv"
    );

    let rep_dir = dir.path().join("rep");
    let out = run(&[
        "report",
        "--config",
        config.to_str().unwrap(),
        "--input",
        spikes.to_str().unwrap(),
        "--out",
        rep_dir.to_str().unwrap(),
    ]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    for name in [
        "tiny_network.svg",
        "tiny_fwd_a.svg",
        "tiny_bwd_b.svg",
        "manifest.txt",
    ] {
        assert!(rep_dir.join(name).exists(), "missing {name}");
    }
    // Figures rendered by simulate and by report from its CSV are identical.
    let a = std::fs::read(sim_dir.join("tiny_bwd_a.svg")).unwrap();
    let b = std::fs::read(rep_dir.join("tiny_bwd_a.svg")).unwrap();
    assert_eq!(a, b);
}

#[test]
fn same_seed_same_bytes_different_seed_different_bytes() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(dir.path(), "tiny.toml", TINY_SPIKE_CONFIG);
    let run_to = |sub: &str, seed: &str| -> Vec<u8> {
        let out_dir = dir.path().join(sub);
        let out = run(&[
            "simulate",
            "--config",
            config.to_str().unwrap(),
            "--seed",
            seed,
            "--out",
            out_dir.to_str().unwrap(),
        ]);
        assert!(out.status.success());
        std::fs::read(out_dir.join("manifest.txt")).unwrap()
    };
    let a = run_to("a", "7");
    let b = run_to("b", "7");
    let c = run_to("c", "8");
    assert_eq!(a, b);
    assert_ne!(a, c);
}

#[test]
fn dt_halve_emits_convergence_artifacts() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(dir.path(), "tiny.toml", TINY_SPIKE_CONFIG);
    let out_dir = dir.path().join("out");
    let out = run(&[
        "simulate",
        "--config",
        config.to_str().unwrap(),
        "--dt-halve",
        "--out",
        out_dir.to_str().unwrap(),
    ]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    assert!(out_dir.join("dt_halved/tiny_spikes.csv").exists());
    assert!(out_dir.join("dt_halved/tiny_summary.csv").exists());
    let manifest = std::fs::read_to_string(out_dir.join("manifest.txt")).unwrap();
    assert!(manifest.contains("dt_halved/tiny_spikes.csv"), "{manifest}");
}

#[test]
fn validation_failures_exit_1() {
    let dir = tempfile::tempdir().unwrap();

    // Invalid physics: tau = 0, diagnostic names the field.
    let bad = write_config(
        dir.path(),
        "bad.toml",
        &TINY_SPIKE_CONFIG.replace("tau_ms = 10.0", "tau_ms = 0.0"),
    );
    let out = run(&["simulate", "--config", bad.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("tau"), "stderr should name the field: {err}");

    // Unknown preset.
    let out = run(&["reproduce", "tableX"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("table2"));

    // Missing required argument.
    let out = run(&["simulate"]);
    assert_eq!(out.status.code(), Some(1));

    // Protocol mismatch between config and input file.
    let good = write_config(dir.path(), "tiny.toml", TINY_SPIKE_CONFIG);
    let fpt = dir.path().join("x.csv");
    std::fs::write(&fpt, "trial,fpt_1_ms,fpt_2_ms\n0,1.5,2.0\n").unwrap();
    let out = run(&[
        "analyze",
        "--config",
        good.to_str().unwrap(),
        "--input",
        fpt.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(1));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("protocol"), "{err}");

    // Corrupt input CSV.
    let broken = dir.path().join("broken.csv");
    std::fs::write(&broken, "neuron,time_ms\n0,2.0\n0,1.0\n").unwrap();
    let out = run(&[
        "analyze",
        "--config",
        good.to_str().unwrap(),
        "--input",
        broken.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn runtime_failures_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(dir.path(), "tiny.toml", TINY_SPIKE_CONFIG);
    // Output directory path collides with an existing file.
    let blocker = dir.path().join("blocker");
    std::fs::write(&blocker, "not a directory").unwrap();
    let out = run(&[
        "simulate",
        "--config",
        config.to_str().unwrap(),
        "--out",
        blocker.to_str().unwrap(),
    ]);
    assert_eq!(
        out.status.code(),
        Some(2),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
}
