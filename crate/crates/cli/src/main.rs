use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use spikecopula::viz::dependence_table;
use spikecopula_cli::config::{load_config, ExperimentConfig};
use spikecopula_cli::error::{CliError, CliResult};
use spikecopula_cli::{manifest, pipeline, presets};

#[derive(Parser)]
#[command(
    name = "spikecopula",
    version,
    about = "Simulate small coupled integrate-and-fire networks and analyze spike-timing dependence"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Run an experiment end to end: simulate, extract, summarize, render.
    Simulate {
        /// Experiment config (TOML).
        #[arg(long)]
        config: PathBuf,
        /// Override the config's master seed.
        #[arg(long)]
        seed: Option<u64>,
        /// Output directory (default: the config's [output] dir, else ".").
        #[arg(long)]
        out: Option<PathBuf>,
        /// Size of the worker pool for trial-parallel runs.
        #[arg(long)]
        workers: Option<usize>,
        /// Re-run with dt halved; convergence artifacts land in dt_halved/.
        #[arg(long)]
        dt_halve: bool,
    },
    /// Extract intervals and dependence summaries from a raw CSV.
    Analyze {
        #[arg(long)]
        config: PathBuf,
        /// Spike or FPT CSV produced by an earlier simulate run.
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Render figures (network diagram, copula scatterplots) from a raw CSV.
    Report {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run a bundled preset and emit reference-vs-computed tables.
    Reproduce {
        /// One of: table2, table3, table4-family, table5, table6,
        /// fpt-3neuron-gallery, spiketrain-3neuron-gallery.
        preset: String,
        #[arg(long)]
        seed: Option<u64>,
        /// Output directory (default: ./<preset>).
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        workers: Option<usize>,
    },
}

fn apply_workers(workers: Option<usize>) -> CliResult<()> {
    if let Some(n) = workers {
        if n == 0 {
            return Err(CliError::Validation("--workers must be at least 1".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(CliError::runtime)?;
    }
    Ok(())
}

fn out_dir(flag: Option<PathBuf>, cfg: &ExperimentConfig) -> PathBuf {
    flag.or_else(|| cfg.output_dir.clone())
        .unwrap_or_else(|| PathBuf::from("."))
}

fn read_input(path: &Path) -> CliResult<String> {
    std::fs::read_to_string(path)
        .map_err(|e| CliError::Validation(format!("cannot read {}: {e}", path.display())))
}

fn announce(manifest_path: &Path, n_files: usize) {
    println!(
        "wrote {n_files} artifacts, manifest at {}",
        manifest_path.display()
    );
}

fn dispatch(cli: Cli) -> CliResult<()> {
    match cli.cmd {
        Cmd::Simulate {
            config,
            seed,
            out,
            workers,
            dt_halve,
        } => {
            let mut cfg = load_config(&config)?;
            if let Some(s) = seed {
                cfg.sim.master_seed = s;
            }
            apply_workers(workers)?;
            let run = pipeline::run_with_options(&cfg, dt_halve)?;
            let dir = out_dir(out, &cfg);
            let manifest_path = manifest::write_all(&dir, &run.files)?;
            print!("{}", dependence_table(&run.summaries).text);
            announce(&manifest_path, run.files.len());
            Ok(())
        }
        Cmd::Analyze { config, input, out } => {
            let cfg = load_config(&config)?;
            let text = read_input(&input)?;
            let raw = pipeline::load_raw(&text, cfg.protocol)?;
            let source = input
                .file_name()
                .map(|s| s.to_string_lossy().into_owned())
                .unwrap_or_else(|| input.display().to_string());
            let run = pipeline::analyze(&cfg, &raw, &source)?;
            let dir = out_dir(out, &cfg);
            let manifest_path = manifest::write_all(&dir, &run.files)?;
            print!("{}", dependence_table(&run.summaries).text);
            announce(&manifest_path, run.files.len());
            Ok(())
        }
        Cmd::Report { config, input, out } => {
            let cfg = load_config(&config)?;
            let text = read_input(&input)?;
            let raw = pipeline::load_raw(&text, cfg.protocol)?;
            let files = pipeline::render(&cfg, &raw)?;
            let dir = out_dir(out, &cfg);
            let manifest_path = manifest::write_all(&dir, &files)?;
            announce(&manifest_path, files.len());
            Ok(())
        }
        Cmd::Reproduce {
            preset,
            seed,
            out,
            workers,
        } => {
            let plan = presets::plan(&preset, seed)?;
            apply_workers(workers)?;
            let run = presets::run_plan(&plan)?;
            let dir = out.unwrap_or_else(|| PathBuf::from(preset.replace('-', "_")));
            let manifest_path = manifest::write_all(&dir, &run.files)?;
            print!("{}", run.report);
            if !run.report.ends_with('\n') {
                println!();
            }
            announce(&manifest_path, run.files.len());
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let ok = matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion);
            let _ = e.print();
            return if ok {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            };
        }
    };
    match dispatch(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
