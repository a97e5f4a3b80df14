//! The CSV formats shared by every artifact and the loaders that accept
//! them back. Writers are pure string builders (byte-deterministic given
//! their inputs); raw times use the shortest exact decimal form, summary
//! statistics are fixed to 4 decimals. Loader diagnostics carry 1-based line
//! numbers.

use crate::error::{Error, Result};
use crate::intervals::{Direction, PairedSample};
use crate::network::{FptSample, SpikeTrains};
use crate::stats::DependenceSummary;

pub const SPIKE_HEADER: &str = "neuron,time_ms";
pub const PAIRED_HEADER: &str = "T_ms,Delta_ms";
pub const SUMMARY_HEADER: &str = "label,n,pearson_r,kendall_tau,spearman_rho,tau_p_value";

/// Spike trains as `neuron,time_ms` rows, sorted by time then neuron index.
pub fn write_spike_csv(trains: &SpikeTrains) -> String {
    let mut rows: Vec<(f64, usize)> = Vec::new();
    for neuron in 0..trains.n_neurons() {
        for &t in trains.train(neuron) {
            rows.push((t, neuron));
        }
    }
    rows.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let mut out = String::with_capacity(rows.len() * 16 + 16);
    out.push_str(SPIKE_HEADER);
    out.push('\n');
    for (t, neuron) in rows {
        out.push_str(&format!("{neuron},{t}\n"));
    }
    out
}

/// Parses [`write_spike_csv`] output. Neuron ids must be nonnegative
/// integers; a neuron absent from the file is taken as silent (ids need not
/// be dense). Epochs must be strictly increasing per neuron in file order.
/// The horizon of the returned trains is the last epoch.
pub fn read_spike_csv(text: &str) -> Result<SpikeTrains> {
    let mut lines = text.lines().enumerate();
    match lines.next() {
        Some((_, h)) if h.trim_end() == SPIKE_HEADER => {}
        Some((_, h)) => {
            return Err(Error::Parse {
                line: 1,
                message: format!("expected header `{SPIKE_HEADER}`, found `{h}`"),
            })
        }
        None => {
            return Err(Error::Parse {
                line: 1,
                message: "empty file".into(),
            })
        }
    }
    let mut trains: Vec<Vec<f64>> = Vec::new();
    let mut duration = 0.0f64;
    for (idx, raw) in lines {
        let line_no = idx + 1;
        let line = raw.trim_end();
        if line.is_empty() {
            continue;
        }
        let mut fields = line.split(',');
        let (neuron_s, time_s) = match (fields.next(), fields.next(), fields.next()) {
            (Some(a), Some(b), None) => (a, b),
            _ => {
                return Err(Error::Parse {
                    line: line_no,
                    message: format!("expected 2 comma-separated fields, found `{line}`"),
                })
            }
        };
        let neuron: usize = neuron_s.parse().map_err(|_| Error::Parse {
            line: line_no,
            message: format!("unknown neuron column value `{neuron_s}`"),
        })?;
        let t: f64 = time_s.parse().map_err(|_| Error::Parse {
            line: line_no,
            message: format!("bad time value `{time_s}`"),
        })?;
        if !t.is_finite() || t < 0.0 {
            return Err(Error::Parse {
                line: line_no,
                message: format!("time {t} is not a nonnegative finite number"),
            });
        }
        if trains.len() <= neuron {
            trains.resize(neuron + 1, Vec::new());
        }
        if let Some(&last) = trains[neuron].last() {
            if t <= last {
                return Err(Error::Parse {
                    line: line_no,
                    message: format!("neuron {neuron}: epoch {t} does not increase past {last}"),
                });
            }
        }
        trains[neuron].push(t);
        duration = duration.max(t);
    }
    SpikeTrains::new(trains, duration)
}

fn fpt_header(n_neurons: usize) -> String {
    let mut h = String::from("trial");
    for i in 1..=n_neurons {
        h.push_str(&format!(",fpt_{i}_ms"));
    }
    h
}

/// First-passage sample as `trial,fpt_1_ms,...` rows, one per kept trial;
/// discarded trials appear as gaps in the trial column.
pub fn write_fpt_csv(sample: &FptSample) -> String {
    let mut out = String::with_capacity(sample.len() * 24 + 24);
    out.push_str(&fpt_header(sample.n_neurons()));
    out.push('\n');
    for k in 0..sample.len() {
        out.push_str(&format!("{}", sample.trial_ids()[k]));
        for &t in sample.row(k) {
            out.push_str(&format!(",{t}"));
        }
        out.push('\n');
    }
    out
}

/// Parses [`write_fpt_csv`] output. Trial ids must be strictly increasing;
/// ids missing from the range [0, max] are reconstructed as discarded
/// trials.
pub fn read_fpt_csv(text: &str) -> Result<FptSample> {
    let mut lines = text.lines().enumerate();
    let n_neurons = match lines.next() {
        Some((_, h)) => {
            let h = h.trim_end();
            let fields: Vec<&str> = h.split(',').collect();
            if fields.is_empty() || fields[0] != "trial" || fields.len() < 2 {
                return Err(Error::Parse {
                    line: 1,
                    message: format!("expected header `trial,fpt_1_ms,...`, found `{h}`"),
                });
            }
            for (i, f) in fields[1..].iter().enumerate() {
                let want = format!("fpt_{}_ms", i + 1);
                if *f != want {
                    return Err(Error::Parse {
                        line: 1,
                        message: format!("expected column `{want}`, found `{f}`"),
                    });
                }
            }
            fields.len() - 1
        }
        None => {
            return Err(Error::Parse {
                line: 1,
                message: "empty file".into(),
            })
        }
    };
    let mut trial_ids = Vec::new();
    let mut times = Vec::new();
    for (idx, raw) in lines {
        let line_no = idx + 1;
        let line = raw.trim_end();
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != n_neurons + 1 {
            return Err(Error::Parse {
                line: line_no,
                message: format!("expected {} fields, found {}", n_neurons + 1, fields.len()),
            });
        }
        let trial: usize = fields[0].parse().map_err(|_| Error::Parse {
            line: line_no,
            message: format!("bad trial id `{}`", fields[0]),
        })?;
        if let Some(&last) = trial_ids.last() {
            if trial <= last {
                return Err(Error::Parse {
                    line: line_no,
                    message: format!("trial id {trial} does not increase past {last}"),
                });
            }
        }
        trial_ids.push(trial);
        for f in &fields[1..] {
            let t: f64 = f.parse().map_err(|_| Error::Parse {
                line: line_no,
                message: format!("bad passage time `{f}`"),
            })?;
            if !(t.is_finite() && t > 0.0) {
                return Err(Error::Parse {
                    line: line_no,
                    message: format!("passage time {t} is not positive finite"),
                });
            }
            times.push(t);
        }
    }
    let mut discarded = Vec::new();
    if let Some(&max) = trial_ids.last() {
        let kept: std::collections::HashSet<usize> = trial_ids.iter().copied().collect();
        for k in 0..=max {
            if !kept.contains(&k) {
                discarded.push(k);
            }
        }
    }
    FptSample::new(n_neurons, trial_ids, times, discarded)
}

/// One paired sample as `T_ms,Delta_ms` rows.
pub fn write_paired_csv(sample: &PairedSample) -> String {
    let mut out = String::with_capacity(sample.pairs.len() * 16 + 16);
    out.push_str(PAIRED_HEADER);
    out.push('\n');
    for &(t, d) in &sample.pairs {
        out.push_str(&format!("{t},{d}\n"));
    }
    out
}

/// Metadata sidecar accompanying a paired-sample CSV. TOML key-value text.
pub fn paired_sample_meta(sample: &PairedSample, burn_in: usize, source: &str) -> String {
    format!(
        "target = {}\npartner = {}\ndirection = \"{}\"\nburn_in = {}\nsource = \"{}\"\nn_pairs = {}\n",
        sample.target,
        sample.partner,
        match sample.direction {
            Direction::Forward => "forward",
            Direction::Backward => "backward",
        },
        burn_in,
        source,
        sample.pairs.len()
    )
}

/// Parses [`write_paired_csv`] output back into raw pairs.
pub fn read_paired_csv(text: &str) -> Result<Vec<(f64, f64)>> {
    let mut lines = text.lines().enumerate();
    match lines.next() {
        Some((_, h)) if h.trim_end() == PAIRED_HEADER => {}
        Some((_, h)) => {
            return Err(Error::Parse {
                line: 1,
                message: format!("expected header `{PAIRED_HEADER}`, found `{h}`"),
            })
        }
        None => {
            return Err(Error::Parse {
                line: 1,
                message: "empty file".into(),
            })
        }
    }
    let mut pairs = Vec::new();
    for (idx, raw) in lines {
        let line_no = idx + 1;
        let line = raw.trim_end();
        if line.is_empty() {
            continue;
        }
        let mut fields = line.split(',');
        let (a, b) = match (fields.next(), fields.next(), fields.next()) {
            (Some(a), Some(b), None) => (a, b),
            _ => {
                return Err(Error::Parse {
                    line: line_no,
                    message: format!("expected 2 comma-separated fields, found `{line}`"),
                })
            }
        };
        let t: f64 = a.parse().map_err(|_| Error::Parse {
            line: line_no,
            message: format!("bad T value `{a}`"),
        })?;
        let d: f64 = b.parse().map_err(|_| Error::Parse {
            line: line_no,
            message: format!("bad Delta value `{b}`"),
        })?;
        pairs.push((t, d));
    }
    Ok(pairs)
}

/// Dependence summaries as CSV, statistics fixed to 4 decimals. The Kendall
/// tau column holds the raw estimate; rendering conventions (zeroing
/// insignificant values) are applied by the text table, never here.
pub fn write_summary_csv(summaries: &[DependenceSummary]) -> String {
    let mut out = String::from(SUMMARY_HEADER);
    out.push('\n');
    for s in summaries {
        out.push_str(&format!(
            "{},{},{:.4},{:.4},{:.4},{:.4}\n",
            s.label, s.n, s.pearson_r, s.kendall_tau, s.spearman_rho, s.tau_p_value
        ));
    }
    out
}

/// Parses [`write_summary_csv`] output.
pub fn read_summary_csv(text: &str) -> Result<Vec<DependenceSummary>> {
    let mut lines = text.lines().enumerate();
    match lines.next() {
        Some((_, h)) if h.trim_end() == SUMMARY_HEADER => {}
        Some((_, h)) => {
            return Err(Error::Parse {
                line: 1,
                message: format!("expected header `{SUMMARY_HEADER}`, found `{h}`"),
            })
        }
        None => {
            return Err(Error::Parse {
                line: 1,
                message: "empty file".into(),
            })
        }
    }
    let mut out = Vec::new();
    for (idx, raw) in lines {
        let line_no = idx + 1;
        let line = raw.trim_end();
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 6 {
            return Err(Error::Parse {
                line: line_no,
                message: format!("expected 6 fields, found {}", fields.len()),
            });
        }
        let parse_f = |s: &str, what: &str| -> Result<f64> {
            s.parse().map_err(|_| Error::Parse {
                line: line_no,
                message: format!("bad {what} value `{s}`"),
            })
        };
        let n: usize = fields[1].parse().map_err(|_| Error::Parse {
            line: line_no,
            message: format!("bad n value `{}`", fields[1]),
        })?;
        out.push(DependenceSummary {
            label: fields[0].to_string(),
            n,
            pearson_r: parse_f(fields[2], "pearson_r")?,
            kendall_tau: parse_f(fields[3], "kendall_tau")?,
            spearman_rho: parse_f(fields[4], "spearman_rho")?,
            tau_p_value: parse_f(fields[5], "tau_p_value")?,
            low_confidence: n < 10,
        });
    }
    Ok(out)
}
