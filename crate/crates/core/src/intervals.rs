//! Extraction of paired interval samples from spike trains: each target
//! spike contributes its interspike interval T (forward or backward) paired
//! with the waiting time Delta to the nearest partner spike in the same
//! direction, and first-passage samples contribute per-trial column pairs.
//!
//! Spike indices are 1-based; a pair is kept when its target spike index
//! exceeds `burn_in` and both the interval and the partner spike exist.
//! Strict inequalities define the partner search, so a partner spike exactly
//! at the target epoch belongs to neither direction.

use crate::error::{Error, Result};
use crate::network::{FptSample, SpikeTrains};

/// Direction of both the ISI and the partner search.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Direction {
    Forward,
    Backward,
}

impl Direction {
    pub fn short(&self) -> &'static str {
        match self {
            Direction::Forward => "FWD",
            Direction::Backward => "BWD",
        }
    }
}

impl std::fmt::Display for Direction {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.short())
    }
}

/// Neuron display name: A, B, C for spike-train cases.
pub fn neuron_letter(index: usize) -> char {
    (b'A' + index as u8) as char
}

/// One extracted sample: (T, Delta) pairs for a fixed target, partner and
/// direction. T > 0 always; Delta > 0 by the strict partner inequalities.
/// No Delta <= T constraint exists: the nearest partner spike may lie past
/// the next target spike.
#[derive(Debug, Clone, PartialEq)]
pub struct PairedSample {
    pub target: usize,
    pub partner: usize,
    pub direction: Direction,
    pub pairs: Vec<(f64, f64)>,
}

impl PairedSample {
    /// Case label: "FWD-A" when the network has 2 neurons (partner implied),
    /// "FWD-A:B" otherwise.
    pub fn label(&self, n_neurons: usize) -> String {
        if n_neurons <= 2 {
            format!("{}-{}", self.direction, neuron_letter(self.target))
        } else {
            format!(
                "{}-{}:{}",
                self.direction,
                neuron_letter(self.target),
                neuron_letter(self.partner)
            )
        }
    }
}

/// Every (target, partner, direction) sample: 4 for two neurons, 12 for
/// three (6 target/direction cases, each with both partner series). Ordered
/// by target, then direction (forward first), then partner.
#[derive(Debug, Clone, PartialEq)]
pub struct CaseSet {
    pub samples: Vec<PairedSample>,
}

impl CaseSet {
    /// The samples of one (target, direction) case, partners in ascending
    /// order.
    pub fn case(&self, target: usize, direction: Direction) -> Vec<&PairedSample> {
        self.samples
            .iter()
            .filter(|s| s.target == target && s.direction == direction)
            .collect()
    }
}

fn check_trains(trains: &SpikeTrains, target: usize, partner: usize) -> Result<()> {
    let n = trains.n_neurons();
    if target >= n || partner >= n {
        return Err(Error::BadArgument(format!(
            "neuron ids ({target}, {partner}) out of range for {n} trains"
        )));
    }
    if target == partner {
        return Err(Error::BadArgument("target equals partner".into()));
    }
    Ok(())
}

/// Forward pairs: for each target spike S^i (1-based index i > burn_in) with
/// a next target spike, T = S^{i+1} - S^i and Delta = (first partner spike
/// strictly after S^i) - S^i. Spikes lacking either successor are skipped.
pub fn forward_pairs(
    trains: &SpikeTrains,
    target: usize,
    partner: usize,
    burn_in: usize,
) -> Result<PairedSample> {
    check_trains(trains, target, partner)?;
    let s = trains.train(target);
    let p = trains.train(partner);
    if s.len() < 2 {
        return Err(Error::EmptySample(format!(
            "target {target} has {} spikes; no forward ISI exists",
            s.len()
        )));
    }
    if p.is_empty() {
        return Err(Error::EmptySample(format!("partner {partner} never fires")));
    }
    let mut pairs = Vec::new();
    // i is the 0-based position; the 1-based index is i + 1.
    for i in 0..s.len() - 1 {
        if i < burn_in {
            continue;
        }
        let t = s[i + 1] - s[i];
        let next = p.partition_point(|&v| v <= s[i]);
        if next == p.len() {
            continue;
        }
        pairs.push((t, p[next] - s[i]));
    }
    Ok(PairedSample {
        target,
        partner,
        direction: Direction::Forward,
        pairs,
    })
}

/// Backward pairs: for each target spike S^i (1-based index i > burn_in,
/// i >= 2), T = S^i - S^{i-1} and Delta = S^i - (last partner spike strictly
/// before S^i). Spikes lacking either predecessor are skipped.
pub fn backward_pairs(
    trains: &SpikeTrains,
    target: usize,
    partner: usize,
    burn_in: usize,
) -> Result<PairedSample> {
    check_trains(trains, target, partner)?;
    let s = trains.train(target);
    let p = trains.train(partner);
    if s.len() < 2 {
        return Err(Error::EmptySample(format!(
            "target {target} has {} spikes; no backward ISI exists",
            s.len()
        )));
    }
    if p.is_empty() {
        return Err(Error::EmptySample(format!("partner {partner} never fires")));
    }
    let mut pairs = Vec::new();
    for i in 1..s.len() {
        if i < burn_in {
            continue;
        }
        let t = s[i] - s[i - 1];
        let before = p.partition_point(|&v| v < s[i]);
        if before == 0 {
            continue;
        }
        pairs.push((t, s[i] - p[before - 1]));
    }
    Ok(PairedSample {
        target,
        partner,
        direction: Direction::Backward,
        pairs,
    })
}

/// Produces every (target, partner, direction) sample: 4 PairedSamples for
/// 2 neurons, 12 for 3 (each target/direction case carrying both partner
/// series).
pub fn enumerate_cases(trains: &SpikeTrains, burn_in: usize) -> Result<CaseSet> {
    let n = trains.n_neurons();
    if n < 2 {
        return Err(Error::EmptySample(format!(
            "{n} neuron(s): no partner exists"
        )));
    }
    let mut samples = Vec::new();
    for target in 0..n {
        for direction in [Direction::Forward, Direction::Backward] {
            for partner in 0..n {
                if partner == target {
                    continue;
                }
                let sample = match direction {
                    Direction::Forward => forward_pairs(trains, target, partner, burn_in)?,
                    Direction::Backward => backward_pairs(trains, target, partner, burn_in)?,
                };
                samples.push(sample);
            }
        }
    }
    Ok(CaseSet { samples })
}

/// Per-trial first-passage pairs (FPT_i, FPT_j); timed-out trials are
/// already absent from the sample.
pub fn fpt_pairs(sample: &FptSample, i: usize, j: usize) -> Result<Vec<(f64, f64)>> {
    let n = sample.n_neurons();
    if i >= n || j >= n {
        return Err(Error::BadArgument(format!(
            "neuron ids ({i}, {j}) out of range for {n} neurons"
        )));
    }
    if i == j {
        return Err(Error::BadArgument(
            "first-passage pairs need two distinct neurons".into(),
        ));
    }
    Ok((0..sample.len())
        .map(|k| {
            let row = sample.row(k);
            (row[i], row[j])
        })
        .collect())
}

/// Label for a first-passage pair, 1-based: "FPT-12".
pub fn fpt_pair_label(i: usize, j: usize) -> String {
    format!("FPT-{}{}", i + 1, j + 1)
}

/// The unordered neuron pairs of a sample, in the order (1,2), (1,3), (2,3)
/// maps to for its size.
pub fn fpt_pair_indices(n_neurons: usize) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    for i in 0..n_neurons {
        for j in (i + 1)..n_neurons {
            out.push((i, j));
        }
    }
    out
}

/// Waiting-time pairs (Delta to partner_a, Delta to partner_b) on common
/// target spikes: rows are target spikes past burn-in where both partner
/// spikes exist in the given direction. Feeds the Delta-vs-Delta panels of
/// the 3-neuron layouts; no ISI requirement applies.
pub fn joint_delta_pairs(
    trains: &SpikeTrains,
    target: usize,
    partner_a: usize,
    partner_b: usize,
    direction: Direction,
    burn_in: usize,
) -> Result<Vec<(f64, f64)>> {
    check_trains(trains, target, partner_a)?;
    check_trains(trains, target, partner_b)?;
    if partner_a == partner_b {
        return Err(Error::BadArgument("partners must differ".into()));
    }
    let s = trains.train(target);
    let pa = trains.train(partner_a);
    let pb = trains.train(partner_b);
    let delta = |p: &[f64], epoch: f64| -> Option<f64> {
        match direction {
            Direction::Forward => {
                let next = p.partition_point(|&v| v <= epoch);
                (next < p.len()).then(|| p[next] - epoch)
            }
            Direction::Backward => {
                let before = p.partition_point(|&v| v < epoch);
                (before > 0).then(|| epoch - p[before - 1])
            }
        }
    };
    let mut out = Vec::new();
    for (i, &epoch) in s.iter().enumerate() {
        if i < burn_in {
            continue;
        }
        if let (Some(da), Some(db)) = (delta(pa, epoch), delta(pb, epoch)) {
            out.push((da, db));
        }
    }
    Ok(out)
}
