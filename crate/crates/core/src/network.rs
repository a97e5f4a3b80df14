//! Small networks of leaky integrate-and-fire neurons driven by white noise,
//! coupled either through correlated noise or through membrane jumps at
//! partner firing times, plus the two simulation protocols used downstream:
//! repeated first-passage trials and one long free-running spike train.

use crate::engine::{
    cholesky, draw_standard_normals, euler_step, CholeskyFactor, CorrelationMatrix, RngStream,
};
use crate::error::{Error, Result};

/// In the first-passage protocol, crossings within one integration step are
/// serialized and spaced by this fraction of dt: passage times feed rank
/// statistics directly, and spurious exact ties would dilute them. The
/// free-running spike-train protocol does the opposite and records every
/// same-step crossing at the shared step epoch: the interval definitions
/// compare partner epochs with strict inequalities, so exactly synchronous
/// spikes drop out of the waiting-time samples.
pub const SUB_STEP_FRACTION: f64 = 1e-3;

/// Per-neuron membrane parameters. Units are carried in the field names:
/// potentials in mV, times in ms.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NeuronParams {
    /// Drift input mu (mV/ms). The noise-free resting level is mu * tau.
    pub mu_mv_per_ms: f64,
    /// Membrane time constant tau (ms).
    pub tau_ms: f64,
    /// Noise intensity sigma^2 (mV^2/ms).
    pub sigma2_mv2_per_ms: f64,
    /// Firing threshold theta (mV).
    pub theta_mv: f64,
    /// Post-spike reset potential (mV).
    pub reset_mv: f64,
}

impl NeuronParams {
    /// The parameter point used by every bundled experiment:
    /// mu = 1.2 mV/ms, tau = 10 ms, sigma^2 = 0.3 mV^2/ms, theta = 10 mV,
    /// reset = 0 mV. Suprathreshold regime (mu * tau > theta).
    pub fn standard() -> Self {
        Self {
            mu_mv_per_ms: 1.2,
            tau_ms: 10.0,
            sigma2_mv2_per_ms: 0.3,
            theta_mv: 10.0,
            reset_mv: 0.0,
        }
    }

    /// sigma in mV / sqrt(ms).
    #[inline]
    pub fn sigma_mv_per_sqrt_ms(&self) -> f64 {
        self.sigma2_mv2_per_ms.sqrt()
    }

    /// Noise-free threshold crossing time from reset,
    /// t* = -tau * ln(1 - (theta - 0) / (mu tau)) measured from a reset at 0,
    /// shifted for nonzero reset. None when the drift never reaches theta.
    pub fn zero_noise_crossing_ms(&self) -> Option<f64> {
        let asymptote = self.mu_mv_per_ms * self.tau_ms;
        if asymptote <= self.theta_mv {
            return None;
        }
        let num = self.theta_mv - asymptote;
        let den = self.reset_mv - asymptote;
        Some(-self.tau_ms * (num / den).ln())
    }
}

/// A complete network definition: per-neuron parameters, the correlation
/// matrix of the driving Wiener processes, and the jump matrix h, where
/// h[i][j] is added to neuron j's potential when neuron i fires.
#[derive(Debug, Clone, PartialEq)]
pub struct NetworkSpec {
    neurons: Vec<NeuronParams>,
    noise_corr: CorrelationMatrix,
    /// Row-major n x n, zero diagonal.
    jumps_mv: Vec<f64>,
}

impl NetworkSpec {
    /// Builds a spec, checking dimensional consistency only; semantic
    /// constraints are the business of [`validate_network`].
    pub fn new(
        neurons: Vec<NeuronParams>,
        noise_corr: CorrelationMatrix,
        jumps_mv: Vec<Vec<f64>>,
    ) -> Result<Self> {
        let n = neurons.len();
        if noise_corr.dim() != n {
            return Err(Error::BadMatrix(format!(
                "noise correlation is {}x{} for {} neurons",
                noise_corr.dim(),
                noise_corr.dim(),
                n
            )));
        }
        if jumps_mv.len() != n || jumps_mv.iter().any(|r| r.len() != n) {
            return Err(Error::BadMatrix(format!("jump matrix is not {n}x{n}")));
        }
        let flat = jumps_mv.into_iter().flatten().collect();
        Ok(Self {
            neurons,
            noise_corr,
            jumps_mv: flat,
        })
    }

    /// Correlated-noise model: common noise, no jumps.
    pub fn correlated(neurons: Vec<NeuronParams>, noise_corr: CorrelationMatrix) -> Result<Self> {
        let n = neurons.len();
        Self::new(neurons, noise_corr, vec![vec![0.0; n]; n])
    }

    /// Jump model: independent noise, coupling through the jump matrix.
    pub fn jump_coupled(neurons: Vec<NeuronParams>, jumps_mv: Vec<Vec<f64>>) -> Result<Self> {
        let n = neurons.len();
        Self::new(neurons, CorrelationMatrix::identity(n), jumps_mv)
    }

    /// Independent neurons: identity noise correlation, zero jumps.
    pub fn uncoupled(neurons: Vec<NeuronParams>) -> Result<Self> {
        let n = neurons.len();
        Self::new(
            neurons,
            CorrelationMatrix::identity(n),
            vec![vec![0.0; n]; n],
        )
    }

    pub fn n_neurons(&self) -> usize {
        self.neurons.len()
    }

    pub fn neurons(&self) -> &[NeuronParams] {
        &self.neurons
    }

    pub fn noise_corr(&self) -> &CorrelationMatrix {
        &self.noise_corr
    }

    /// Jump applied to neuron `j` when neuron `i` fires (mV).
    #[inline]
    pub fn jump_mv(&self, i: usize, j: usize) -> f64 {
        self.jumps_mv[i * self.neurons.len() + j]
    }

    /// True if any jump entry is nonzero.
    pub fn has_jumps(&self) -> bool {
        self.jumps_mv.iter().any(|&h| h != 0.0)
    }
}

/// Simulation controls shared by both protocols.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimConfig {
    /// Integration step (ms).
    pub dt_ms: f64,
    /// Horizon of a free-running spike-train simulation (ms).
    pub duration_ms: f64,
    /// Number of first-passage trials.
    pub n_trials: usize,
    /// Spikes of the target neuron discarded before interval extraction.
    pub burn_in_spikes: usize,
    /// Master seed; trial k draws from stream (master_seed, k).
    pub master_seed: u64,
    /// A first-passage trial that has not completed by this time is
    /// discarded (and counted).
    pub trial_timeout_ms: f64,
}

impl SimConfig {
    /// First-passage protocol defaults: dt = 0.01 ms, burn-in 50,
    /// timeout 1e4 ms.
    pub fn fpt(n_trials: usize) -> Self {
        Self {
            dt_ms: 0.01,
            duration_ms: 0.0,
            n_trials,
            burn_in_spikes: 50,
            master_seed: 42,
            trial_timeout_ms: 1.0e4,
        }
    }

    /// Spike-train protocol defaults: dt = 0.01 ms, burn-in 50.
    pub fn spike_train(duration_ms: f64) -> Self {
        Self {
            dt_ms: 0.01,
            duration_ms,
            n_trials: 0,
            burn_in_spikes: 50,
            master_seed: 42,
            trial_timeout_ms: 1.0e4,
        }
    }

    pub fn with_seed(mut self, master_seed: u64) -> Self {
        self.master_seed = master_seed;
        self
    }

    pub fn with_dt(mut self, dt_ms: f64) -> Self {
        self.dt_ms = dt_ms;
        self
    }
}

/// One spike train per neuron. Epochs are strictly increasing per neuron and
/// lie in [0, duration].
#[derive(Debug, Clone, PartialEq)]
pub struct SpikeTrains {
    duration_ms: f64,
    trains: Vec<Vec<f64>>,
}

impl SpikeTrains {
    /// Wraps raw trains, enforcing per-neuron strict monotonicity,
    /// finiteness and the [0, duration] range.
    pub fn new(trains: Vec<Vec<f64>>, duration_ms: f64) -> Result<Self> {
        for (i, train) in trains.iter().enumerate() {
            for (k, &t) in train.iter().enumerate() {
                if !t.is_finite() {
                    return Err(Error::NonFinite(format!("neuron {i}, spike {k}")));
                }
                if t < 0.0 || t > duration_ms {
                    return Err(Error::BadArgument(format!(
                        "neuron {i}, spike {k}: epoch {t} outside [0, {duration_ms}]"
                    )));
                }
                if k > 0 && t <= train[k - 1] {
                    return Err(Error::BadArgument(format!(
                        "neuron {i}, spike {k}: epoch {t} not after {}",
                        train[k - 1]
                    )));
                }
            }
        }
        Ok(Self {
            duration_ms,
            trains,
        })
    }

    pub fn n_neurons(&self) -> usize {
        self.trains.len()
    }

    pub fn duration_ms(&self) -> f64 {
        self.duration_ms
    }

    pub fn train(&self, neuron: usize) -> &[f64] {
        &self.trains[neuron]
    }

    pub fn counts(&self) -> Vec<usize> {
        self.trains.iter().map(Vec::len).collect()
    }
}

/// First-passage times from repeated trials. Row k holds the passage time of
/// every neuron in kept trial `trial_ids[k]`; timed-out trials are absent
/// from the rows but recorded in `discarded`.
#[derive(Debug, Clone, PartialEq)]
pub struct FptSample {
    n_neurons: usize,
    trial_ids: Vec<usize>,
    /// Row-major, `trial_ids.len() * n_neurons`, all entries positive finite.
    times_ms: Vec<f64>,
    discarded: Vec<usize>,
}

impl FptSample {
    /// Wraps raw rows, enforcing positive finite entries.
    pub fn new(
        n_neurons: usize,
        trial_ids: Vec<usize>,
        times_ms: Vec<f64>,
        discarded: Vec<usize>,
    ) -> Result<Self> {
        if n_neurons == 0 {
            return Err(Error::BadArgument("zero neurons".into()));
        }
        if times_ms.len() != trial_ids.len() * n_neurons {
            return Err(Error::BadArgument(format!(
                "{} times for {} trials of {} neurons",
                times_ms.len(),
                trial_ids.len(),
                n_neurons
            )));
        }
        for (k, &t) in times_ms.iter().enumerate() {
            if !(t.is_finite() && t > 0.0) {
                return Err(Error::NonFinite(format!(
                    "trial {}, neuron {}: {t}",
                    trial_ids[k / n_neurons],
                    k % n_neurons
                )));
            }
        }
        Ok(Self {
            n_neurons,
            trial_ids,
            times_ms,
            discarded,
        })
    }

    pub fn n_neurons(&self) -> usize {
        self.n_neurons
    }

    /// Number of kept trials.
    pub fn len(&self) -> usize {
        self.trial_ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.trial_ids.is_empty()
    }

    pub fn trial_ids(&self) -> &[usize] {
        &self.trial_ids
    }

    pub fn discarded(&self) -> &[usize] {
        &self.discarded
    }

    pub fn row(&self, k: usize) -> &[f64] {
        &self.times_ms[k * self.n_neurons..(k + 1) * self.n_neurons]
    }

    /// All passage times of one neuron, in trial order.
    pub fn column(&self, neuron: usize) -> Vec<f64> {
        assert!(neuron < self.n_neurons);
        (0..self.len()).map(|k| self.row(k)[neuron]).collect()
    }
}

/// Outcome of structural validation; `violations` is empty for a valid spec.
#[derive(Debug, Clone, Default)]
pub struct ValidationReport {
    pub violations: Vec<String>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn into_result(self) -> Result<()> {
        if self.is_valid() {
            Ok(())
        } else {
            Err(Error::InvalidNetwork(self.violations))
        }
    }
}

/// Checks every structural constraint on a network definition and reports
/// all violations at once.
pub fn validate_network(spec: &NetworkSpec) -> ValidationReport {
    let mut violations = Vec::new();
    let n = spec.n_neurons();
    if !(n == 2 || n == 3) {
        violations.push(format!("network size {n} is not 2 or 3"));
    }
    for (i, p) in spec.neurons().iter().enumerate() {
        if !p.mu_mv_per_ms.is_finite() {
            violations.push(format!("neuron {i}: mu is not finite"));
        }
        if !(p.tau_ms.is_finite() && p.tau_ms > 0.0) {
            violations.push(format!(
                "neuron {i}: tau must be positive, got {}",
                p.tau_ms
            ));
        }
        if !(p.sigma2_mv2_per_ms.is_finite() && p.sigma2_mv2_per_ms >= 0.0) {
            violations.push(format!(
                "neuron {i}: sigma^2 must be nonnegative, got {}",
                p.sigma2_mv2_per_ms
            ));
        }
        if !p.theta_mv.is_finite() || !p.reset_mv.is_finite() {
            violations.push(format!("neuron {i}: threshold or reset is not finite"));
        } else if p.theta_mv <= p.reset_mv {
            violations.push(format!(
                "neuron {i}: threshold {} must exceed reset {}",
                p.theta_mv, p.reset_mv
            ));
        }
    }
    if let Err(e) = cholesky(spec.noise_corr()) {
        violations.push(format!("noise correlation fails positivity: {e}"));
    }
    for i in 0..n {
        for j in 0..n {
            let h = spec.jump_mv(i, j);
            if !h.is_finite() {
                violations.push(format!("jump ({i},{j}) is not finite"));
            }
            if i == j && h != 0.0 {
                violations.push(format!("jump ({i},{i}) must be zero, got {h}"));
            }
        }
    }
    ValidationReport { violations }
}

fn check_sim_config(cfg: &SimConfig, needs_trials: bool) -> Result<()> {
    if !(cfg.dt_ms.is_finite() && cfg.dt_ms > 0.0) {
        return Err(Error::BadArgument(format!(
            "dt must be positive, got {}",
            cfg.dt_ms
        )));
    }
    if needs_trials {
        if cfg.n_trials == 0 {
            return Err(Error::BadArgument("n_trials must be at least 1".into()));
        }
        if !(cfg.trial_timeout_ms.is_finite() && cfg.trial_timeout_ms > 0.0) {
            return Err(Error::BadArgument(format!(
                "trial timeout must be positive, got {}",
                cfg.trial_timeout_ms
            )));
        }
    } else if !(cfg.duration_ms.is_finite() && cfg.duration_ms > cfg.dt_ms) {
        return Err(Error::BadArgument(format!(
            "duration {} must exceed dt {}",
            cfg.duration_ms, cfg.dt_ms
        )));
    }
    Ok(())
}

/// One first-passage trial. Every neuron starts at its reset potential;
/// a neuron that reaches threshold records its passage epoch, delivers its
/// jumps to not-yet-fired neurons, and freezes. Crossings inside one step
/// are serialized in ascending neuron order with sub-dt epoch spacing, so a
/// jump-induced crossing lands strictly after its cause. Returns None on
/// timeout.
fn run_fpt_trial(
    spec: &NetworkSpec,
    chol: &CholeskyFactor,
    cfg: &SimConfig,
    trial: usize,
) -> Option<Vec<f64>> {
    let n = spec.n_neurons();
    let params = spec.neurons();
    let mut rng = RngStream::new(cfg.master_seed, trial as u64).rng();
    let mut x: Vec<f64> = params.iter().map(|p| p.reset_mv).collect();
    let mut z = vec![0.0; n];
    let mut dw = vec![0.0; n];
    let mut fired = vec![false; n];
    let mut fpt = vec![0.0; n];
    let mut n_fired = 0usize;
    let dt = cfg.dt_ms;
    let sqrt_dt = dt.sqrt();
    let sub = dt * SUB_STEP_FRACTION;
    let max_steps = (cfg.trial_timeout_ms / dt).ceil() as u64;

    for step in 1..=max_steps {
        // The joint draw covers frozen neurons too, so a neuron's noise path
        // does not depend on when its partners fired.
        draw_standard_normals(&mut rng, &mut z);
        chol.scaled_mix(sqrt_dt, &z, &mut dw);
        for i in 0..n {
            if !fired[i] {
                let p = &params[i];
                x[i] += (-x[i] / p.tau_ms + p.mu_mv_per_ms) * dt + p.sigma_mv_per_sqrt_ms() * dw[i];
            }
        }
        let t_end = step as f64 * dt;
        let mut emitted = 0usize;
        while let Some(i) = (0..n).find(|&i| !fired[i] && x[i] >= params[i].theta_mv) {
            fired[i] = true;
            fpt[i] = t_end + emitted as f64 * sub;
            emitted += 1;
            n_fired += 1;
            for j in 0..n {
                if !fired[j] {
                    x[j] += spec.jump_mv(i, j);
                }
            }
        }
        if n_fired == n {
            return Some(fpt);
        }
    }
    None
}

fn assemble_fpt(spec: &NetworkSpec, rows: Vec<Option<Vec<f64>>>) -> Result<FptSample> {
    let n = spec.n_neurons();
    let mut trial_ids = Vec::new();
    let mut times = Vec::new();
    let mut discarded = Vec::new();
    for (k, row) in rows.into_iter().enumerate() {
        match row {
            Some(fpt) => {
                trial_ids.push(k);
                times.extend_from_slice(&fpt);
            }
            None => discarded.push(k),
        }
    }
    FptSample::new(n, trial_ids, times, discarded)
}

/// Runs `cfg.n_trials` independent first-passage trials. Trial k draws from
/// random stream (master_seed, k), so the result is a pure function of the
/// spec and config: identical across repeat runs, worker counts and the
/// sequential fallback.
#[cfg(feature = "parallel")]
pub fn simulate_fpt_trials(spec: &NetworkSpec, cfg: &SimConfig) -> Result<FptSample> {
    use rayon::prelude::*;
    validate_network(spec).into_result()?;
    check_sim_config(cfg, true)?;
    let chol = cholesky(spec.noise_corr())?;
    let rows: Vec<Option<Vec<f64>>> = (0..cfg.n_trials)
        .into_par_iter()
        .map(|k| run_fpt_trial(spec, &chol, cfg, k))
        .collect();
    assemble_fpt(spec, rows)
}

/// Sequential build of [`simulate_fpt_trials`].
#[cfg(not(feature = "parallel"))]
pub fn simulate_fpt_trials(spec: &NetworkSpec, cfg: &SimConfig) -> Result<FptSample> {
    simulate_fpt_trials_sequential(spec, cfg)
}

/// Trial loop without rayon; the fallback used when the `parallel` feature
/// is disabled, and the baseline the bench suite compares against. Produces
/// bitwise identical samples to the parallel path.
pub fn simulate_fpt_trials_sequential(spec: &NetworkSpec, cfg: &SimConfig) -> Result<FptSample> {
    validate_network(spec).into_result()?;
    check_sim_config(cfg, true)?;
    let chol = cholesky(spec.noise_corr())?;
    let rows: Vec<Option<Vec<f64>>> = (0..cfg.n_trials)
        .map(|k| run_fpt_trial(spec, &chol, cfg, k))
        .collect();
    assemble_fpt(spec, rows)
}

/// One long free-running simulation. A neuron that reaches threshold records
/// a spike, resets, and delivers its jumps to every other neuron; it may fire
/// again on later steps. Same-step crossings (cascades included) are resolved
/// in ascending neuron order but all share the step-end epoch: simultaneity
/// is a real feature of the discretized dynamics, and the strict inequalities
/// of the interval definitions rely on exact ties to recognize it. A neuron
/// fires at most once per step (jump input landing after its in-step reset is
/// seen at the next threshold check). Draws from random stream
/// (master_seed, 0).
pub fn simulate_spike_trains(spec: &NetworkSpec, cfg: &SimConfig) -> Result<SpikeTrains> {
    validate_network(spec).into_result()?;
    check_sim_config(cfg, false)?;
    let chol = cholesky(spec.noise_corr())?;
    let n = spec.n_neurons();
    let params = spec.neurons();
    let mut rng = RngStream::new(cfg.master_seed, 0).rng();
    let mut x: Vec<f64> = params.iter().map(|p| p.reset_mv).collect();
    let mut z = vec![0.0; n];
    let mut dw = vec![0.0; n];
    let mut fired_this_step = vec![false; n];
    let mut trains: Vec<Vec<f64>> = vec![Vec::new(); n];
    let dt = cfg.dt_ms;
    let sqrt_dt = dt.sqrt();
    let n_steps = (cfg.duration_ms / dt).floor() as u64;

    for step in 1..=n_steps {
        draw_standard_normals(&mut rng, &mut z);
        chol.scaled_mix(sqrt_dt, &z, &mut dw);
        euler_step(&mut x, params, &dw, dt);
        let t_end = step as f64 * dt;
        fired_this_step.iter_mut().for_each(|f| *f = false);
        while let Some(i) = (0..n).find(|&i| !fired_this_step[i] && x[i] >= params[i].theta_mv) {
            fired_this_step[i] = true;
            trains[i].push(t_end);
            x[i] = params[i].reset_mv;
            for (j, xj) in x.iter_mut().enumerate() {
                if j != i {
                    *xj += spec.jump_mv(i, j);
                }
            }
        }
    }
    SpikeTrains::new(trains, cfg.duration_ms)
}
