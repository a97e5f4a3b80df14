//! Stochastic integration primitives: correlated Wiener increments via a
//! Cholesky factor, Euler-Maruyama steps for leaky integrate-and-fire drift,
//! and deterministic per-stream random number generation.
//!
//! The diffusion model per neuron is
//!
//! ```text
//! dX_i = (-X_i / tau_i + mu_i) dt + sigma_i dW_i
//! ```
//!
//! where the W_i are standard Wiener processes with Corr(dW_i, dW_j) = c_ij.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::network::NeuronParams;

/// Pivot threshold below which a Cholesky step reports failure. Pivots in
/// [-PIVOT_TOL, 0] are treated as exact zeros (semi-definite input).
const PIVOT_TOL: f64 = 1e-10;

/// Symmetry / unit-diagonal tolerance for correlation matrix construction.
const STRUCT_TOL: f64 = 1e-12;

/// Symmetric matrix of pairwise correlations between the driving Wiener
/// processes. Unit diagonal; positive semi-definiteness is established by
/// [`cholesky`], not at construction.
#[derive(Debug, Clone, PartialEq)]
pub struct CorrelationMatrix {
    dim: usize,
    /// Row-major entries, `dim * dim`.
    entries: Vec<f64>,
}

impl CorrelationMatrix {
    /// Builds from row vectors, checking squareness, symmetry, finiteness
    /// and a unit diagonal.
    pub fn new(rows: Vec<Vec<f64>>) -> Result<Self> {
        let dim = rows.len();
        if dim == 0 {
            return Err(Error::BadMatrix("zero-dimensional matrix".into()));
        }
        let mut entries = vec![0.0; dim * dim];
        for (i, row) in rows.iter().enumerate() {
            if row.len() != dim {
                return Err(Error::BadMatrix(format!(
                    "row {} has length {}, expected {}",
                    i,
                    row.len(),
                    dim
                )));
            }
            for (j, &v) in row.iter().enumerate() {
                if !v.is_finite() {
                    return Err(Error::NonFinite(format!("entry ({i},{j})")));
                }
                entries[i * dim + j] = v;
            }
        }
        for i in 0..dim {
            if (entries[i * dim + i] - 1.0).abs() > STRUCT_TOL {
                return Err(Error::BadMatrix(format!(
                    "diagonal entry ({i},{i}) = {} is not 1",
                    entries[i * dim + i]
                )));
            }
            for j in 0..i {
                if (entries[i * dim + j] - entries[j * dim + i]).abs() > STRUCT_TOL {
                    return Err(Error::BadMatrix(format!(
                        "entries ({i},{j}) and ({j},{i}) differ"
                    )));
                }
            }
        }
        Ok(Self { dim, entries })
    }

    /// Identity: mutually independent Wiener processes.
    pub fn identity(dim: usize) -> Self {
        let mut entries = vec![0.0; dim * dim];
        for i in 0..dim {
            entries[i * dim + i] = 1.0;
        }
        Self { dim, entries }
    }

    /// All off-diagonal correlations equal to `c`.
    pub fn uniform(dim: usize, c: f64) -> Result<Self> {
        let rows = (0..dim)
            .map(|i| (0..dim).map(|j| if i == j { 1.0 } else { c }).collect())
            .collect();
        Self::new(rows)
    }

    /// Two neurons with pairwise correlation `c`.
    pub fn pair(c: f64) -> Result<Self> {
        Self::uniform(2, c)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.entries[i * self.dim + j]
    }
}

/// Lower-triangular factor L with L * L^T equal to the source correlation
/// matrix (to within 1e-10 elementwise).
#[derive(Debug, Clone, PartialEq)]
pub struct CholeskyFactor {
    dim: usize,
    /// Row-major lower triangle, `dim * dim`, upper entries zero.
    entries: Vec<f64>,
}

impl CholeskyFactor {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.entries[i * self.dim + j]
    }

    /// L * L^T, for verifying the factorization against its source.
    pub fn reconstruct(&self) -> Vec<Vec<f64>> {
        let n = self.dim;
        let mut out = vec![vec![0.0; n]; n];
        for (i, row) in out.iter_mut().enumerate() {
            for (j, cell) in row.iter_mut().enumerate() {
                let mut acc = 0.0;
                for k in 0..=i.min(j) {
                    acc += self.get(i, k) * self.get(j, k);
                }
                *cell = acc;
            }
        }
        out
    }

    /// Writes `sqrt(dt) * L * z` into `dw`, reading `z` as a vector of
    /// independent standard normals. Scratch-free hot-loop form.
    #[inline]
    pub fn scaled_mix(&self, sqrt_dt: f64, z: &[f64], dw: &mut [f64]) {
        let n = self.dim;
        debug_assert_eq!(z.len(), n);
        debug_assert_eq!(dw.len(), n);
        for (i, d) in dw.iter_mut().enumerate() {
            let row = &self.entries[i * n..=i * n + i];
            let acc: f64 = row.iter().zip(z).map(|(l, zk)| l * zk).sum();
            *d = sqrt_dt * acc;
        }
    }
}

/// Lower Cholesky factorization tolerating zero pivots (positive
/// semi-definite inputs). A pivot below `-1e-10` means the matrix is not a
/// valid correlation matrix and is reported as such; the out-of-range check
/// |c_ij| <= 1 is subsumed, since a unit-diagonal matrix with an entry
/// outside [-1, 1] necessarily fails here.
pub fn cholesky(c: &CorrelationMatrix) -> Result<CholeskyFactor> {
    let n = c.dim;
    let mut l = vec![0.0; n * n];
    for j in 0..n {
        let mut pivot = c.get(j, j);
        for k in 0..j {
            pivot -= l[j * n + k] * l[j * n + k];
        }
        if pivot < -PIVOT_TOL {
            return Err(Error::NotPositiveSemiDefinite { index: j, pivot });
        }
        // Semi-definite direction: a vanishing pivot forces the rest of the
        // column to zero, which the loop below produces by leaving l[i][j]=0.
        let diag = if pivot > 0.0 { pivot.sqrt() } else { 0.0 };
        l[j * n + j] = diag;
        if diag == 0.0 {
            continue;
        }
        for i in (j + 1)..n {
            let mut acc = c.get(i, j);
            for k in 0..j {
                acc -= l[i * n + k] * l[j * n + k];
            }
            l[i * n + j] = acc / diag;
        }
    }
    Ok(CholeskyFactor { dim: n, entries: l })
}

/// Draws one vector of correlated Wiener increments over a step of length
/// `dt`: dW = sqrt(dt) * L * z with z ~ N(0, I). Componentwise,
/// E[dW_i dW_j] = c_ij * dt.
pub fn correlated_increments<R: rand::Rng>(
    factor: &CholeskyFactor,
    dt: f64,
    rng: &mut R,
) -> Vec<f64> {
    let n = factor.dim;
    let mut z = vec![0.0; n];
    let mut dw = vec![0.0; n];
    draw_standard_normals(rng, &mut z);
    factor.scaled_mix(dt.sqrt(), &z, &mut dw);
    dw
}

/// Fills `z` with independent standard normal draws.
#[inline]
pub fn draw_standard_normals<R: rand::Rng>(rng: &mut R, z: &mut [f64]) {
    for v in z.iter_mut() {
        *v = StandardNormal.sample(rng);
    }
}

/// One Euler-Maruyama step, in place:
/// x_i += (-x_i / tau_i + mu_i) * dt + sigma_i * dw_i.
#[inline]
pub fn euler_step(x: &mut [f64], params: &[NeuronParams], dw: &[f64], dt: f64) {
    debug_assert_eq!(x.len(), params.len());
    debug_assert_eq!(x.len(), dw.len());
    for i in 0..x.len() {
        let p = &params[i];
        x[i] += (-x[i] / p.tau_ms + p.mu_mv_per_ms) * dt + p.sigma_mv_per_sqrt_ms() * dw[i];
    }
}

/// Address of a deterministic random stream. Identical (master_seed,
/// stream_index) pairs yield identical draw sequences regardless of how many
/// other streams run concurrently, which makes trial-parallel runs
/// independent of worker count and scheduling.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RngStream {
    pub master_seed: u64,
    pub stream_index: u64,
}

impl RngStream {
    pub fn new(master_seed: u64, stream_index: u64) -> Self {
        Self {
            master_seed,
            stream_index,
        }
    }

    /// Instantiates the generator for this stream.
    pub fn rng(&self) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.master_seed);
        rng.set_stream(self.stream_index);
        rng
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use rand::Rng;

    fn standard_neuron(sigma2: f64) -> NeuronParams {
        NeuronParams {
            mu_mv_per_ms: 1.2,
            tau_ms: 10.0,
            sigma2_mv2_per_ms: sigma2,
            theta_mv: 10.0,
            reset_mv: 0.0,
        }
    }

    #[test]
    fn cholesky_of_identity_is_identity() {
        let c = CorrelationMatrix::identity(3);
        let l = cholesky(&c).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                let expect = if i == j { 1.0 } else { 0.0 };
                assert_abs_diff_eq!(l.get(i, j), expect, epsilon = 1e-15);
            }
        }
    }

    #[test]
    fn cholesky_two_by_two_closed_form() {
        let c = CorrelationMatrix::pair(0.91).unwrap();
        let l = cholesky(&c).unwrap();
        assert_abs_diff_eq!(l.get(0, 0), 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(l.get(1, 0), 0.91, epsilon = 1e-15);
        assert_abs_diff_eq!(l.get(1, 1), (1.0 - 0.91_f64 * 0.91).sqrt(), epsilon = 1e-15);
        assert_abs_diff_eq!(l.get(0, 1), 0.0, epsilon = 1e-15);
    }

    #[test]
    fn cholesky_reconstructs_source() {
        let c = CorrelationMatrix::new(vec![
            vec![1.0, 0.5, -0.3],
            vec![0.5, 1.0, 0.2],
            vec![-0.3, 0.2, 1.0],
        ])
        .unwrap();
        let l = cholesky(&c).unwrap();
        let back = l.reconstruct();
        for (i, row) in back.iter().enumerate() {
            for (j, &v) in row.iter().enumerate() {
                assert_abs_diff_eq!(v, c.get(i, j), epsilon = 1e-10);
            }
        }
    }

    #[test]
    fn cholesky_rejects_out_of_range_correlation() {
        let c = CorrelationMatrix::pair(1.5).unwrap();
        match cholesky(&c) {
            Err(Error::NotPositiveSemiDefinite { index, pivot }) => {
                assert_eq!(index, 1);
                assert!(pivot < 0.0);
            }
            other => panic!("expected NotPositiveSemiDefinite, got {other:?}"),
        }
    }

    #[test]
    fn cholesky_tolerates_perfect_correlation() {
        // Semi-definite edge: c = 1 gives a zero pivot, not an error.
        let c = CorrelationMatrix::pair(1.0).unwrap();
        let l = cholesky(&c).unwrap();
        let back = l.reconstruct();
        assert_abs_diff_eq!(back[1][1], 1.0, epsilon = 1e-10);
        assert_abs_diff_eq!(back[0][1], 1.0, epsilon = 1e-10);
    }

    #[test]
    fn correlation_matrix_rejects_asymmetry_and_bad_diagonal() {
        assert!(matches!(
            CorrelationMatrix::new(vec![vec![1.0, 0.2], vec![0.3, 1.0]]),
            Err(Error::BadMatrix(_))
        ));
        assert!(matches!(
            CorrelationMatrix::new(vec![vec![0.9, 0.2], vec![0.2, 1.0]]),
            Err(Error::BadMatrix(_))
        ));
    }

    /// Sample covariance of the increments must track c_ij * dt.
    fn sample_cov(c: &CorrelationMatrix, dt: f64, n_draws: usize, seed: u64) -> Vec<Vec<f64>> {
        let l = cholesky(c).unwrap();
        let mut rng = RngStream::new(seed, 0).rng();
        let dim = c.dim();
        let mut acc = vec![vec![0.0; dim]; dim];
        for _ in 0..n_draws {
            let dw = correlated_increments(&l, dt, &mut rng);
            for i in 0..dim {
                for j in 0..dim {
                    acc[i][j] += dw[i] * dw[j];
                }
            }
        }
        for row in acc.iter_mut() {
            for v in row.iter_mut() {
                *v /= n_draws as f64;
            }
        }
        acc
    }

    #[test]
    fn increments_identity_gives_independent_components() {
        let dt = 0.01;
        let n = 100_000;
        let cov = sample_cov(&CorrelationMatrix::identity(2), dt, n, 7);
        // Var[dW_i dW_j] = dt^2 (1 + c^2); three standard errors.
        let se = (2.0_f64).sqrt() * dt / (n as f64).sqrt();
        assert!((cov[0][1]).abs() < 3.0 * se, "off-diag {}", cov[0][1]);
        assert!((cov[0][0] - dt).abs() < 3.0 * se);
        assert!((cov[1][1] - dt).abs() < 3.0 * se);
    }

    #[test]
    fn increments_match_positive_and_negative_targets() {
        let dt = 0.01;
        let n = 100_000;
        for &c in &[0.91, -0.91] {
            let cov = sample_cov(&CorrelationMatrix::pair(c).unwrap(), dt, n, 11);
            let target = c * dt;
            assert!(
                (cov[0][1] - target).abs() < 0.05 * target.abs(),
                "c = {c}: sample {} vs target {target}",
                cov[0][1]
            );
        }
    }

    #[test]
    fn increments_covariance_consistent_three_dims() {
        let c = CorrelationMatrix::new(vec![
            vec![1.0, 0.6, -0.4],
            vec![0.6, 1.0, 0.1],
            vec![-0.4, 0.1, 1.0],
        ])
        .unwrap();
        let dt = 0.5;
        let n = 1_000_000;
        let cov = sample_cov(&c, dt, n, 13);
        let se = (2.0_f64).sqrt() * dt / (n as f64).sqrt();
        for (i, row) in cov.iter().enumerate() {
            for (j, &v) in row.iter().enumerate() {
                assert!(
                    (v - c.get(i, j) * dt).abs() < 3.0 * se,
                    "({i},{j}): {v} vs {}",
                    c.get(i, j) * dt
                );
            }
        }
    }

    #[test]
    fn euler_step_arithmetic() {
        // x = 0, mu = 1.2, dt = 0.01, no noise: x' = 0.012 exactly.
        let params = [standard_neuron(0.0)];
        let mut x = [0.0];
        euler_step(&mut x, &params, &[0.0], 0.01);
        assert_abs_diff_eq!(x[0], 0.012, epsilon = 1e-15);
    }

    #[test]
    fn euler_fixed_point_is_mu_tau() {
        // At x = mu * tau the drift vanishes.
        let params = [standard_neuron(0.0)];
        let mut x = [12.0];
        euler_step(&mut x, &params, &[0.0], 0.01);
        assert_abs_diff_eq!(x[0], 12.0, epsilon = 1e-12);
    }

    #[test]
    fn zero_noise_trajectory_tracks_closed_form() {
        // x(t) = mu tau (1 - exp(-t/tau)); Euler error stays below
        // 10 * dt * mu over [0, 100] ms.
        let params = [standard_neuron(0.0)];
        let dt = 0.01;
        let mut x = [0.0];
        let mut worst = 0.0_f64;
        for step in 1..=10_000 {
            euler_step(&mut x, &params, &[0.0], dt);
            let t = step as f64 * dt;
            let exact = 1.2 * 10.0 * (1.0 - (-t / 10.0).exp());
            worst = worst.max((x[0] - exact).abs());
        }
        assert!(worst < 10.0 * dt * 1.2, "worst abs error {worst}");
    }

    #[test]
    fn rng_streams_reproduce_and_separate() {
        let mut a1 = RngStream::new(42, 3).rng();
        let mut a2 = RngStream::new(42, 3).rng();
        let mut b = RngStream::new(42, 4).rng();
        let mut same = true;
        let mut differ = false;
        for _ in 0..256 {
            let x1: u64 = a1.gen();
            let x2: u64 = a2.gen();
            let y: u64 = b.gen();
            same &= x1 == x2;
            differ |= x1 != y;
        }
        assert!(same, "identical streams must match draw for draw");
        assert!(differ, "distinct stream indices must decouple");
    }

    #[test]
    fn correlated_increments_deterministic_per_stream() {
        let l = cholesky(&CorrelationMatrix::pair(0.5).unwrap()).unwrap();
        let mut r1 = RngStream::new(9, 0).rng();
        let mut r2 = RngStream::new(9, 0).rng();
        for _ in 0..64 {
            let d1 = correlated_increments(&l, 0.01, &mut r1);
            let d2 = correlated_increments(&l, 0.01, &mut r2);
            assert_eq!(d1, d2, "same stream must give bitwise equal increments");
        }
    }
}
