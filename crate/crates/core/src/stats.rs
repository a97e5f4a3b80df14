//! Empirical distribution and copula machinery, and the three dependence
//! measures reported by every experiment.
//!
//! Conventions, fixed across the library:
//! - the empirical CDF is right-continuous with jumps 1/n:
//!   F(x) = #{X_i <= x} / n;
//! - pseudo-observations are rank/n by default (maximum rank under ties), so
//!   the largest value maps to exactly 1;
//! - Kendall's tau normalizes the concordant-discordant difference by the
//!   total pair count C(n,2); tied pairs contribute to neither count;
//! - Spearman's rho is the Pearson correlation of midranks;
//! - the tau p-value uses the normal approximation
//!   z = 3 tau sqrt(n(n-1)) / sqrt(2(2n+5)), two-sided.

use statrs::distribution::{ChiSquared, ContinuousCDF, Normal};

use crate::error::{Error, Result};

/// Denominator used when mapping ranks to (0, 1].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum RankDenominator {
    /// rank / n: values fill (0, 1] and the maximum maps to 1.
    #[default]
    N,
    /// rank / (n + 1): values stay strictly inside (0, 1).
    NPlusOne,
}

fn check_finite(values: impl IntoIterator<Item = f64>, what: &str) -> Result<()> {
    for (k, v) in values.into_iter().enumerate() {
        if !v.is_finite() {
            return Err(Error::NonFinite(format!("{what}[{k}] = {v}")));
        }
    }
    Ok(())
}

/// Empirical cumulative distribution function of a sample.
#[derive(Debug, Clone)]
pub struct Ecdf {
    sorted: Vec<f64>,
}

impl Ecdf {
    pub fn new(values: &[f64]) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::EmptyInput("ecdf of an empty sample".into()));
        }
        check_finite(values.iter().copied(), "value")?;
        let mut sorted = values.to_vec();
        sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
        Ok(Self { sorted })
    }

    pub fn len(&self) -> usize {
        self.sorted.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// F(x) = #{X_i <= x} / n. Nondecreasing, right-continuous, 0 before the
    /// minimum and 1 from the maximum on.
    pub fn eval(&self, x: f64) -> f64 {
        let below = self.sorted.partition_point(|&v| v <= x);
        below as f64 / self.sorted.len() as f64
    }
}

/// Rank-transformed bivariate sample on (0, 1]^2. Construction is the only
/// way to obtain one, so downstream code can rely on the range invariant.
#[derive(Debug, Clone, PartialEq)]
pub struct PseudoObservations {
    pairs: Vec<(f64, f64)>,
}

impl PseudoObservations {
    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn pairs(&self) -> &[(f64, f64)] {
        &self.pairs
    }
}

fn margin_ranks(values: &[f64]) -> Vec<usize> {
    let mut sorted = values.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
    values
        .iter()
        .map(|&x| sorted.partition_point(|&v| v <= x))
        .collect()
}

/// Maps each coordinate through its own margin's empirical CDF:
/// u_i = F_x(x_i), v_i = F_y(y_i), i.e. rank/n with maximum rank under ties.
/// Depends on the data only through ranks, hence invariant under strictly
/// increasing marginal transforms.
pub fn pseudo_observations(pairs: &[(f64, f64)]) -> Result<PseudoObservations> {
    pseudo_observations_with(pairs, RankDenominator::N)
}

/// [`pseudo_observations`] with an explicit rank denominator.
pub fn pseudo_observations_with(
    pairs: &[(f64, f64)],
    denom: RankDenominator,
) -> Result<PseudoObservations> {
    let n = pairs.len();
    if n < 2 {
        return Err(Error::EmptyInput(format!(
            "pseudo-observations need at least 2 pairs, got {n}"
        )));
    }
    check_finite(pairs.iter().map(|p| p.0), "x")?;
    check_finite(pairs.iter().map(|p| p.1), "y")?;
    let xs: Vec<f64> = pairs.iter().map(|p| p.0).collect();
    let ys: Vec<f64> = pairs.iter().map(|p| p.1).collect();
    let rx = margin_ranks(&xs);
    let ry = margin_ranks(&ys);
    let d = match denom {
        RankDenominator::N => n as f64,
        RankDenominator::NPlusOne => (n + 1) as f64,
    };
    let out = rx
        .into_iter()
        .zip(ry)
        .map(|(a, b)| (a as f64 / d, b as f64 / d))
        .collect();
    Ok(PseudoObservations { pairs: out })
}

/// Empirical copula evaluated at (u, v):
/// C(u, v) = #{(u_i, v_i) : u_i <= u and v_i <= v} / n.
/// Grounded (0 on the axes up to rank resolution), 2-increasing, margins
/// uniform to within 1/n.
pub fn empirical_copula(pobs: &PseudoObservations, u: f64, v: f64) -> f64 {
    let n = pobs.pairs.len();
    let hits = pobs
        .pairs
        .iter()
        .filter(|&&(a, b)| a <= u && b <= v)
        .count();
    hits as f64 / n as f64
}

/// Counts strict inversions of `a` by merge sort; `buf` is scratch of the
/// same length. Equal elements are not inversions.
fn count_inversions(a: &mut [f64], buf: &mut [f64]) -> u64 {
    let n = a.len();
    if n < 2 {
        return 0;
    }
    let mid = n / 2;
    let (left, right) = a.split_at_mut(mid);
    let mut inv =
        count_inversions(left, &mut buf[..mid]) + count_inversions(right, &mut buf[mid..]);
    let (mut i, mut j, mut k) = (0usize, 0usize, 0usize);
    while i < left.len() && j < right.len() {
        if left[i] <= right[j] {
            buf[k] = left[i];
            i += 1;
        } else {
            buf[k] = right[j];
            j += 1;
            inv += (left.len() - i) as u64;
        }
        k += 1;
    }
    while i < left.len() {
        buf[k] = left[i];
        i += 1;
        k += 1;
    }
    while j < right.len() {
        buf[k] = right[j];
        j += 1;
        k += 1;
    }
    a.copy_from_slice(&buf[..n]);
    inv
}

fn tied_pair_count(sorted: &[f64]) -> u64 {
    let mut total = 0u64;
    let mut run = 1u64;
    for w in sorted.windows(2) {
        if w[0] == w[1] {
            run += 1;
        } else {
            total += run * (run - 1) / 2;
            run = 1;
        }
    }
    total + run * (run - 1) / 2
}

/// Concordant-minus-discordant pair count in O(n log n) (merge-sort
/// inversion counting). Pairs tied in either coordinate count as neither.
fn concordant_minus_discordant(pairs: &[(f64, f64)]) -> i64 {
    let n = pairs.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| {
        pairs[a]
            .partial_cmp(&pairs[b])
            .expect("finite inputs are totally ordered")
    });

    let n0 = (n as u64) * (n as u64 - 1) / 2;
    // Pairs tied in x, and tied in both, from runs in (x, y) order.
    let mut n1 = 0u64;
    let mut n3 = 0u64;
    let mut run_x = 1u64;
    let mut run_xy = 1u64;
    for w in order.windows(2) {
        let (p, q) = (pairs[w[0]], pairs[w[1]]);
        if p.0 == q.0 {
            run_x += 1;
        } else {
            n1 += run_x * (run_x - 1) / 2;
            run_x = 1;
        }
        if p == q {
            run_xy += 1;
        } else {
            n3 += run_xy * (run_xy - 1) / 2;
            run_xy = 1;
        }
    }
    n1 += run_x * (run_x - 1) / 2;
    n3 += run_xy * (run_xy - 1) / 2;

    let mut ys: Vec<f64> = order.iter().map(|&i| pairs[i].1).collect();
    let mut sorted_y = ys.clone();
    sorted_y.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let n2 = tied_pair_count(&sorted_y);

    // In (x asc, y asc) order a strict y-inversion is exactly a discordant
    // pair: x-tied runs are y-sorted and contribute none.
    let mut buf = vec![0.0; ys.len()];
    let discordant = count_inversions(&mut ys, &mut buf);

    let concordant = n0 - n1 - n2 + n3 - discordant;
    concordant as i64 - discordant as i64
}

fn check_margins(pairs: &[(f64, f64)]) -> Result<()> {
    if pairs.len() < 2 {
        return Err(Error::EmptyInput(format!(
            "need at least 2 pairs, got {}",
            pairs.len()
        )));
    }
    check_finite(pairs.iter().map(|p| p.0), "x")?;
    check_finite(pairs.iter().map(|p| p.1), "y")?;
    if pairs.iter().all(|p| p.0 == pairs[0].0) {
        return Err(Error::DegenerateMargin("x margin is constant".into()));
    }
    if pairs.iter().all(|p| p.1 == pairs[0].1) {
        return Err(Error::DegenerateMargin("y margin is constant".into()));
    }
    Ok(())
}

/// Kendall's tau_hat = (c - d) / C(n,2) and its two-sided p-value under the
/// normal approximation z = 3 tau sqrt(n(n-1)) / sqrt(2(2n+5)).
pub fn kendall_tau(pairs: &[(f64, f64)]) -> Result<(f64, f64)> {
    check_margins(pairs)?;
    let n = pairs.len();
    let s = concordant_minus_discordant(pairs);
    let n0 = (n as u64) * (n as u64 - 1) / 2;
    let tau = s as f64 / n0 as f64;
    let nf = n as f64;
    let z = 3.0 * tau * (nf * (nf - 1.0)).sqrt() / (2.0 * (2.0 * nf + 5.0)).sqrt();
    let normal = Normal::new(0.0, 1.0).expect("unit normal");
    let p = 2.0 * (1.0 - normal.cdf(z.abs()));
    Ok((tau, p.clamp(0.0, 1.0)))
}

/// Midranks (average rank over each tie run, 1-based).
fn midranks(values: &[f64]) -> Vec<f64> {
    let n = values.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| values[a].partial_cmp(&values[b]).unwrap());
    let mut ranks = vec![0.0; n];
    let mut i = 0;
    while i < n {
        let mut j = i;
        while j + 1 < n && values[order[j + 1]] == values[order[i]] {
            j += 1;
        }
        // Positions i..=j (0-based) share the midrank.
        let mid = (i + j) as f64 / 2.0 + 1.0;
        for &idx in &order[i..=j] {
            ranks[idx] = mid;
        }
        i = j + 1;
    }
    ranks
}

fn pearson_of(xs: &[f64], ys: &[f64]) -> Result<f64> {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let mut sxy = 0.0;
    let mut sxx = 0.0;
    let mut syy = 0.0;
    for (&x, &y) in xs.iter().zip(ys) {
        sxy += (x - mx) * (y - my);
        sxx += (x - mx) * (x - mx);
        syy += (y - my) * (y - my);
    }
    if sxx == 0.0 || syy == 0.0 {
        return Err(Error::DegenerateMargin("margin has zero variance".into()));
    }
    Ok((sxy / (sxx * syy).sqrt()).clamp(-1.0, 1.0))
}

/// Spearman's rho_hat: the Pearson correlation of the two midrank vectors.
/// Equals the classic 1 - 6 sum(d^2) / (n(n^2-1)) form when ties are absent.
pub fn spearman_rho(pairs: &[(f64, f64)]) -> Result<f64> {
    check_margins(pairs)?;
    let xs: Vec<f64> = pairs.iter().map(|p| p.0).collect();
    let ys: Vec<f64> = pairs.iter().map(|p| p.1).collect();
    pearson_of(&midranks(&xs), &midranks(&ys))
}

/// Pearson's linear correlation coefficient.
pub fn pearson_r(pairs: &[(f64, f64)]) -> Result<f64> {
    check_margins(pairs)?;
    let xs: Vec<f64> = pairs.iter().map(|p| p.0).collect();
    let ys: Vec<f64> = pairs.iter().map(|p| p.1).collect();
    pearson_of(&xs, &ys)
}

/// All three dependence measures for one labeled sample.
#[derive(Debug, Clone, PartialEq)]
pub struct DependenceSummary {
    pub label: String,
    pub n: usize,
    pub pearson_r: f64,
    pub kendall_tau: f64,
    pub spearman_rho: f64,
    pub tau_p_value: f64,
    /// Set when n < 10; the numbers are still computed but should not be
    /// trusted.
    pub low_confidence: bool,
}

/// Computes Pearson r, Kendall tau (with p-value) and Spearman rho for one
/// sample of (T, Delta) or FPT pairs.
pub fn summarize(pairs: &[(f64, f64)], label: &str) -> Result<DependenceSummary> {
    let (tau, p) = kendall_tau(pairs)?;
    Ok(DependenceSummary {
        label: label.to_string(),
        n: pairs.len(),
        pearson_r: pearson_r(pairs)?,
        kendall_tau: tau,
        spearman_rho: spearman_rho(pairs)?,
        tau_p_value: p,
        low_confidence: pairs.len() < 10,
    })
}

/// Chi-square uniformity statistic over a `bins` x `bins` grid of the unit
/// square: sum over cells of (observed - n/bins^2)^2 / (n/bins^2). Under
/// independence the statistic is small; dependence concentrates mass and
/// inflates it.
pub fn grid_chi_square(pobs: &PseudoObservations, bins: usize) -> Result<f64> {
    if bins < 2 {
        return Err(Error::BadArgument("need at least 2 bins".into()));
    }
    let n = pobs.len();
    let mut counts = vec![0u64; bins * bins];
    for &(u, v) in pobs.pairs() {
        // u, v lie in (0, 1]; the top edge belongs to the last bin.
        let bu = ((u * bins as f64).ceil() as usize).clamp(1, bins) - 1;
        let bv = ((v * bins as f64).ceil() as usize).clamp(1, bins) - 1;
        counts[bu * bins + bv] += 1;
    }
    let expected = n as f64 / (bins * bins) as f64;
    Ok(counts
        .iter()
        .map(|&c| {
            let d = c as f64 - expected;
            d * d / expected
        })
        .sum())
}

/// Quantile of the chi-square distribution with `df` degrees of freedom.
pub fn chi_square_quantile(df: f64, p: f64) -> f64 {
    ChiSquared::new(df).expect("positive df").inverse_cdf(p)
}
