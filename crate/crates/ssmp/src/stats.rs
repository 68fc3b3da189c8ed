//! Distributional test machinery: Kolmogorov–Smirnov tests, chi-square
//! density fits (plain and importance-weighted), and bootstrap intervals.
//! Every test is deterministic given a seed and reports exactly one pass
//! rule.

use crate::error::{Error, Result};
use crate::rng::SeedSpec;
use rand::Rng;
use serde::{Deserialize, Serialize};

/// Reference a statistic is compared against: either a number or the name
/// of a distribution/identity.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(untagged)]
pub enum Reference {
    Value(f64),
    Distribution(String),
}

/// Which rule decides the `pass` flag.
#[derive(Debug, Clone, Copy, Serialize, Deserialize, PartialEq, Eq)]
#[serde(rename_all = "snake_case")]
pub enum PassRule {
    /// `statistic <= threshold`
    StatisticWithinThreshold,
    /// `p_value >= threshold`
    PValueAboveFloor,
}

/// One verdict from the experiment machinery.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TestReport {
    pub name: String,
    pub statistic: f64,
    pub reference: Reference,
    pub threshold: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub p_value: Option<f64>,
    pub n: usize,
    pub seed: u64,
    pub rule: PassRule,
    pub pass: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

impl TestReport {
    pub fn from_statistic(
        name: impl Into<String>,
        statistic: f64,
        reference: Reference,
        threshold: f64,
        n: usize,
        seed: u64,
    ) -> Self {
        TestReport {
            name: name.into(),
            statistic,
            reference,
            threshold,
            p_value: None,
            n,
            seed,
            rule: PassRule::StatisticWithinThreshold,
            pass: statistic <= threshold,
            note: None,
        }
    }

    pub fn from_p_value(
        name: impl Into<String>,
        statistic: f64,
        p_value: f64,
        reference: Reference,
        floor: f64,
        n: usize,
        seed: u64,
    ) -> Self {
        TestReport {
            name: name.into(),
            statistic,
            reference,
            threshold: floor,
            p_value: Some(p_value),
            n,
            seed,
            rule: PassRule::PValueAboveFloor,
            pass: p_value >= floor,
            note: None,
        }
    }

    pub fn with_note(mut self, note: impl Into<String>) -> Self {
        self.note = Some(note.into());
        self
    }
}

/// Survival function of the asymptotic Kolmogorov distribution,
/// `P(K > lambda) = 2 sum_k (-1)^{k-1} exp(-2 k^2 lambda^2)`.
pub fn kolmogorov_survival(lambda: f64) -> f64 {
    if lambda <= 0.0 {
        return 1.0;
    }
    let mut sum = 0.0;
    for k in 1..=200 {
        let term = (-2.0 * (k as f64).powi(2) * lambda * lambda).exp();
        if term < 1e-18 {
            break;
        }
        sum += if k % 2 == 1 { term } else { -term };
    }
    (2.0 * sum).clamp(0.0, 1.0)
}

fn sorted(v: &[f64]) -> Vec<f64> {
    let mut out = v.to_vec();
    out.sort_by(|a, b| a.total_cmp(b));
    out
}

/// Two-sample KS statistic and asymptotic p-value.
pub fn ks_two_sample(a: &[f64], b: &[f64]) -> Result<(f64, f64)> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::domain("ks_two_sample needs nonempty samples"));
    }
    let a = sorted(a);
    let b = sorted(b);
    let (n, m) = (a.len(), b.len());
    let mut stat = 0.0f64;
    let (mut i, mut j) = (0usize, 0usize);
    while i < n && j < m {
        let x = a[i].min(b[j]);
        while i < n && a[i] <= x {
            i += 1;
        }
        while j < m && b[j] <= x {
            j += 1;
        }
        let diff = (i as f64 / n as f64 - j as f64 / m as f64).abs();
        if diff > stat {
            stat = diff;
        }
    }
    let n_eff = (n as f64 * m as f64) / (n as f64 + m as f64);
    let p = kolmogorov_survival(n_eff.sqrt() * stat);
    Ok((stat, p))
}

/// One-sample KS statistic against a CDF, with asymptotic p-value.
pub fn ks_one_sample(a: &[f64], cdf: impl Fn(f64) -> f64) -> Result<(f64, f64)> {
    if a.is_empty() {
        return Err(Error::domain("ks_one_sample needs a nonempty sample"));
    }
    let a = sorted(a);
    let n = a.len() as f64;
    let mut stat = 0.0f64;
    for (i, &x) in a.iter().enumerate() {
        let f = cdf(x).clamp(0.0, 1.0);
        let lo = (f - i as f64 / n).abs();
        let hi = ((i + 1) as f64 / n - f).abs();
        stat = stat.max(lo).max(hi);
    }
    let p = kolmogorov_survival(n.sqrt() * stat);
    Ok((stat, p))
}

/// Chi-square CDF via the regularized lower incomplete gamma function.
fn chi_square_cdf(x: f64, dof: f64) -> f64 {
    if x <= 0.0 {
        return 0.0;
    }
    statrs::function::gamma::gamma_lr(dof / 2.0, x / 2.0)
}

/// Pearson chi-square fit of (optionally weighted) samples against a
/// density, with expected bin masses obtained by quadrature and adjacent
/// bins merged until every expected count is at least 5. Weighted samples
/// use the effective sample size `(sum w)^2 / sum w^2`.
pub fn chi_square_density_fit(
    samples: &[f64],
    weights: Option<&[f64]>,
    edges: &[f64],
    density: impl Fn(f64) -> f64,
) -> Result<(f64, f64)> {
    if samples.is_empty() {
        return Err(Error::domain("chi_square_density_fit needs samples"));
    }
    if edges.len() < 2 {
        return Err(Error::domain("need at least one bin"));
    }
    if let Some(w) = weights {
        if w.len() != samples.len() {
            return Err(Error::domain("weights length mismatch"));
        }
        if w.iter().any(|&x| x < 0.0) {
            return Err(Error::domain("weights must be nonnegative"));
        }
    }
    let nbins = edges.len() - 1;

    // Expected masses by quadrature, normalized over the binned range.
    let mut expected: Vec<f64> = (0..nbins)
        .map(|i| crate::quad::integrate(&|x| density(x), edges[i], edges[i + 1], 1e-10).value)
        .collect();
    let total_mass: f64 = expected.iter().sum();
    if total_mass <= 0.0 {
        return Err(Error::domain("density has no mass over the bins"));
    }
    for e in &mut expected {
        *e /= total_mass;
    }

    // Observed (weighted) counts; samples outside the range are dropped and
    // the effective size computed from the retained ones.
    let mut observed = vec![0.0f64; nbins];
    let mut w_sum = 0.0;
    let mut w_sq = 0.0;
    for (k, &x) in samples.iter().enumerate() {
        if x < edges[0] || x >= edges[nbins] {
            continue;
        }
        let w = weights.map_or(1.0, |ws| ws[k]);
        let mut i = match edges.binary_search_by(|e| e.total_cmp(&x)) {
            Ok(i) => i,
            Err(i) => i - 1,
        };
        if i >= nbins {
            i = nbins - 1;
        }
        observed[i] += w;
        w_sum += w;
        w_sq += w * w;
    }
    if w_sum <= 0.0 {
        return Err(Error::domain("no samples fall inside the bins"));
    }
    let n_eff = w_sum * w_sum / w_sq;

    // Merge adjacent bins until each expected count reaches 5.
    let mut merged_obs = Vec::new();
    let mut merged_exp = Vec::new();
    let (mut acc_o, mut acc_e) = (0.0, 0.0);
    for i in 0..nbins {
        acc_o += observed[i] / w_sum;
        acc_e += expected[i];
        if acc_e * n_eff >= 5.0 {
            merged_obs.push(acc_o);
            merged_exp.push(acc_e);
            acc_o = 0.0;
            acc_e = 0.0;
        }
    }
    if acc_e > 0.0 || acc_o > 0.0 {
        if let (Some(o), Some(e)) = (merged_obs.last_mut(), merged_exp.last_mut()) {
            *o += acc_o;
            *e += acc_e;
        } else {
            merged_obs.push(acc_o);
            merged_exp.push(acc_e);
        }
    }

    let k = merged_obs.len();
    if k <= 1 {
        // A single cell carries no discrepancy.
        return Ok((0.0, 1.0));
    }
    let stat: f64 = merged_obs
        .iter()
        .zip(merged_exp.iter())
        .map(|(&o, &e)| n_eff * (o - e) * (o - e) / e)
        .sum();
    let dof = (k - 1) as f64;
    let p = 1.0 - chi_square_cdf(stat, dof);
    Ok((stat, p))
}

/// Percentile bootstrap confidence interval for a functional of the sample.
pub fn bootstrap_ci(
    samples: &[f64],
    functional: impl Fn(&[f64]) -> f64,
    b: usize,
    level: f64,
    seed: SeedSpec,
) -> Result<(f64, f64)> {
    if samples.is_empty() {
        return Err(Error::domain("bootstrap needs samples"));
    }
    if b < 100 {
        return Err(Error::domain("bootstrap needs B >= 100 replicates"));
    }
    if !(0.0 < level && level < 1.0) {
        return Err(Error::domain("level must lie in (0,1)"));
    }
    let n = samples.len();
    let mut rng = seed.rng();
    let mut stats: Vec<f64> = Vec::with_capacity(b);
    let mut resample = vec![0.0f64; n];
    for _ in 0..b {
        for slot in resample.iter_mut() {
            *slot = samples[rng.random_range(0..n)];
        }
        stats.push(functional(&resample));
    }
    stats.sort_by(|a, b| a.total_cmp(b));
    let tail = (1.0 - level) / 2.0;
    let lo_idx = ((b as f64 * tail).floor() as usize).min(b - 1);
    let hi_idx = ((b as f64 * (1.0 - tail)).ceil() as usize).clamp(1, b) - 1;
    Ok((stats[lo_idx], stats[hi_idx]))
}

/// Empirical mean and standard error.
pub fn mean_stderr(v: &[f64]) -> (f64, f64) {
    let n = v.len() as f64;
    let mean = v.iter().sum::<f64>() / n;
    let var = v.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n - 1.0).max(1.0);
    (mean, (var / n).sqrt())
}

/// Weighted mean, with standard error from the normalized-weight delta
/// method.
pub fn weighted_mean_stderr(values: &[f64], weights: &[f64]) -> (f64, f64) {
    let w_sum: f64 = weights.iter().sum();
    let mean = values
        .iter()
        .zip(weights)
        .map(|(v, w)| v * w)
        .sum::<f64>()
        / w_sum;
    let var_num: f64 = values
        .iter()
        .zip(weights)
        .map(|(v, w)| (w * (v - mean)).powi(2))
        .sum();
    (mean, var_num.sqrt() / w_sum)
}
