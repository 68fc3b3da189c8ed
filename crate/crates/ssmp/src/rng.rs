//! Random number contract and increment samplers.
//!
//! Every Monte Carlo worker owns a counter-based stream derived from a
//! master seed, so results are bit-for-bit reproducible and independent of
//! thread scheduling: path `i` always consumes stream `i`.

use crate::error::{Error, Result};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

/// Master seed plus stream id. Distinct stream ids give statistically
/// independent streams; identical specs reproduce identical draws.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct SeedSpec {
    pub master_seed: u64,
    pub stream_id: u64,
}

impl SeedSpec {
    pub fn new(master_seed: u64, stream_id: u64) -> Self {
        SeedSpec {
            master_seed,
            stream_id,
        }
    }

    /// Same master seed, different stream.
    pub fn stream(&self, stream_id: u64) -> Self {
        SeedSpec {
            master_seed: self.master_seed,
            stream_id,
        }
    }

    pub fn rng(&self) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.master_seed);
        rng.set_stream(self.stream_id);
        rng
    }
}

/// Stream ids above this mark are reserved for internal reducers
/// (resampling, envelope construction), keeping them disjoint from
/// per-path streams.
pub const AUX_STREAM_BASE: u64 = 1 << 48;

pub type Stream = ChaCha8Rng;

/// One standard normal draw.
pub fn standard_normal(rng: &mut Stream) -> f64 {
    rng.sample(StandardNormal)
}

/// Gaussian increment `drift*dt + sigma*sqrt(dt)*Z`.
pub fn gaussian_increment(dt: f64, drift: f64, sigma: f64, rng: &mut Stream) -> Result<f64> {
    if !(dt > 0.0) {
        return Err(Error::domain("dt must be positive"));
    }
    if !(sigma >= 0.0) {
        return Err(Error::domain("sigma must be nonnegative"));
    }
    Ok(drift * dt + sigma * dt.sqrt() * standard_normal(rng))
}

/// Exponential sample with the given rate (mean `1/rate`).
pub fn exponential_sample(rate: f64, rng: &mut Stream) -> Result<f64> {
    if !(rate > 0.0) {
        return Err(Error::domain("rate must be positive"));
    }
    let u: f64 = rng.random::<f64>();
    Ok(-(1.0 - u).ln() / rate)
}

/// Positive strictly stable draw of index `a` in (0,1) with Laplace
/// transform `exp(-lambda^a)`, by the Chambers–Mallows–Stuck construction.
fn positive_stable(a: f64, rng: &mut Stream) -> f64 {
    debug_assert!(a > 0.0 && a < 1.0);
    let u = std::f64::consts::PI * rng.random::<f64>();
    let e = -(1.0 - rng.random::<f64>()).ln();
    let s1 = (a * u).sin() / u.sin().powf(1.0 / a);
    let s2 = ((1.0 - a) * u).sin() / e;
    s1 * s2.powf((1.0 - a) / a)
}

/// Increment over `dt` of an isotropic stable process in `R^d` with
/// characteristic exponent `|theta|^alpha`, `alpha` in (0, 2].
///
/// For `alpha < 2` the increment is a Gaussian vector subordinated by a
/// positive `(alpha/2)`-stable time; a product of a marginal sampler per
/// coordinate would not be isotropic. The boundary `alpha = 2` is the
/// Gaussian case with per-coordinate variance `2*dt`.
pub fn isotropic_stable_increment(
    alpha: f64,
    d: usize,
    dt: f64,
    rng: &mut Stream,
) -> Result<Vec<f64>> {
    if !(alpha > 0.0 && alpha <= 2.0) {
        return Err(Error::domain("alpha must lie in (0, 2]"));
    }
    if d == 0 {
        return Err(Error::domain("dimension must be at least 1"));
    }
    if !(dt > 0.0) {
        return Err(Error::domain("dt must be positive"));
    }
    if alpha == 2.0 {
        let s = (2.0 * dt).sqrt();
        return Ok((0..d).map(|_| s * standard_normal(rng)).collect());
    }
    let sub = dt.powf(2.0 / alpha) * positive_stable(alpha / 2.0, rng);
    let s = (2.0 * sub).sqrt();
    Ok((0..d).map(|_| s * standard_normal(rng)).collect())
}

/// Validates a conservative rate matrix: zero row sums, nonnegative
/// off-diagonal entries.
pub fn validate_rate_matrix(q: &[Vec<f64>]) -> Result<()> {
    let n = q.len();
    if n == 0 || q.iter().any(|row| row.len() != n) {
        return Err(Error::domain("rate matrix must be square and nonempty"));
    }
    for (i, row) in q.iter().enumerate() {
        let mut sum = 0.0;
        for (j, &v) in row.iter().enumerate() {
            if i != j && v < 0.0 {
                return Err(Error::domain("off-diagonal rates must be nonnegative"));
            }
            sum += v;
        }
        if sum.abs() > 1e-9 {
            return Err(Error::domain(format!("row {i} sums to {sum}, not 0")));
        }
    }
    Ok(())
}

/// Exact transition of a continuous-time chain over an interval of length
/// `dt`: exponential holding times, not an Euler approximation. Returns the
/// state at the end of the interval.
pub fn markov_chain_step(q: &[Vec<f64>], state: usize, dt: f64, rng: &mut Stream) -> Result<usize> {
    validate_rate_matrix(q)?;
    if state >= q.len() {
        return Err(Error::domain("state index out of range"));
    }
    let mut s = state;
    let mut remaining = dt;
    loop {
        let exit = -q[s][s];
        if exit <= 0.0 {
            return Ok(s);
        }
        let hold = exponential_sample(exit, rng)?;
        if hold > remaining {
            return Ok(s);
        }
        remaining -= hold;
        // Jump destination proportional to off-diagonal rates.
        let mut u = rng.random::<f64>() * exit;
        let mut next = s;
        for (j, &rate) in q[s].iter().enumerate() {
            if j == s || rate <= 0.0 {
                continue;
            }
            if u < rate {
                next = j;
                break;
            }
            u -= rate;
            next = j;
        }
        s = next;
    }
}

/// Jump times and visited states of a continuous-time chain on `[0, dt]`,
/// starting from `state`. Returned segments are `(duration, state)` pairs
/// covering the interval. Used to split modulated Gaussian increments at
/// regime changes.
pub fn markov_chain_segments(
    q: &[Vec<f64>],
    state: usize,
    dt: f64,
    rng: &mut Stream,
) -> Result<Vec<(f64, usize)>> {
    if state >= q.len() {
        return Err(Error::domain("state index out of range"));
    }
    let mut out = Vec::new();
    let mut s = state;
    let mut remaining = dt;
    loop {
        let exit = -q[s][s];
        if exit <= 0.0 {
            out.push((remaining, s));
            return Ok(out);
        }
        let hold = exponential_sample(exit, rng)?;
        if hold >= remaining {
            out.push((remaining, s));
            return Ok(out);
        }
        out.push((hold, s));
        remaining -= hold;
        let mut u = rng.random::<f64>() * exit;
        let mut next = s;
        for (j, &rate) in q[s].iter().enumerate() {
            if j == s || rate <= 0.0 {
                continue;
            }
            if u < rate {
                next = j;
                break;
            }
            u -= rate;
            next = j;
        }
        s = next;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn seed(stream: u64) -> SeedSpec {
        SeedSpec::new(0xC0FFEE, stream)
    }

    #[test]
    fn reproducible_streams() {
        let mut a = seed(3).rng();
        let mut b = seed(3).rng();
        for _ in 0..100 {
            assert_eq!(a.random::<u64>(), b.random::<u64>());
        }
    }

    #[test]
    fn stream_independence_correlation() {
        let mut a = seed(0).rng();
        let mut b = seed(1).rng();
        let n = 100_000;
        let (mut sa, mut sb, mut saa, mut sbb, mut sab) = (0.0, 0.0, 0.0, 0.0, 0.0);
        for _ in 0..n {
            let x: f64 = a.random();
            let y: f64 = b.random();
            sa += x;
            sb += y;
            saa += x * x;
            sbb += y * y;
            sab += x * y;
        }
        let nf = n as f64;
        let cov = sab / nf - (sa / nf) * (sb / nf);
        let va = saa / nf - (sa / nf).powi(2);
        let vb = sbb / nf - (sb / nf).powi(2);
        let corr = cov / (va * vb).sqrt();
        assert!(corr.abs() < 0.01, "stream correlation {corr}");
    }

    #[test]
    fn gaussian_degenerate_and_moments() {
        let mut rng = seed(7).rng();
        assert_eq!(gaussian_increment(1.0, 0.5, 0.0, &mut rng).unwrap(), 0.5);

        let n = 1_000_000;
        let mut sum = 0.0;
        for _ in 0..n {
            sum += gaussian_increment(1.0, 0.5, 1.0, &mut rng).unwrap();
        }
        let mean = sum / n as f64;
        // CLT bound: 3*sigma/sqrt(N) = 0.003, spec allows 0.005.
        assert!((mean - 0.5).abs() < 0.005, "mean {mean}");

        let mut sq = 0.0;
        let mut s = 0.0;
        for _ in 0..n {
            let x = gaussian_increment(0.25, 0.0, 2.0, &mut rng).unwrap();
            s += x;
            sq += x * x;
        }
        let var = sq / n as f64 - (s / n as f64).powi(2);
        assert!((var - 1.0).abs() < 0.01, "variance {var}");
    }

    #[test]
    fn gaussian_rejects_bad_dt() {
        let mut rng = seed(0).rng();
        assert!(gaussian_increment(0.0, 0.0, 1.0, &mut rng).is_err());
        assert!(gaussian_increment(-1.0, 0.0, 1.0, &mut rng).is_err());
    }

    #[test]
    fn exponential_mean_and_tail() {
        let mut rng = seed(11).rng();
        let n = 1_000_000;
        let mut sum = 0.0;
        for _ in 0..n {
            sum += exponential_sample(1.0, &mut rng).unwrap();
        }
        assert!((sum / n as f64 - 1.0).abs() < 0.003);

        // rate = 2*mu with mu = 0.5 has mean 1.
        let mut sum = 0.0;
        for _ in 0..n {
            sum += exponential_sample(2.0 * 0.5, &mut rng).unwrap();
        }
        assert!((sum / n as f64 - 1.0).abs() < 0.003);

        // Survival P(X > 1) at rate 2 is exp(-2).
        let mut hits = 0usize;
        for _ in 0..n {
            if exponential_sample(2.0, &mut rng).unwrap() > 1.0 {
                hits += 1;
            }
        }
        let p = hits as f64 / n as f64;
        assert!((p - (-2.0f64).exp()).abs() < 0.002, "survival {p}");

        assert!(exponential_sample(0.0, &mut rng).is_err());
    }

    #[test]
    fn stable_symmetry_d1() {
        let mut rng = seed(13).rng();
        let n = 200_000;
        let mut nonpos = 0usize;
        for _ in 0..n {
            let x = isotropic_stable_increment(1.0, 1, 1.0, &mut rng).unwrap()[0];
            if x <= 0.0 {
                nonpos += 1;
            }
        }
        let cdf0 = nonpos as f64 / n as f64;
        assert!((cdf0 - 0.5).abs() < 0.005, "CDF at 0: {cdf0}");
    }

    #[test]
    fn stable_self_similarity_ks() {
        // Increments over dt equal dt^{1/alpha} times increments over 1 in law.
        let alpha = 1.3;
        let dt = 0.37;
        let n = 100_000;
        let mut rng = seed(17).rng();
        let mut a: Vec<f64> = Vec::with_capacity(n);
        let mut b: Vec<f64> = Vec::with_capacity(n);
        for _ in 0..n {
            a.push(isotropic_stable_increment(alpha, 1, dt, &mut rng).unwrap()[0]);
        }
        for _ in 0..n {
            b.push(
                dt.powf(1.0 / alpha) * isotropic_stable_increment(alpha, 1, 1.0, &mut rng).unwrap()[0],
            );
        }
        let (ks, _) = crate::stats::ks_two_sample(&a, &b).unwrap();
        assert!(ks < 0.01, "self-similarity KS {ks}");
    }

    #[test]
    fn stable_cauchy_radial_median() {
        // d=2, alpha=1 increments over dt=1 are isotropic Cauchy. Oracle:
        // invert the radial CDF obtained by quadrature of the known density
        // c/(1+r^2)^{3/2} with c = 1/(2*pi), i.e. solve F(r) = 1/2 where
        // F(r) = int_0^r 2*pi*s*c*(1+s^2)^{-3/2} ds evaluated numerically.
        let density = |r: f64| r * (1.0 + r * r).powf(-1.5);
        let cdf = |r: f64| crate::quad::integrate(&density, 0.0, r, 1e-12).value;
        let mut lo = 0.0;
        let mut hi = 10.0;
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if cdf(mid) < 0.5 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let oracle_median = 0.5 * (lo + hi);

        let mut rng = seed(19).rng();
        let n = 200_000;
        let mut radii: Vec<f64> = (0..n)
            .map(|_| {
                let v = isotropic_stable_increment(1.0, 2, 1.0, &mut rng).unwrap();
                crate::path::norm(&v)
            })
            .collect();
        radii.sort_by(|a, b| a.total_cmp(b));
        let med = radii[n / 2];
        assert!(
            (med - oracle_median).abs() < 0.02 * oracle_median,
            "median {med} vs oracle {oracle_median}"
        );
    }

    #[test]
    fn stable_rejects_bad_alpha() {
        let mut rng = seed(0).rng();
        assert!(isotropic_stable_increment(0.0, 2, 1.0, &mut rng).is_err());
        assert!(isotropic_stable_increment(2.5, 2, 1.0, &mut rng).is_err());
    }

    #[test]
    fn chain_zero_matrix_fixed() {
        let q = vec![vec![0.0, 0.0], vec![0.0, 0.0]];
        let mut rng = seed(23).rng();
        assert_eq!(markov_chain_step(&q, 1, 5.0, &mut rng).unwrap(), 1);
    }

    #[test]
    fn chain_symmetric_occupation() {
        let q = vec![vec![-1.0, 1.0], vec![1.0, -1.0]];
        let mut rng = seed(29).rng();
        let n = 1_000_000;
        let mut in_zero = 0usize;
        for _ in 0..n {
            // dt large relative to the mixing time; the endpoint is close to
            // stationary (1/2, 1/2).
            if markov_chain_step(&q, 0, 8.0, &mut rng).unwrap() == 0 {
                in_zero += 1;
            }
        }
        let p = in_zero as f64 / n as f64;
        assert!((p - 0.5).abs() < 0.005, "occupation {p}");
    }

    #[test]
    fn chain_holding_time_mean() {
        let q = vec![vec![-2.5, 2.5], vec![0.0, 0.0]];
        let mut rng = seed(31).rng();
        let n = 200_000;
        let mut sum = 0.0;
        for _ in 0..n {
            let segs = markov_chain_segments(&q, 0, 1e9, &mut rng).unwrap();
            sum += segs[0].0;
        }
        let mean = sum / n as f64;
        let bound = 3.0 * (1.0 / 2.5) / (n as f64).sqrt();
        assert!((mean - 1.0 / 2.5).abs() < bound, "holding mean {mean}");
    }

    #[test]
    fn chain_rejects_malformed() {
        let q = vec![vec![-1.0, 0.5], vec![1.0, -1.0]];
        let mut rng = seed(0).rng();
        assert!(markov_chain_step(&q, 0, 1.0, &mut rng).is_err());
    }
}
