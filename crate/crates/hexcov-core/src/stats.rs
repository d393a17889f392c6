//! Small statistical helpers shared by the estimators and the
//! validation checks.

use alloc::vec::Vec;

use libm::sqrt;

/// Two-sided 95% normal quantile.
pub const Z_95: f64 = 1.959_963_984_540_054;

/// Wilson score interval for a binomial proportion.
///
/// Returns `(lo, hi)`; well-behaved at small counts, including zero
/// successes (upper bound `z^2/(n + z^2)` when `successes = 0`).
pub fn wilson_interval(successes: u64, n: u64, z: f64) -> (f64, f64) {
    if n == 0 {
        return (0.0, 1.0);
    }
    let nf = n as f64;
    let p = successes as f64 / nf;
    let z2 = z * z;
    let denom = 1.0 + z2 / nf;
    let center = (p + z2 / (2.0 * nf)) / denom;
    let half = z / denom * sqrt(p * (1.0 - p) / nf + z2 / (4.0 * nf * nf));
    // At the boundary counts the exact endpoints are 0 and 1; avoid
    // rounding residue from the sqrt.
    let lo = if successes == 0 { 0.0 } else { (center - half).max(0.0) };
    let hi = if successes == n { 1.0 } else { (center + half).min(1.0) };
    (lo, hi)
}

/// Kolmogorov-Smirnov statistic of `samples` against the distribution
/// with the given CDF. Sorts the sample buffer in place.
pub fn ks_statistic(samples: &mut [f64], cdf: impl Fn(f64) -> f64) -> f64 {
    debug_assert!(!samples.is_empty());
    samples.sort_unstable_by(|a, b| a.partial_cmp(b).expect("NaN sample"));
    let n = samples.len() as f64;
    let mut d = 0.0f64;
    for (i, &x) in samples.iter().enumerate() {
        let f = cdf(x);
        let lo = i as f64 / n;
        let hi = (i + 1) as f64 / n;
        d = d.max((f - lo).abs()).max((hi - f).abs());
    }
    d
}

/// Ordinary least squares fit `y = intercept + slope * x`.
///
/// Returns `(slope, intercept, r_squared)`. Needs at least two distinct
/// abscissae.
pub fn ols(points: &[(f64, f64)]) -> Option<(f64, f64, f64)> {
    let n = points.len() as f64;
    if points.len() < 2 {
        return None;
    }
    let mx = points.iter().map(|p| p.0).sum::<f64>() / n;
    let my = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = points.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let syy: f64 = points.iter().map(|p| (p.1 - my) * (p.1 - my)).sum();
    if sxx == 0.0 {
        return None;
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let r2 = if syy == 0.0 { 1.0 } else { (sxy * sxy) / (sxx * syy) };
    Some((slope, intercept, r2))
}

/// Empirical CCDF counts on an increasing threshold grid, kept as plain
/// exceedance counters so partial results merge by addition.
#[derive(Debug, Clone)]
pub struct TailCounts {
    pub thresholds: Vec<f64>,
    pub exceed: Vec<u64>,
    pub n: u64,
}

impl TailCounts {
    pub fn new(thresholds: Vec<f64>) -> Self {
        let k = thresholds.len();
        debug_assert!(thresholds.windows(2).all(|w| w[0] < w[1]), "grid must be increasing");
        TailCounts { thresholds, exceed: alloc::vec![0; k], n: 0 }
    }

    #[inline]
    pub fn record(&mut self, value: f64) {
        self.n += 1;
        // Thresholds are increasing: count all strictly below `value`.
        let k = self.thresholds.partition_point(|&t| t < value);
        for e in &mut self.exceed[..k] {
            *e += 1;
        }
    }

    pub fn merge(&mut self, other: &TailCounts) {
        debug_assert_eq!(self.thresholds, other.thresholds);
        self.n += other.n;
        for (a, b) in self.exceed.iter_mut().zip(&other.exceed) {
            *a += b;
        }
    }
}
