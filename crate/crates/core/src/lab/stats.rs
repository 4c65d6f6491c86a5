//! Order statistics, two-sample tests and log-log fits.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::rng::{unit_open, Role, SeedStream};

/// Default number of equal-law rounds behind a null threshold.
pub const CALIBRATION_ROUNDS: usize = 200;
/// Default level of the null threshold (a quantile of the null statistic).
pub const CALIBRATION_LEVEL: f64 = 0.99;

const CALIBRATION_ROLE: u64 = 0x6361_6c69;

fn sorted(xs: &[f64]) -> Vec<f64> {
    let mut v = xs.to_vec();
    v.sort_by(f64::total_cmp);
    v
}

/// Linearly interpolated quantile of sorted data.
pub fn quantile_sorted(sorted: &[f64], q: f64) -> f64 {
    assert!(!sorted.is_empty(), "quantile of an empty sample");
    let pos = q.clamp(0.0, 1.0) * (sorted.len() - 1) as f64;
    let i = pos.floor() as usize;
    let frac = pos - i as f64;
    if i + 1 < sorted.len() {
        sorted[i] + frac * (sorted[i + 1] - sorted[i])
    } else {
        sorted[i]
    }
}

pub fn quantile(xs: &[f64], q: f64) -> f64 {
    quantile_sorted(&sorted(xs), q)
}

pub fn median(xs: &[f64]) -> f64 {
    quantile(xs, 0.5)
}

/// Interquartile range.
pub fn iqr(xs: &[f64]) -> f64 {
    let s = sorted(xs);
    quantile_sorted(&s, 0.75) - quantile_sorted(&s, 0.25)
}

/// Two-sample Kolmogorov-Smirnov statistic `sup |F_a - F_b|`. Ties are
/// stepped over together.
pub fn ks_two_sample(a: &[f64], b: &[f64]) -> f64 {
    if a.is_empty() || b.is_empty() {
        return 0.0;
    }
    let (a, b) = (sorted(a), sorted(b));
    let (na, nb) = (a.len() as f64, b.len() as f64);
    let (mut i, mut j) = (0, 0);
    let mut d: f64 = 0.0;
    while i < a.len() && j < b.len() {
        let x = a[i].min(b[j]);
        while i < a.len() && a[i] <= x {
            i += 1;
        }
        while j < b.len() && b[j] <= x {
            j += 1;
        }
        d = d.max((i as f64 / na - j as f64 / nb).abs());
    }
    d
}

/// Null threshold of the two-sample statistic for samples of sizes `n1`, `n2`.
/// Under equal continuous laws the statistic does not depend on the law, so
/// uniform samples calibrate it; atoms only make the statistic smaller.
pub fn ks_null_threshold(n1: usize, n2: usize, rounds: usize, level: f64, seed: u64) -> f64 {
    let stream = SeedStream::new(seed, 0, Role::Auxiliary(CALIBRATION_ROLE));
    let stats: Vec<f64> = (0..rounds as u64)
        .into_par_iter()
        .map(|r| {
            let mut rng = stream.rng(r);
            let a: Vec<f64> = (0..n1).map(|_| unit_open(&mut rng)).collect();
            let b: Vec<f64> = (0..n2).map(|_| unit_open(&mut rng)).collect();
            ks_two_sample(&a, &b)
        })
        .collect();
    quantile(&stats, level)
}

/// Outcome of a two-sample test.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct KsReport {
    pub n_left: usize,
    pub n_right: usize,
    pub statistic: f64,
    pub threshold: f64,
    /// `statistic <= threshold`.
    pub verdict: bool,
    pub seed: u64,
}

impl KsReport {
    pub fn new(n_left: usize, n_right: usize, statistic: f64, threshold: f64, seed: u64) -> Self {
        KsReport { n_left, n_right, statistic, threshold, verdict: statistic <= threshold, seed }
    }
}

/// Two-sample KS test against the uniform-calibrated null threshold.
pub fn ks_test(a: &[f64], b: &[f64], seed: u64) -> KsReport {
    let d = ks_two_sample(a, b);
    let threshold = ks_null_threshold(a.len(), b.len(), CALIBRATION_ROUNDS, CALIBRATION_LEVEL, seed);
    KsReport::new(a.len(), b.len(), d, threshold, seed)
}

/// Bivariate two-sample statistic: the largest difference of quadrant
/// frequencies over quadrants centred at every sample point.
pub fn ks_2d(a: &[(f64, f64)], b: &[(f64, f64)]) -> f64 {
    if a.is_empty() || b.is_empty() {
        return 0.0;
    }
    let (na, nb) = (a.len() as f64, b.len() as f64);
    let quadrants = |o: (f64, f64), s: &[(f64, f64)]| {
        let mut q = [0usize; 4];
        for &(x, y) in s {
            q[usize::from(x > o.0) * 2 + usize::from(y > o.1)] += 1;
        }
        q
    };
    a.par_iter()
        .chain(b.par_iter())
        .map(|&o| {
            let qa = quadrants(o, a);
            let qb = quadrants(o, b);
            (0..4).map(|k| (qa[k] as f64 / na - qb[k] as f64 / nb).abs()).fold(0.0, f64::max)
        })
        .reduce(|| 0.0, f64::max)
}

/// Bivariate test calibrated by random relabelling of the pooled sample.
pub fn ks_2d_test(a: &[(f64, f64)], b: &[(f64, f64)], rounds: usize, seed: u64) -> KsReport {
    let d = ks_2d(a, b);
    let pooled: Vec<(f64, f64)> = a.iter().chain(b).copied().collect();
    let stream = SeedStream::new(seed, 1, Role::Auxiliary(CALIBRATION_ROLE));
    let null: Vec<f64> = (0..rounds as u64)
        .map(|r| {
            let mut rng = stream.rng(r);
            let mut p = pooled.clone();
            for i in (1..p.len()).rev() {
                let j = (unit_open(&mut rng) * (i + 1) as f64) as usize;
                p.swap(i, j.min(i));
            }
            let (x, y) = p.split_at(a.len());
            ks_2d(x, y)
        })
        .collect();
    KsReport::new(a.len(), b.len(), d, quantile(&null, CALIBRATION_LEVEL), seed)
}

/// Least squares line `y = intercept + slope x` and the RMS residual.
pub fn least_squares(x: &[f64], y: &[f64]) -> Result<(f64, f64, f64)> {
    if x.len() != y.len() || x.len() < 2 {
        return invalid("least squares needs two or more paired points");
    }
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxx: f64 = x.iter().map(|a| (a - mx).powi(2)).sum();
    if sxx == 0.0 {
        return Err(Error::Precondition("abscissae are all equal".into()));
    }
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let rss: f64 = x.iter().zip(y).map(|(a, b)| (b - intercept - slope * a).powi(2)).sum();
    Ok((slope, intercept, (rss / n).sqrt()))
}
