//! Small descriptive-statistics helpers shared by the estimator, the signal
//! pipeline and the Monte Carlo harness.

use std::cmp::Ordering;

use crate::error::{Error, Result};

pub fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

/// Unbiased (`n - 1` denominator) sample variance, two-pass.
pub fn sample_variance(xs: &[f64]) -> f64 {
    let m = mean(xs);
    xs.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / (xs.len() - 1) as f64
}

/// Sorted copy; NaNs sort last.
pub fn sorted(xs: &[f64]) -> Vec<f64> {
    let mut v = xs.to_vec();
    v.sort_by(|a, b| a.partial_cmp(b).unwrap_or(Ordering::Greater));
    v
}

/// Linear-interpolation quantile of already sorted data (Hyndman–Fan type 7).
pub fn quantile_sorted(sorted: &[f64], q: f64) -> f64 {
    let n = sorted.len();
    if n == 1 {
        return sorted[0];
    }
    let h = (n - 1) as f64 * q.clamp(0.0, 1.0);
    let lo = h.floor() as usize;
    let hi = (lo + 1).min(n - 1);
    sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo])
}

/// Empirical central moment `mean((x - xbar)^k)` and its standard error.
///
/// The standard error treats the centering as known, which is accurate to
/// `O(1/n)` and is what Monte Carlo comparisons need.
pub fn central_moment_with_se(xs: &[f64], k: i32) -> (f64, f64) {
    let m = mean(xs);
    let n = xs.len() as f64;
    let (mut s1, mut s2) = (0.0, 0.0);
    for x in xs {
        let d = (x - m).powi(k);
        s1 += d;
        s2 += d * d;
    }
    let est = s1 / n;
    let var = (s2 / n - est * est).max(0.0);
    (est, (var / n).sqrt())
}

/// One-sample Kolmogorov–Smirnov distance `sup |F_n - F|`.
pub fn ks_one_sample<F: Fn(f64) -> f64>(xs: &[f64], cdf: F) -> f64 {
    let xs = sorted(xs);
    let n = xs.len() as f64;
    xs.iter().enumerate().fold(0.0_f64, |acc, (i, &x)| {
        let f = cdf(x);
        let above = (i as f64 + 1.0) / n - f;
        let below = f - i as f64 / n;
        acc.max(above).max(below)
    })
}

/// Two-sample Kolmogorov–Smirnov distance.
pub fn ks_two_sample(xs: &[f64], ys: &[f64]) -> f64 {
    let xs = sorted(xs);
    let ys = sorted(ys);
    let (nx, ny) = (xs.len() as f64, ys.len() as f64);
    let (mut i, mut j) = (0usize, 0usize);
    let mut d = 0.0_f64;
    while i < xs.len() && j < ys.len() {
        let t = xs[i].min(ys[j]);
        while i < xs.len() && xs[i] <= t {
            i += 1;
        }
        while j < ys.len() && ys[j] <= t {
            j += 1;
        }
        d = d.max((i as f64 / nx - j as f64 / ny).abs());
    }
    d
}

/// Asymptotic two-sided 1% critical value of the one-sample KS distance.
pub fn ks_critical_1pct(n: usize) -> f64 {
    1.63 / (n as f64).sqrt()
}

/// Asymptotic 1% critical value of the two-sample KS distance.
pub fn ks_two_sample_critical_1pct(n: usize, m: usize) -> f64 {
    let (n, m) = (n as f64, m as f64);
    1.63 * ((n + m) / (n * m)).sqrt()
}

/// Equal-width histogram over `[lo, hi]`, normalized to a density over the
/// observations that fall inside the range. Returns `(center, density)` pairs.
pub fn histogram_density(xs: &[f64], lo: f64, hi: f64, bins: usize) -> Result<Vec<(f64, f64)>> {
    if bins == 0 {
        return Err(Error::InvalidArgument("bin count must be positive".into()));
    }
    if !(hi > lo) {
        return Err(Error::InvalidArgument(format!(
            "histogram range [{lo}, {hi}] is empty"
        )));
    }
    let width = (hi - lo) / bins as f64;
    let mut counts = vec![0usize; bins];
    let mut inside = 0usize;
    for &x in xs {
        if x < lo || x > hi {
            continue;
        }
        let b = (((x - lo) / width) as usize).min(bins - 1);
        counts[b] += 1;
        inside += 1;
    }
    if inside == 0 {
        return Err(Error::InvalidSample("no observations inside histogram range".into()));
    }
    Ok(counts
        .iter()
        .enumerate()
        .map(|(b, &c)| {
            let center = lo + (b as f64 + 0.5) * width;
            (center, c as f64 / (inside as f64 * width))
        })
        .collect())
}

/// Ordinary least-squares slope of `y` on `x`.
pub fn ols_slope(x: &[f64], y: &[f64]) -> f64 {
    let mx = mean(x);
    let my = mean(y);
    let (mut sxy, mut sxx) = (0.0, 0.0);
    for (a, b) in x.iter().zip(y) {
        sxy += (a - mx) * (b - my);
        sxx += (a - mx) * (a - mx);
    }
    sxy / sxx
}
