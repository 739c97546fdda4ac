//! Log-log tail slopes of empirical and theoretical `|X|` survival functions.

use std::cmp::Ordering;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::params::FormAParams;
use crate::stats::ols_slope;

use super::density::abs_survival;

const MIN_SAMPLE: usize = 100;
const THEORY_GRID: usize = 64;

fn check_fraction(fraction: f64) -> Result<()> {
    if !(fraction > 0.0 && fraction < 0.5) {
        return Err(Error::InvalidArgument(format!(
            "tail fraction {fraction} outside (0, 0.5)"
        )));
    }
    Ok(())
}

/// Largest `|x|` order statistics in decreasing order, with their
/// empirical survival levels `i / n`.
fn upper_tail(sample: &[f64], fraction: f64) -> Result<(Vec<f64>, Vec<f64>)> {
    check_fraction(fraction)?;
    let n = sample.len();
    if n < MIN_SAMPLE {
        return Err(Error::InvalidSample(format!(
            "tail slope needs at least {MIN_SAMPLE} observations, got {n}"
        )));
    }
    let k = (fraction * n as f64).floor() as usize;
    if k < 2 {
        return Err(Error::InvalidArgument(format!(
            "tail fraction {fraction} keeps fewer than 2 of {n} points"
        )));
    }
    let mut mags: Vec<f64> = sample.iter().map(|x| x.abs()).collect();
    mags.sort_unstable_by(|a, b| b.partial_cmp(a).unwrap_or(Ordering::Less));
    mags.truncate(k);
    if mags[k - 1] <= 0.0 || !mags[0].is_finite() {
        return Err(Error::InvalidSample(
            "tail contains zero or non-finite magnitudes".into(),
        ));
    }
    let levels = (1..=k).map(|i| i as f64 / n as f64).collect();
    Ok((mags, levels))
}

/// Least-squares slope of `log S_n(x)` against `log x` over the top
/// `fraction` of `|sample|`. For a stable law with `alpha < 2` the
/// population value is `-alpha`.
pub fn tail_slope(sample: &[f64], fraction: f64) -> Result<f64> {
    let (mags, levels) = upper_tail(sample, fraction)?;
    let lx: Vec<f64> = mags.iter().map(|x| x.ln()).collect();
    let ls: Vec<f64> = levels.iter().map(|s| s.ln()).collect();
    Ok(ols_slope(&lx, &ls))
}

/// Tail slope of the law `p`, measured exactly as [`tail_slope`] measures
/// `sample`: the survival function is evaluated on a log-spaced grid over
/// the same order-statistic range, interpolated in log-log coordinates at
/// the sample's order statistics, and regressed the same way.
///
/// Returns the slope and whether every survival evaluation was certified.
pub fn theoretical_tail_slope(p: &FormAParams, sample: &[f64], fraction: f64) -> Result<(f64, bool)> {
    let (mags, _) = upper_tail(sample, fraction)?;
    let (lo, hi) = (mags[mags.len() - 1].ln(), mags[0].ln());
    let grid: Vec<f64> = (0..THEORY_GRID)
        .map(|i| lo + (hi - lo) * i as f64 / (THEORY_GRID - 1) as f64)
        .collect();
    let surv = grid
        .par_iter()
        .map(|&lx| abs_survival(p, lx.exp()))
        .collect::<Result<Vec<_>>>()?;
    let certified = surv.iter().all(|s| s.certified);
    let log_s: Vec<f64> = surv.iter().map(|s| s.value.max(f64::MIN_POSITIVE).ln()).collect();

    let lx: Vec<f64> = mags.iter().map(|x| x.ln()).collect();
    let ls: Vec<f64> = lx
        .iter()
        .map(|&x| {
            if hi == lo {
                return log_s[0];
            }
            let pos = ((x - lo) / (hi - lo) * (THEORY_GRID - 1) as f64).clamp(0.0, (THEORY_GRID - 1) as f64);
            let i = (pos.floor() as usize).min(THEORY_GRID - 2);
            let w = pos - i as f64;
            log_s[i] + w * (log_s[i + 1] - log_s[i])
        })
        .collect();
    Ok((ols_slope(&lx, &ls), certified))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn domain_checks() {
        let xs: Vec<f64> = (1..=200).map(f64::from).collect();
        assert!(tail_slope(&xs, 0.5).is_err());
        assert!(tail_slope(&xs, 0.0).is_err());
        assert!(tail_slope(&xs[..50], 0.1).is_err());
        assert!(tail_slope(&xs, 0.1).is_ok());
    }

    #[test]
    fn exact_pareto_quantiles() {
        // x_(i) = (n/i)^{1/a} has S_n(x_(i)) = i/n exactly.
        let n = 10_000;
        let a = 1.5;
        let xs: Vec<f64> = (1..=n).map(|i| (n as f64 / i as f64).powf(1.0 / a)).collect();
        let s = tail_slope(&xs, 0.05).unwrap();
        assert!((s + a).abs() < 1e-10, "{s}");
    }
}
