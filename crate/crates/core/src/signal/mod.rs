//! Extrema-increment analysis of uniformly sampled signals.
//!
//! A dependent series is thinned to its alternating local maxima and minima;
//! the differences between successive extrema form an approximately
//! independent heavy-tailed sample which is fitted with a stable law and
//! compared against it through a histogram and the `|x|` tail slope.

mod density;
mod tail;

pub use density::{abs_survival, stable_pdf, PdfValue};
pub use tail::{tail_slope, theoretical_tail_slope};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::estimator::{estimate_general, GeneralEstimate};
use crate::params::FormAParams;
use crate::stats::{histogram_density, quantile_sorted, sorted};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SignalSeries {
    pub values: Vec<f64>,
    /// Sampling interval in seconds.
    pub dt: f64,
    /// Time of `values[0]` in seconds.
    pub t0: f64,
    pub channel: String,
}

impl SignalSeries {
    pub fn new(values: Vec<f64>, dt: f64, t0: f64, channel: impl Into<String>) -> Result<Self> {
        if !(dt > 0.0 && dt.is_finite()) {
            return Err(Error::InvalidArgument(format!("sampling interval {dt} must be positive")));
        }
        if !t0.is_finite() {
            return Err(Error::InvalidArgument("start time must be finite".into()));
        }
        Ok(SignalSeries {
            values,
            dt,
            t0,
            channel: channel.into(),
        })
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn time(&self, i: usize) -> f64 {
        self.t0 + i as f64 * self.dt
    }

    /// The samples with `start <= t <= end`.
    pub fn window(&self, start: f64, end: f64) -> Result<SignalSeries> {
        let keep: Vec<usize> = (0..self.len())
            .filter(|&i| {
                let t = self.time(i);
                t >= start && t <= end
            })
            .collect();
        let (Some(&first), Some(&last)) = (keep.first(), keep.last()) else {
            return Err(Error::InvalidArgument(format!(
                "window [{start}, {end}] contains no samples"
            )));
        };
        Ok(SignalSeries {
            values: self.values[first..=last].to_vec(),
            dt: self.dt,
            t0: self.time(first),
            channel: self.channel.clone(),
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FluxConstants {
    pub c_light: f64,
    /// Magnetic field, tesla.
    pub b_field: f64,
    /// Poloidal probe separation, radians.
    pub delta_theta: f64,
    /// Mean magnetic-surface radius.
    pub r_mean: f64,
}

impl FluxConstants {
    pub fn check(&self) -> Result<()> {
        let fields = [
            ("c_light", self.c_light),
            ("b_field", self.b_field),
            ("delta_theta", self.delta_theta),
            ("r_mean", self.r_mean),
        ];
        for (name, v) in fields {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::InvalidArgument(format!("{name} = {v} must be positive")));
            }
        }
        Ok(())
    }
}

/// Radial fluctuation flux `dn * (c/B) * (phi1 - phi2) / (delta_theta * r)`.
pub fn compose_flux(
    dn: &SignalSeries,
    phi1: &SignalSeries,
    phi2: &SignalSeries,
    k: &FluxConstants,
) -> Result<SignalSeries> {
    k.check()?;
    for other in [phi1, phi2] {
        if other.len() != dn.len() || other.dt != dn.dt || other.t0 != dn.t0 {
            return Err(Error::InvalidArgument(format!(
                "channel '{}' does not share the geometry of '{}'",
                other.channel, dn.channel
            )));
        }
    }
    let drift = k.c_light / k.b_field;
    let field = k.delta_theta * k.r_mean;
    let values = dn
        .values
        .iter()
        .zip(phi1.values.iter().zip(&phi2.values))
        .map(|(n, (a, b))| n * (a - b) * drift / field)
        .collect();
    Ok(SignalSeries {
        values,
        dt: dn.dt,
        t0: dn.t0,
        channel: "flux".into(),
    })
}

/// Interior local extrema as `(index, value)`, strictly alternating between
/// maxima and minima. A plateau counts once, at its first index; plateaus
/// touching either end of the series are not extrema.
pub fn extract_extrema(s: &SignalSeries) -> Vec<(usize, f64)> {
    // Collapse runs of equal values to (first index, value).
    let mut runs: Vec<(usize, f64)> = Vec::new();
    for (i, &v) in s.values.iter().enumerate() {
        if runs.last().map_or(true, |&(_, last)| last != v) {
            runs.push((i, v));
        }
    }
    runs.windows(3)
        .filter(|w| {
            let (a, b, c) = (w[0].1, w[1].1, w[2].1);
            (b > a && b > c) || (b < a && b < c)
        })
        .map(|w| w[1])
        .collect()
}

/// Differences between successive extrema values.
pub fn extrema_increments(ext: &[(usize, f64)]) -> Result<Vec<f64>> {
    if ext.len() < 2 {
        return Err(Error::InvalidSample(format!(
            "need at least 2 extrema, got {}",
            ext.len()
        )));
    }
    Ok(ext.windows(2).map(|w| w[1].1 - w[0].1).collect())
}

/// A series whose extrema increments are exactly `increments`, provided
/// they alternate in sign: extrema are joined by one midpoint sample each.
pub fn series_from_increments(increments: &[f64], dt: f64, t0: f64) -> Result<SignalSeries> {
    let mut values = Vec::with_capacity(2 * increments.len() + 3);
    let mut level = 0.0;
    // A leading ramp makes the first increment's start an interior extremum.
    if let Some(&d0) = increments.first() {
        values.push(level + d0);
        values.push(level + d0 / 2.0);
    }
    values.push(level);
    for &d in increments {
        let next = level + d;
        values.push(level + d / 2.0);
        values.push(next);
        level = next;
    }
    if let Some(&dl) = increments.last() {
        values.push(level - dl / 2.0);
    }
    SignalSeries::new(values, dt, t0, "synthetic")
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AnalyzeConfig {
    pub bins: usize,
    /// Optional `[start, end]` time window in seconds.
    pub window: Option<(f64, f64)>,
    pub tail_fraction: f64,
    /// Histogram range as a pair of quantile levels of the increments.
    pub quantile_range: (f64, f64),
}

impl Default for AnalyzeConfig {
    fn default() -> Self {
        AnalyzeConfig {
            bins: 60,
            window: None,
            tail_fraction: 0.05,
            quantile_range: (0.001, 0.999),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DensityComparison {
    /// `(bin center, empirical density)`.
    pub histogram: Vec<(f64, f64)>,
    pub bin_width: f64,
    pub fitted: GeneralEstimate,
    pub fitted_law: FormAParams,
    /// `(bin center, fitted stable density)`.
    pub theoretical: Vec<(f64, f64)>,
    pub tail_slope_empirical: f64,
    pub tail_slope_theoretical: f64,
    pub increments: usize,
    /// Every theoretical value lies in the certified accuracy region.
    pub certified: bool,
}

pub fn analyze(s: &SignalSeries, cfg: &AnalyzeConfig) -> Result<DensityComparison> {
    if cfg.bins == 0 {
        return Err(Error::InvalidArgument("bin count must be positive".into()));
    }
    let (ql, qh) = cfg.quantile_range;
    if !(0.0 <= ql && ql < qh && qh <= 1.0) {
        return Err(Error::InvalidArgument(format!(
            "quantile range ({ql}, {qh}) is not increasing within [0, 1]"
        )));
    }
    let windowed;
    let series = match cfg.window {
        Some((a, b)) => {
            windowed = s.window(a, b)?;
            &windowed
        }
        None => s,
    };
    if series.len() < 3 {
        return Err(Error::InvalidSample(format!(
            "series of {} samples is too short for extrema",
            series.len()
        )));
    }
    let inc = extrema_increments(&extract_extrema(series))?;
    let fitted = estimate_general(&inc)?;
    let law = FormAParams {
        alpha: fitted.alpha_tilde,
        beta: fitted.beta_tilde,
        gamma: 0.0,
        lambda: fitted.lambda_tilde,
    };

    let ordered = sorted(&inc);
    let (lo, hi) = (quantile_sorted(&ordered, ql), quantile_sorted(&ordered, qh));
    let histogram = histogram_density(&inc, lo, hi, cfg.bins)?;
    let pdf = histogram
        .par_iter()
        .map(|&(x, _)| stable_pdf(&law, x).map(|v| (x, v)))
        .collect::<Result<Vec<_>>>()?;
    let certified_pdf = pdf.iter().all(|(_, v)| v.certified);
    let theoretical = pdf.into_iter().map(|(x, v)| (x, v.value)).collect();

    let tail_slope_empirical = tail_slope(&inc, cfg.tail_fraction)?;
    let (tail_slope_theoretical, certified_tail) =
        theoretical_tail_slope(&law, &inc, cfg.tail_fraction)?;

    Ok(DensityComparison {
        histogram,
        bin_width: (hi - lo) / cfg.bins as f64,
        fitted,
        fitted_law: law,
        theoretical,
        tail_slope_empirical,
        tail_slope_theoretical,
        increments: inc.len(),
        certified: certified_pdf && certified_tail,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn series(v: &[f64]) -> SignalSeries {
        SignalSeries::new(v.to_vec(), 1.0, 0.0, "x").unwrap()
    }

    #[test]
    fn flux_examples() {
        let k = FluxConstants {
            c_light: 1.0,
            b_field: 1.0,
            delta_theta: 1.0,
            r_mean: 1.0,
        };
        let f = compose_flux(&series(&[2.0]), &series(&[3.0]), &series(&[1.0]), &k).unwrap();
        assert_eq!(f.values, vec![4.0]);
        let same = compose_flux(&series(&[1.0; 4]), &series(&[0.3; 4]), &series(&[0.3; 4]), &k).unwrap();
        assert!(same.values.iter().all(|&v| v == 0.0));
        assert!(compose_flux(&series(&[1.0; 3]), &series(&[1.0; 2]), &series(&[1.0; 3]), &k).is_err());
        let bad = FluxConstants { r_mean: 0.0, ..k };
        assert!(compose_flux(&series(&[1.0]), &series(&[1.0]), &series(&[1.0]), &bad).is_err());
    }

    #[test]
    fn extrema_examples() {
        assert_eq!(extract_extrema(&series(&[1.0, 3.0, 2.0])), vec![(1, 3.0)]);
        assert!(extract_extrema(&series(&[1.0, 2.0, 3.0, 4.0])).is_empty());
        assert_eq!(extract_extrema(&series(&[1.0, 2.0, 2.0, 1.0])), vec![(1, 2.0)]);
        // Plateaus at the ends are not extrema.
        assert!(extract_extrema(&series(&[2.0, 2.0, 1.0, 1.0])).is_empty());
    }

    #[test]
    fn increments_examples() {
        let inc = extrema_increments(&[(1, 3.0), (4, 1.0), (7, 5.0)]).unwrap();
        assert_eq!(inc, vec![-2.0, 4.0]);
        assert_eq!(extrema_increments(&[(0, 1.0), (2, 0.0)]).unwrap().len(), 1);
        assert!(extrema_increments(&[(0, 1.0)]).is_err());
    }

    #[test]
    fn synthetic_series_roundtrip() {
        let d = [1.5, -0.25, 3.0, -2.0, 0.5];
        let s = series_from_increments(&d, 1e-6, 0.0).unwrap();
        let got = extrema_increments(&extract_extrema(&s)).unwrap();
        assert_eq!(got, d);
    }

    #[test]
    fn window_selection() {
        let s = SignalSeries::new((0..10).map(f64::from).collect(), 0.5, 1.0, "x").unwrap();
        let w = s.window(2.0, 3.0).unwrap();
        assert_eq!(w.values, vec![2.0, 3.0, 4.0]);
        assert_eq!(w.t0, 2.0);
        assert!(s.window(100.0, 200.0).is_err());
        assert_eq!(s.window(-1.0, 100.0).unwrap(), s);
    }
}
