//! Sign/log-magnitude estimators of stable-law parameters.
//!
//! For a strictly stable sample the statistics `U = sign Y`, `V = log |Y|`
//! satisfy `E U = theta`, `E V = tau`, `Var U = 1 - theta^2` and
//! `Var V = (pi^2/4)(1 - theta^2) + (pi^2/6)(nu - 1)`, which yields
//! moment estimators of `(nu, theta, tau)`. A general stable sample is first
//! made strictly stable by the triplet transform
//! `Y'_j = Y_{3j-2} - (Y_{3j-1} + Y_{3j}) / 2`, which keeps `alpha`.

use std::f64::consts::{LN_2, PI};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::params::{from_strict, snap_unit, tan_half_pi, theta_bound, EULER_GAMMA};

/// Below this `|tan(pi alpha / 2)|` the skewness back-map is 0/0.
pub const BETA_INDETERMINATE_TAN: f64 = 1e-8;

/// Sample means and unbiased variances of `sign Y` and `log |Y|`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct UvStats {
    pub a_u: f64,
    pub a_v: f64,
    pub b2_u: f64,
    pub b2_v: f64,
    pub n: usize,
}

pub fn uv_stats(sample: &[f64]) -> Result<UvStats> {
    let n = sample.len();
    if n < 2 {
        return Err(Error::InvalidSample(format!(
            "need at least 2 observations, got {n}"
        )));
    }
    if let Some(i) = sample.iter().position(|&y| y == 0.0 || !y.is_finite()) {
        return Err(Error::InvalidSample(format!(
            "observation {i} is {} (must be finite and nonzero)",
            sample[i]
        )));
    }
    let positive = sample.iter().filter(|&&y| y > 0.0).count();
    let negative = n - positive;
    let nf = n as f64;
    let a_u = (positive as f64 - negative as f64) / nf;
    // Signs are +-1, so the variance only depends on the two counts.
    let b2_u = 4.0 * positive as f64 * negative as f64 / (nf * (nf - 1.0));

    let logs: Vec<f64> = sample.iter().map(|y| y.abs().ln()).collect();
    let a_v = logs.iter().sum::<f64>() / nf;
    let b2_v = logs.iter().map(|v| (v - a_v) * (v - a_v)).sum::<f64>() / (nf - 1.0);
    Ok(UvStats {
        a_u,
        a_v,
        b2_u,
        b2_v,
        n,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StrictEstimate {
    pub nu_hat: f64,
    pub nu_tilde: f64,
    pub theta_tilde: f64,
    pub tau_tilde: f64,
    /// `nu_tilde` was raised to the admissible floor.
    pub clamped: bool,
}

impl StrictEstimate {
    pub fn from_stats(st: &UvStats) -> Self {
        let nu_hat = 6.0 / (PI * PI) * st.b2_v - 1.5 * st.b2_u + 1.0;
        let theta_tilde = st.a_u;
        let floor = (1.0 + theta_tilde.abs()).powi(2) / 4.0;
        let (nu_tilde, clamped) = if nu_hat < floor {
            (floor, true)
        } else {
            (nu_hat, false)
        };
        StrictEstimate {
            nu_hat,
            nu_tilde,
            theta_tilde,
            tau_tilde: st.a_v,
            clamped,
        }
    }
}

/// Estimate `(nu, theta, tau)` from a strictly stable sample.
pub fn estimate_strict(sample: &[f64]) -> Result<StrictEstimate> {
    Ok(StrictEstimate::from_stats(&uv_stats(sample)?))
}

/// Disjoint-triplet transform; 1–2 trailing observations are discarded.
pub fn triplet_transform(sample: &[f64]) -> Result<Vec<f64>> {
    if sample.len() < 3 {
        return Err(Error::InvalidSample(format!(
            "triplet transform needs at least 3 observations, got {}",
            sample.len()
        )));
    }
    Ok(sample
        .chunks_exact(3)
        .map(|t| t[0] - (t[1] + t[2]) / 2.0)
        .collect())
}

/// Estimates for a general (not necessarily strictly) stable sample.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GeneralEstimate {
    pub alpha_tilde: f64,
    pub beta_tilde: f64,
    pub lambda_tilde: f64,
    /// Raw estimates on the transformed sample.
    pub strict: StrictEstimate,
    pub nu_star: f64,
    pub theta_star: f64,
    pub tau_star: f64,
    /// `theta_star` was cut back to the transform's attainable range.
    pub theta_clamped: bool,
    /// `alpha_tilde` is so close to 2 that `beta_tilde` carries no information.
    pub beta_indeterminate: bool,
    pub n: usize,
    /// Transformed points actually used.
    pub m: usize,
    pub dropped_zeros: usize,
}

impl GeneralEstimate {
    /// Either clamp fired.
    pub fn any_clamp(&self) -> bool {
        self.strict.clamped || self.theta_clamped
    }
}

pub fn estimate_general(sample: &[f64]) -> Result<GeneralEstimate> {
    if sample.len() < 6 {
        return Err(Error::InvalidSample(format!(
            "general estimation needs at least 6 observations, got {}",
            sample.len()
        )));
    }
    let mut y = triplet_transform(sample)?;
    let before = y.len();
    y.retain(|&v| v != 0.0);
    let dropped_zeros = before - y.len();
    if y.len() < 2 {
        return Err(Error::InvalidSample(format!(
            "only {} nonzero transformed values remain",
            y.len()
        )));
    }
    let strict = estimate_strict(&y)?;

    let nu_star = snap_unit(strict.nu_tilde);
    let bound = theta_bound(nu_star)?;
    let theta_abs = strict.theta_tilde.abs();
    let theta_clamped = theta_abs > bound;
    let theta_star = theta_abs.min(bound).copysign(strict.theta_tilde);
    let tau_star = strict.tau_tilde;

    let alpha = 1.0 / nu_star.sqrt();
    let mut beta_indeterminate = false;
    let (beta, lambda) = if nu_star == 1.0 {
        let half = PI * theta_star / 2.0;
        (-PI / LN_2 * half.tan(), 0.5 * tau_star.exp() * half.cos())
    } else {
        let r = (1.0 - alpha).exp2();
        let phi = PI * theta_star * alpha / 2.0;
        let t = tan_half_pi(alpha);
        let beta = if t.abs() < BETA_INDETERMINATE_TAN {
            beta_indeterminate = true;
            0.0
        } else {
            (1.0 + r) / (1.0 - r) * phi.tan() / t
        };
        let lambda = phi.cos() / (1.0 + r) * (tau_star * alpha + EULER_GAMMA * (alpha - 1.0)).exp();
        (beta, lambda)
    };

    Ok(GeneralEstimate {
        alpha_tilde: alpha,
        // Rounding can push |beta| a hair past 1 when theta sits on the bound.
        beta_tilde: beta.clamp(-1.0, 1.0),
        lambda_tilde: lambda,
        strict,
        nu_star,
        theta_star,
        tau_star,
        theta_clamped,
        beta_indeterminate,
        n: sample.len(),
        m: y.len(),
        dropped_zeros,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EstimateMode {
    Strict,
    General,
}

/// Flat, serializable view of either estimator's output.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EstimateReport {
    pub mode: EstimateMode,
    pub alpha_tilde: Option<f64>,
    pub beta_tilde: Option<f64>,
    pub lambda_tilde: Option<f64>,
    pub nu_hat: f64,
    pub nu_tilde: f64,
    pub theta_tilde: f64,
    pub tau_tilde: f64,
    pub nu_star: Option<f64>,
    pub theta_star: Option<f64>,
    pub tau_star: Option<f64>,
    pub n: usize,
    pub m: usize,
    pub dropped_zeros: usize,
    pub clamped_nu: bool,
    pub clamped_theta: bool,
    pub beta_indeterminate: bool,
}

impl EstimateReport {
    /// Report for a sample assumed strictly stable. `(alpha, beta, lambda)`
    /// are filled in whenever the estimate maps back to a proper law.
    pub fn strict(est: &StrictEstimate, n: usize) -> Self {
        let s = crate::params::StrictParams {
            nu: snap_unit(est.nu_tilde),
            theta: est.theta_tilde,
            tau: est.tau_tilde,
        };
        let back = from_strict(&s).ok();
        EstimateReport {
            mode: EstimateMode::Strict,
            alpha_tilde: back.map(|p| p.alpha),
            beta_tilde: back.map(|p| p.beta),
            lambda_tilde: back.map(|p| p.lambda),
            nu_hat: est.nu_hat,
            nu_tilde: est.nu_tilde,
            theta_tilde: est.theta_tilde,
            tau_tilde: est.tau_tilde,
            nu_star: None,
            theta_star: None,
            tau_star: None,
            n,
            m: n,
            dropped_zeros: 0,
            clamped_nu: est.clamped,
            clamped_theta: false,
            beta_indeterminate: false,
        }
    }

    pub fn general(est: &GeneralEstimate) -> Self {
        EstimateReport {
            mode: EstimateMode::General,
            alpha_tilde: Some(est.alpha_tilde),
            beta_tilde: Some(est.beta_tilde),
            lambda_tilde: Some(est.lambda_tilde),
            nu_hat: est.strict.nu_hat,
            nu_tilde: est.strict.nu_tilde,
            theta_tilde: est.strict.theta_tilde,
            tau_tilde: est.strict.tau_tilde,
            nu_star: Some(est.nu_star),
            theta_star: Some(est.theta_star),
            tau_star: Some(est.tau_star),
            n: est.n,
            m: est.m,
            dropped_zeros: est.dropped_zeros,
            clamped_nu: est.strict.clamped,
            clamped_theta: est.theta_clamped,
            beta_indeterminate: est.beta_indeterminate,
        }
    }
}
