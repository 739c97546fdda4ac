//! Stable-law parameterizations.
//!
//! Form A has characteristic function
//!
//! ```text
//! alpha != 1:  exp{ lambda (i k gamma - |k|^alpha + i |k|^alpha beta tan(pi alpha / 2) sign k) }
//! alpha == 1:  exp{ lambda (i k gamma - |k| - i k beta (2/pi) log |k|) }
//! ```
//!
//! and the strictly-stable form is
//!
//! ```text
//! exp{ -exp{ nu^{-1/2} (log |k| + tau - i (pi/2) theta sign k) + C (nu^{-1/2} - 1) } }
//! ```
//!
//! with `C` the Euler constant. `E log |X| = tau` and `E sign X = theta`.

use std::f64::consts::{LN_2, PI};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Euler–Mascheroni constant.
pub const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

/// Exponents (and `nu` values) closer than this to 1 take the `alpha == 1` branch.
pub const UNIT_SNAP: f64 = 1e-9;

/// Slack allowed on the strictly-stable `theta` domain to absorb rounding.
const THETA_SLACK: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FormAParams {
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
    pub lambda: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StrictParams {
    pub nu: f64,
    pub theta: f64,
    pub tau: f64,
}

/// A violated form-A box constraint.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Violation {
    Alpha,
    Beta,
    Gamma,
    Lambda,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            Violation::Alpha => "alpha must lie in (0, 2]",
            Violation::Beta => "beta must lie in [-1, 1]",
            Violation::Gamma => "gamma must be finite",
            Violation::Lambda => "lambda must be positive and finite",
        };
        f.write_str(name)
    }
}

/// Returns every violated constraint; empty iff `p` is admissible.
pub fn validate_form_a(p: &FormAParams) -> Vec<Violation> {
    let mut out = Vec::new();
    if !(p.alpha > 0.0 && p.alpha <= 2.0) {
        out.push(Violation::Alpha);
    }
    if !(-1.0..=1.0).contains(&p.beta) {
        out.push(Violation::Beta);
    }
    if !p.gamma.is_finite() {
        out.push(Violation::Gamma);
    }
    if !(p.lambda > 0.0 && p.lambda.is_finite()) {
        out.push(Violation::Lambda);
    }
    out
}

/// Snaps values within [`UNIT_SNAP`] of 1 to exactly 1.
pub fn snap_unit(x: f64) -> f64 {
    if (x - 1.0).abs() < UNIT_SNAP {
        1.0
    } else {
        x
    }
}

/// `tan(pi alpha / 2)`, exactly zero at `alpha == 2`.
pub(crate) fn tan_half_pi(alpha: f64) -> f64 {
    if alpha == 2.0 {
        0.0
    } else {
        (0.5 * PI * alpha).tan()
    }
}

impl FormAParams {
    /// Validated constructor; `alpha` is snapped to 1 when within [`UNIT_SNAP`].
    pub fn new(alpha: f64, beta: f64, gamma: f64, lambda: f64) -> Result<Self> {
        let p = FormAParams {
            alpha: snap_unit(alpha),
            beta,
            gamma,
            lambda,
        };
        p.check()?;
        Ok(p)
    }

    /// Standard law `(alpha, beta, 0, 1)`.
    pub fn standard(alpha: f64, beta: f64) -> Result<Self> {
        Self::new(alpha, beta, 0.0, 1.0)
    }

    pub fn is_admissible(&self) -> bool {
        validate_form_a(self).is_empty()
    }

    pub fn check(&self) -> Result<()> {
        let v = validate_form_a(self);
        if v.is_empty() {
            Ok(())
        } else {
            let msg: Vec<String> = v.iter().map(ToString::to_string).collect();
            Err(Error::InvalidParams(msg.join("; ")))
        }
    }

    /// True when the law is strictly stable, i.e. the strict parameters exist.
    pub fn is_strictly_stable(&self) -> bool {
        if self.alpha == 1.0 {
            self.beta == 0.0
        } else {
            self.gamma == 0.0
        }
    }
}

impl StrictParams {
    pub fn new(nu: f64, theta: f64, tau: f64) -> Result<Self> {
        let s = StrictParams { nu, theta, tau };
        s.check()?;
        Ok(s)
    }

    /// Largest admissible `|theta|` at this `nu`.
    pub fn theta_limit(nu: f64) -> f64 {
        (2.0 * nu.sqrt() - 1.0).min(1.0)
    }

    pub fn check(&self) -> Result<()> {
        if !(self.nu >= 0.25 && self.nu.is_finite()) {
            return Err(Error::InvalidParams(format!(
                "nu must be finite and >= 1/4, got {}",
                self.nu
            )));
        }
        if !(self.theta.abs() <= Self::theta_limit(self.nu) + THETA_SLACK) {
            return Err(Error::InvalidParams(format!(
                "|theta| must not exceed min(1, 2 sqrt(nu) - 1) = {}, got {}",
                Self::theta_limit(self.nu),
                self.theta
            )));
        }
        if !self.tau.is_finite() {
            return Err(Error::InvalidParams("tau must be finite".into()));
        }
        Ok(())
    }

    /// Characteristic exponent `nu^{-1/2}`, snapped at 1.
    pub fn alpha(&self) -> f64 {
        snap_unit(1.0 / self.nu.sqrt())
    }
}

/// Maps a strictly stable form-A law to `(nu, theta, tau)`.
///
/// Requires `gamma == 0` when `alpha != 1` and `beta == 0` when `alpha == 1`.
pub fn to_strict(p: &FormAParams) -> Result<StrictParams> {
    p.check()?;
    let alpha = snap_unit(p.alpha);
    if alpha == 1.0 {
        if p.beta != 0.0 {
            return Err(Error::NotStrictlyStable(format!(
                "alpha = 1 requires beta = 0, got {}",
                p.beta
            )));
        }
        // -log cos(atan g) = log(1 + g^2) / 2
        return Ok(StrictParams {
            nu: 1.0,
            theta: 2.0 / PI * p.gamma.atan(),
            tau: p.lambda.ln() + 0.5 * (p.gamma * p.gamma).ln_1p(),
        });
    }
    if p.gamma != 0.0 {
        return Err(Error::NotStrictlyStable(format!(
            "alpha != 1 requires gamma = 0, got {}",
            p.gamma
        )));
    }
    let skew = p.beta * tan_half_pi(alpha);
    let phi = skew.atan();
    Ok(StrictParams {
        nu: 1.0 / (alpha * alpha),
        theta: 2.0 / (PI * alpha) * phi,
        tau: (p.lambda.ln() + 0.5 * (skew * skew).ln_1p() - EULER_GAMMA * (alpha - 1.0)) / alpha,
    })
}

/// Inverse of [`to_strict`].
///
/// Fails only at `nu == 1, |theta| == 1`, where the law degenerates.
pub fn from_strict(s: &StrictParams) -> Result<FormAParams> {
    s.check()?;
    let alpha = s.alpha();
    if alpha == 1.0 {
        if s.theta.abs() >= 1.0 {
            return Err(Error::InvalidParams(
                "nu = 1 with |theta| = 1 is degenerate".into(),
            ));
        }
        let half = 0.5 * PI * s.theta;
        return Ok(FormAParams {
            alpha: 1.0,
            beta: 0.0,
            gamma: half.tan(),
            lambda: s.tau.exp() * half.cos(),
        });
    }
    let phi = 0.5 * PI * alpha * s.theta;
    let t = tan_half_pi(alpha);
    let beta = if t == 0.0 {
        0.0
    } else {
        (phi.tan() / t).clamp(-1.0, 1.0)
    };
    Ok(FormAParams {
        alpha,
        beta,
        gamma: 0.0,
        lambda: phi.cos() * (alpha * s.tau + EULER_GAMMA * (alpha - 1.0)).exp(),
    })
}

/// Law of `Y1 - (Y2 + Y3) / 2` for i.i.d. `Y ~ p`; always strictly stable.
pub fn transform_params(p: &FormAParams) -> FormAParams {
    let r = (1.0 - p.alpha).exp2();
    FormAParams {
        alpha: p.alpha,
        beta: p.beta * (1.0 - r) / (1.0 + r),
        lambda: (1.0 + r) * p.lambda,
        gamma: if p.alpha == 1.0 {
            -LN_2 / PI * p.beta
        } else {
            0.0
        },
    }
}

/// `|H(t)|`: the largest `|theta|` a triplet-transformed law can have at `nu = t`.
pub fn theta_bound(t: f64) -> Result<f64> {
    if !(t >= 0.25 && t.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "theta bound needs t >= 1/4, got {t}"
        )));
    }
    let t = snap_unit(t);
    if t == 1.0 {
        return Ok((2.0 / PI * (LN_2 / PI).atan()).abs());
    }
    let root = t.sqrt();
    let r = ((1.0 - 1.0 / root) * LN_2).exp();
    let h = 2.0 / PI * root * ((1.0 - r) / (1.0 + r) * tan_half_pi(1.0 / root)).atan();
    Ok(h.abs())
}
