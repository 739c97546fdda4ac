//! Mean-square deviation bounds for the exponent estimate.
//!
//! With `b = E B^2` and `mu_k` the central moments of the summands, the
//! fourth central moment of a sample variance `B^2` of size `n` is
//!
//! ```text
//! 3(mu4 - b^2)^2 / n^2 + P / n^3
//! ```
//!
//! where `P` is a cubic polynomial in `1/(n-1)`. Specialized to `U = sign X`
//! and `V = log |X|` this gives `P1` and `P2`; `P3`, `P3'` combine them into
//! a bound on `E(nu~ - nu)^4`, and the bound on `E(alpha~ - alpha)^2` follows
//! from a second-order expansion of `alpha = nu^{-1/2}`.
//!
//! All functions expect a valid `(nu, theta)` and `n >= 2`.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::moments::{dv, Ingredients};
use crate::params::StrictParams;

/// `c[0] + c[1] x + c[2] x^2 + ...`
fn horner(x: f64, c: &[f64]) -> f64 {
    c.iter().rev().fold(0.0, |acc, &ci| acc * x + ci)
}

/// `1/(n-1)^k` for `k = 1, 2, 3`, with the powers formed in integers.
fn inv_powers(n: usize) -> [f64; 3] {
    let m = (n - 1) as u128;
    [1.0 / m as f64, 1.0 / (m * m) as f64, 1.0 / (m * m * m) as f64]
}

/// Third-order coefficient of `E(B_U^2 - E B_U^2)^4`.
pub fn p1(theta: f64, n: usize) -> f64 {
    let x = theta * theta;
    let [i1, i2, i3] = inv_powers(n);
    16.0 * x * horner(x, &[15.0, -71.0, 101.0, -45.0])
        + 12.0 * i1 * horner(x, &[5.0, -96.0, 322.0, -376.0, 145.0])
        + 4.0 * i2 * horner(x, &[-33.0, 436.0, -1238.0, 1300.0, -465.0])
        + 16.0 * i3 * horner(x, &[5.0, -52.0, 134.0, -132.0, 45.0])
}

/// `E(B_U^2 - E B_U^2)^4`.
pub fn b_u4_central(theta: f64, n: usize) -> f64 {
    let x = theta * theta;
    let nf = n as f64;
    48.0 * x * x * (1.0 - x).powi(2) / (nf * nf) + p1(theta, n) / nf.powi(3)
}

/// Third-order coefficient of `E(B_V^2 - E B_V^2)^4`.
pub fn p2(s: &StrictParams, n: usize) -> f64 {
    let Ingredients {
        d,
        z3,
        z5,
        q4,
        q6,
        q8,
        ..
    } = Ingredients::new(s);
    let [i1, i2, i3] = inv_powers(n);
    let d2 = d * d;
    let d4 = d2 * d2;
    let dz = d * z3 * z3;
    let g0 = 72.0 * d4 + 156.0 * d2 * q4 + 192.0 * d * q6 + 384.0 * dz + 32.0 * q4 * q4
        + 16.0 * q8
        + 1536.0 * z3 * z5;
    let g1 = 15.0 * d4 + 25.0 * d2 * q4 + 16.0 * d * q6 + 32.0 * dz + 2.0 * q4 * q4;
    let g2 = 39.0 * d4 + 36.0 * d2 * q4 - 96.0 * dz - 384.0 * z3 * z5;
    let g3 = 6.0 * d4 - 48.0 * dz + q4 * q4;
    g0 + 12.0 * i1 * g1 + 4.0 * i2 * g2 + 8.0 * i3 * g3
}

/// `E(B_V^2 - E B_V^2)^4`.
pub fn b_v4_central(s: &StrictParams, n: usize) -> f64 {
    let ing = Ingredients::new(s);
    let nf = n as f64;
    let lead = ing.q4 + 2.0 * ing.d * ing.d;
    3.0 * lead * lead / (nf * nf) + p2(s, n) / nf.powi(3)
}

/// Leading-order constant of the fourth-moment bound.
pub fn p3(s: &StrictParams) -> f64 {
    let ing = Ingredients::new(s);
    let q = 3f64.powf(0.25);
    let t2 = s.theta * s.theta;
    3.0 * q * (t2 * (1.0 - t2)).max(0.0).sqrt()
        + 6.0 * q / (PI * PI) * (ing.q4 + 3.0 * ing.d * ing.d).max(0.0).sqrt()
}

/// Higher-order correction `n^{1/4}((P3 + delta)^4 - P3^4)`, expanded so
/// the difference does not cancel for large `n`.
pub fn p3_prime(s: &StrictParams, n: usize) -> f64 {
    let nf = n as f64;
    let a = p3(s);
    let delta = 1.5 * (p1(s.theta, n).abs() / nf).powf(0.25)
        + 6.0 / (PI * PI) * (p2(s, n).abs() / nf).powf(0.25);
    nf.powf(0.25) * delta * (4.0 * a.powi(3) + delta * (6.0 * a * a + delta * (4.0 * a + delta)))
}

/// Exact mean-square error `E(nu^ - nu)^2` of the unclamped estimator.
pub fn mse_nu(s: &StrictParams, n: usize) -> f64 {
    let nf = n as f64;
    let v = s.nu - 1.0;
    let w = 1.0 - s.theta * s.theta;
    let first = 22.0 / 5.0 * v * v + 6.0 / 5.0 * (9.0 - 5.0 * s.theta * s.theta) * v
        + 3.0 * w * (3.0 + s.theta * s.theta);
    let second = 2.0 * v * v + 6.0 * w * v + 9.0 * w * w;
    first / nf + second / (nf * (nf - 1.0))
}

/// Upper bound on `E(nu~ - nu)^4`.
pub fn bound_nu4(s: &StrictParams, n: usize) -> f64 {
    let nf = n as f64;
    p3(s).powi(4) / (nf * nf) + p3_prime(s, n) / nf.powf(2.25)
}

/// Upper bound on `E|nu~ - nu|^3`; the flag reports whether `P3'` had to be
/// clipped at zero before taking its square root.
pub fn bound_abs3(s: &StrictParams, n: usize) -> (f64, bool) {
    let nf = n as f64;
    let pp = p3_prime(s, n);
    let clipped = pp < 0.0;
    let value = mse_nu(s, n).sqrt() * (p3(s).powi(2) + pp.max(0.0).sqrt() / nf.powf(0.125)) / nf;
    (value, clipped)
}

/// Upper bound on `E(alpha~ - alpha)^2`.
pub fn alpha_mse_bound(s: &StrictParams, n: usize) -> f64 {
    let nu = s.nu;
    mse_nu(s, n) / (4.0 * nu.powi(3))
        + 12.0 / nu.powf(1.5) * bound_abs3(s, n).0
        + 144.0 * bound_nu4(s, n)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundReport {
    pub nu: f64,
    pub theta: f64,
    pub n: usize,
    pub dv: f64,
    pub p1: f64,
    pub p2: f64,
    pub p3: f64,
    pub p3_prime: f64,
    pub mse_nu: f64,
    pub bound_nu4: f64,
    pub bound_abs3: f64,
    pub bound_alpha2: f64,
    pub p3_prime_clipped: bool,
}

impl BoundReport {
    pub fn new(s: &StrictParams, n: usize) -> Result<Self> {
        s.check()?;
        if n < 2 {
            return Err(Error::InvalidArgument(format!(
                "bound needs sample size n >= 2, got {n}"
            )));
        }
        let (bound_abs3, p3_prime_clipped) = bound_abs3(s, n);
        Ok(BoundReport {
            nu: s.nu,
            theta: s.theta,
            n,
            dv: dv(s),
            p1: p1(s.theta, n),
            p2: p2(s, n),
            p3: p3(s),
            p3_prime: p3_prime(s, n),
            mse_nu: mse_nu(s, n),
            bound_nu4: bound_nu4(s, n),
            bound_abs3,
            bound_alpha2: alpha_mse_bound(s, n),
            p3_prime_clipped,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn sp(nu: f64, theta: f64) -> StrictParams {
        StrictParams { nu, theta, tau: 0.0 }
    }

    #[test]
    fn p1_examples() {
        assert_relative_eq!(p1(0.0, 11), 4.76, max_relative = 1e-14);
        // A degenerate sign sample has a degenerate variance.
        for n in [2, 5, 100] {
            assert!(p1(1.0, n).abs() < 1e-12);
            assert!(b_u4_central(1.0, n).abs() < 1e-12);
        }
        assert!(p1(0.0, 1_000_000).abs() < 1e-4);
    }

    #[test]
    fn b_v4_leading_terms() {
        let n = 1_000_000;
        let lead = 3.0 * (PI.powi(4) / 4.0).powi(2) / (n as f64).powi(2);
        assert_relative_eq!(b_v4_central(&sp(1.0, 0.0), n), lead, max_relative = 1e-4);
        assert!(b_v4_central(&sp(1.0, 1.0), 50).abs() < 1e-9);
    }

    #[test]
    fn p3_examples() {
        assert_relative_eq!(
            p3(&sp(1.0, 0.0)),
            1.5 * 3f64.powf(0.25) * 5f64.sqrt(),
            max_relative = 1e-14
        );
        let s = sp(1.3, 0.2);
        let (a, b) = (p3_prime(&s, 10_000), p3_prime(&s, 100_000_000));
        assert!(b / 100_000_000f64.powf(0.25) < a / 10_000f64.powf(0.25));
    }

    #[test]
    fn mse_nu_examples() {
        assert_relative_eq!(mse_nu(&sp(1.0, 0.0), 100), 0.09 + 9.0 / 9900.0, max_relative = 1e-14);
        assert_relative_eq!(
            mse_nu(&sp(0.25, 0.0), 100),
            3.375 / 100.0 + 5.625 / 9900.0,
            max_relative = 1e-14
        );
        assert_eq!(mse_nu(&sp(1.0, 1.0), 37), 0.0);
    }

    #[test]
    fn bound_examples() {
        let s = sp(1.0, 0.0);
        assert!(alpha_mse_bound(&s, 1000) < alpha_mse_bound(&s, 100));
        assert_eq!(bound_abs3(&sp(1.0, 1.0), 100).0, 0.0);
        let deg = sp(1.0, 1.0);
        assert_relative_eq!(
            alpha_mse_bound(&deg, 100),
            144.0 * bound_nu4(&deg, 100),
            max_relative = 1e-15
        );
        let r = BoundReport::new(&sp(1.0 / 2.25, 0.0), 10_000).unwrap();
        assert!(r.bound_alpha2 > 0.0 && r.bound_nu4 > 0.0 && r.bound_abs3 > 0.0);
        assert!(!r.p3_prime_clipped);
        assert!(BoundReport::new(&s, 1).is_err());
    }
}
