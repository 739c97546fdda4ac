//! Closed-form moments of `U = sign X` and `V = log |X|` for strictly stable `X`.
//!
//! Everything is expressed through a handful of recurring ingredients:
//!
//! ```text
//! DV = (pi^2/4)(1 - theta^2) + (pi^2/6)(nu - 1)
//! Z_k = zeta(k)(nu^{k/2} - 1)                       k = 3, 5, 7
//! Q4 = pi^4 ((1 - theta^4)/8 + (nu^2 - 1)/15)
//! Q6 = pi^6 ((1 - theta^6)/32 + (nu^3 - 1)/63)
//! Q8 = pi^8 (17(1 - theta^8)/256 + (nu^4 - 1)/30)
//! ```

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::params::StrictParams;

pub const ZETA_3: f64 = 1.202_056_903_159_594_285_4;
pub const ZETA_5: f64 = 1.036_927_755_143_369_926_3;
pub const ZETA_7: f64 = 1.008_349_277_381_922_826_8;

/// Variance of `log |X|`.
pub fn dv(s: &StrictParams) -> f64 {
    PI * PI / 4.0 * (1.0 - s.theta * s.theta) + PI * PI / 6.0 * (s.nu - 1.0)
}

/// The shared building blocks of every moment formula.
#[derive(Debug, Clone, Copy)]
pub(crate) struct Ingredients {
    pub d: f64,
    pub z3: f64,
    pub z5: f64,
    pub z7: f64,
    pub q4: f64,
    pub q6: f64,
    pub q8: f64,
}

impl Ingredients {
    pub fn new(s: &StrictParams) -> Self {
        let (nu, t2) = (s.nu, s.theta * s.theta);
        let pi2 = PI * PI;
        let pi4 = pi2 * pi2;
        Ingredients {
            d: dv(s),
            z3: ZETA_3 * (nu.powf(1.5) - 1.0),
            z5: ZETA_5 * (nu.powf(2.5) - 1.0),
            z7: ZETA_7 * (nu.powf(3.5) - 1.0),
            q4: pi4 * ((1.0 - t2 * t2) / 8.0 + (nu * nu - 1.0) / 15.0),
            q6: pi4 * pi2 * ((1.0 - t2 * t2 * t2) / 32.0 + (nu.powi(3) - 1.0) / 63.0),
            q8: pi4 * pi4 * (17.0 * (1.0 - t2.powi(4)) / 256.0 + (nu.powi(4) - 1.0) / 30.0),
        }
    }
}

fn check_order(k: u32, lo: u32, hi: u32) -> Result<()> {
    if k < lo || k > hi {
        return Err(Error::InvalidArgument(format!(
            "moment order {k} outside {lo}..={hi}"
        )));
    }
    Ok(())
}

/// Raw moment `E log^k |X|`, `k = 1..=8`.
pub fn log_moment(k: u32, s: &StrictParams) -> Result<f64> {
    check_order(k, 1, 8)?;
    let Ingredients {
        d,
        z3,
        z5,
        z7,
        q4,
        q6,
        q8,
    } = Ingredients::new(s);
    let t = s.tau;
    let p = |e: i32| t.powi(e);
    Ok(match k {
        1 => t,
        2 => p(2) + d,
        3 => p(3) + 3.0 * t * d + 2.0 * z3,
        4 => p(4) + 6.0 * p(2) * d + 8.0 * t * z3 + 3.0 * d * d + q4,
        5 => {
            p(5) + 10.0 * p(3) * d + 20.0 * p(2) * z3 + 15.0 * t * d * d
                + 5.0 * t * q4
                + 20.0 * z3 * d
                + 24.0 * z5
        }
        6 => {
            p(6) + 15.0 * p(4) * d + 40.0 * p(3) * z3 + 45.0 * p(2) * d * d
                + 15.0 * d.powi(3)
                + 15.0 * p(2) * q4
                + 120.0 * t * z3 * d
                + 40.0 * z3 * z3
                + 144.0 * t * z5
                + 15.0 * q4 * d
                + 8.0 * q6
        }
        7 => {
            p(7) + 21.0 * p(5) * d + 70.0 * p(4) * z3 + 35.0 * p(3) * q4
                + 105.0 * t * d.powi(3)
                + 420.0 * p(2) * z3 * d
                + 504.0 * p(2) * z5
                + 210.0 * z3 * d * d
                + 105.0 * t * q4 * d
                + 56.0 * t * q6
                + 504.0 * z5 * d
                + 70.0 * z3 * q4
                + 280.0 * t * z3 * z3
                + 720.0 * z7
                + 105.0 * p(3) * d * d
        }
        _ => {
            p(8) + 28.0 * p(6) * d + 112.0 * p(5) * z3 + 210.0 * p(4) * d * d
                + 70.0 * p(4) * q4
                + 420.0 * p(2) * d.powi(3)
                + 1120.0 * p(3) * z3 * d
                + 105.0 * d.powi(4)
                + 1344.0 * p(3) * z5
                + 420.0 * p(2) * q4 * d
                + 1680.0 * t * d * d * z3
                + 224.0 * p(2) * q6
                + 1120.0 * p(2) * z3 * z3
                + 210.0 * d * d * q4
                + 560.0 * t * z3 * q4
                + 1120.0 * z3 * z3 * d
                + 4032.0 * t * z5 * d
                + 35.0 * q4 * q4
                + 5760.0 * t * z7
                + 224.0 * q6 * d
                + 2688.0 * z3 * z5
                + 16.0 * q8
        }
    })
}

fn check_theta(theta: f64) -> Result<()> {
    if !(theta.abs() <= 1.0) {
        return Err(Error::InvalidArgument(format!("theta = {theta} outside [-1, 1]")));
    }
    Ok(())
}

/// Central moment `E (U - theta)^k`, `k = 1..=8`, as a polynomial in `theta`.
pub fn u_central_moment(k: u32, theta: f64) -> Result<f64> {
    check_order(k, 1, 8)?;
    check_theta(theta)?;
    let t = theta;
    let t2 = t * t;
    Ok(match k {
        1 => 0.0,
        2 => 1.0 - t2,
        3 => 2.0 * t * (t2 - 1.0),
        4 => 1.0 + t2 * (2.0 - 3.0 * t2),
        5 => 4.0 * t * (t2 * t2 - 1.0),
        6 => 1.0 + t2 * (9.0 + t2 * (-5.0 - 5.0 * t2)),
        7 => 2.0 * t * (-3.0 + t2 * (-7.0 + t2 * (7.0 + 3.0 * t2))),
        _ => 1.0 + t2 * (20.0 + t2 * (14.0 + t2 * (-28.0 - 7.0 * t2))),
    })
}

/// `E (U - theta)^k` computed directly from the two-point law of `U`.
pub fn u_central_moment_oracle(k: u32, theta: f64) -> f64 {
    let k = k as i32;
    (1.0 - theta).powi(k) * (1.0 + theta) / 2.0 + (-1.0 - theta).powi(k) * (1.0 - theta) / 2.0
}

/// Central moment `E (V - tau)^k`, `k = 2..=8`.
pub fn v_central_moment(k: u32, s: &StrictParams) -> Result<f64> {
    check_order(k, 2, 8)?;
    let Ingredients {
        d,
        z3,
        z5,
        q4,
        q6,
        q8,
        ..
    } = Ingredients::new(s);
    Ok(match k {
        2 => d,
        3 => 2.0 * z3,
        4 => q4 + 3.0 * d * d,
        5 => 20.0 * z3 * d + 24.0 * z5,
        6 => 15.0 * d.powi(3) + 15.0 * q4 * d + 8.0 * q6 + 40.0 * z3 * z3,
        7 => log_moment(7, &StrictParams { tau: 0.0, ..*s })?,
        _ => {
            105.0 * d.powi(4)
                + 210.0 * d * d * q4
                + 1120.0 * z3 * z3 * d
                + 35.0 * q4 * q4
                + 224.0 * q6 * d
                + 2688.0 * z3 * z5
                + 16.0 * q8
        }
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MomentKind {
    RawLog,
    CentralU,
    CentralV,
}

impl MomentKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            MomentKind::RawLog => "raw-log",
            MomentKind::CentralU => "central-U",
            MomentKind::CentralV => "central-V",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MomentEntry {
    pub order: u32,
    pub kind: MomentKind,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MomentTable {
    pub params: StrictParams,
    pub entries: Vec<MomentEntry>,
}

/// Every available moment for `s`: raw log moments 1..=8, central U moments
/// 1..=8 and central V moments 2..=8.
pub fn moment_table(s: &StrictParams) -> Result<MomentTable> {
    s.check()?;
    let mut entries = Vec::with_capacity(23);
    for k in 1..=8 {
        entries.push(MomentEntry {
            order: k,
            kind: MomentKind::RawLog,
            value: log_moment(k, s)?,
        });
    }
    for k in 1..=8 {
        entries.push(MomentEntry {
            order: k,
            kind: MomentKind::CentralU,
            value: u_central_moment(k, s.theta)?,
        });
    }
    for k in 2..=8 {
        entries.push(MomentEntry {
            order: k,
            kind: MomentKind::CentralV,
            value: v_central_moment(k, s)?,
        });
    }
    Ok(MomentTable {
        params: *s,
        entries,
    })
}
