//! Seeded Monte Carlo studies of the estimators and oracle comparisons for
//! the moment and bound formulas.
//!
//! Replication `i` always draws from stream `i` of the configured seed and
//! results are aggregated in replication order, so output does not depend
//! on the number of worker threads.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bounds::{alpha_mse_bound, b_u4_central, bound_abs3, bound_nu4, mse_nu};
use crate::error::{Error, Result};
use crate::estimator::{estimate_general, estimate_strict};
use crate::moments::v_central_moment;
use crate::params::{to_strict, transform_params, FormAParams, StrictParams};
use crate::sampler::{sample_form_a, sample_strict, RandomStream};
use crate::stats::{central_moment_with_se, mean, sample_variance};

/// Run `f(i)` for `i in 0..reps` on `workers` threads, results in index order.
fn replicate<T, F>(workers: usize, reps: usize, f: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(u64) -> T + Sync + Send,
{
    if workers == 0 {
        return Err(Error::InvalidArgument("workers must be positive".into()));
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| Error::InvalidArgument(format!("cannot start worker pool: {e}")))?;
    Ok(pool.install(|| (0..reps as u64).into_par_iter().map(&f).collect()))
}

/// `(nu, theta)` of the triplet-transformed law of `(alpha, beta)`.
pub fn transformed_strict(alpha: f64, beta: f64) -> Result<StrictParams> {
    let p = FormAParams::new(alpha, beta, 0.0, 1.0)?;
    to_strict(&transform_params(&p))
}

/// Fewer replications give variance estimates too noisy to compare with a bound.
pub const MIN_REPLICATIONS: usize = 100;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StudyConfig {
    pub alpha_grid: Vec<f64>,
    pub beta: f64,
    pub n_grid: Vec<usize>,
    pub replications: usize,
    pub seed: u64,
    pub workers: usize,
}

impl StudyConfig {
    pub fn check(&self) -> Result<()> {
        if self.alpha_grid.is_empty() || self.n_grid.is_empty() {
            return Err(Error::InvalidArgument("alpha and n grids must be nonempty".into()));
        }
        if self.replications < MIN_REPLICATIONS {
            return Err(Error::InvalidArgument(format!(
                "need at least {MIN_REPLICATIONS} replications, got {}",
                self.replications
            )));
        }
        if let Some(&n) = self.n_grid.iter().find(|&&n| n < 6) {
            return Err(Error::InvalidArgument(format!("sample size {n} is below 6")));
        }
        if self.workers == 0 {
            return Err(Error::InvalidArgument("workers must be positive".into()));
        }
        for &a in &self.alpha_grid {
            FormAParams::new(a, self.beta, 0.0, 1.0)?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StudyRow {
    pub alpha: f64,
    pub n: usize,
    pub empirical_var: f64,
    pub empirical_bias: f64,
    /// `mean((alpha~ - alpha)^2)`, the quantity the bound controls.
    pub empirical_mse: f64,
    pub bound: f64,
    pub replications_used: usize,
    pub dropped: usize,
    pub clamp_rate: f64,
}

pub fn variance_study(cfg: &StudyConfig) -> Result<Vec<StudyRow>> {
    cfg.check()?;
    let mut rows = Vec::with_capacity(cfg.alpha_grid.len() * cfg.n_grid.len());
    for &alpha in &cfg.alpha_grid {
        let p = FormAParams::new(alpha, cfg.beta, 0.0, 1.0)?;
        let strict = transformed_strict(alpha, cfg.beta)?;
        for &n in &cfg.n_grid {
            let outcomes = replicate(cfg.workers, cfg.replications, |i| {
                let x = sample_form_a(&p, n, RandomStream::new(cfg.seed, i))?;
                estimate_general(&x).map(|e| (e.alpha_tilde, e.any_clamp()))
            })?;
            let kept: Vec<(f64, bool)> = outcomes.into_iter().filter_map(|r| r.ok()).collect();
            let used = kept.len();
            let alphas: Vec<f64> = kept.iter().map(|k| k.0).collect();
            let (var, bias, mse) = if used >= 2 {
                (
                    sample_variance(&alphas),
                    mean(&alphas) - p.alpha,
                    alphas.iter().map(|a| (a - p.alpha).powi(2)).sum::<f64>() / used as f64,
                )
            } else {
                (f64::NAN, f64::NAN, f64::NAN)
            };
            let clamps = kept.iter().filter(|k| k.1).count();
            rows.push(StudyRow {
                alpha: p.alpha,
                n,
                empirical_var: var,
                empirical_bias: bias,
                empirical_mse: mse,
                bound: alpha_mse_bound(&strict, n / 3),
                replications_used: used,
                dropped: cfg.replications - used,
                clamp_rate: if used > 0 { clamps as f64 / used as f64 } else { 0.0 },
            });
        }
    }
    Ok(rows)
}

/// Exact `E(B_U^2 - E B_U^2)^4` by enumerating all `2^n` sign vectors with
/// `P(+1) = (1 + theta)/2`.
pub fn enumerate_b_u4(theta: f64, n: usize) -> f64 {
    assert!((2..=20).contains(&n), "enumeration size {n} out of range");
    let (pp, pm) = ((1.0 + theta) / 2.0, (1.0 - theta) / 2.0);
    let mut outcomes = Vec::with_capacity(1 << n);
    let mut signs = vec![0.0; n];
    for mask in 0u32..(1 << n) {
        let mut w = 1.0;
        for (j, s) in signs.iter_mut().enumerate() {
            if mask >> j & 1 == 1 {
                *s = 1.0;
                w *= pp;
            } else {
                *s = -1.0;
                w *= pm;
            }
        }
        outcomes.push((w, sample_variance(&signs)));
    }
    let m: f64 = outcomes.iter().map(|(w, b)| w * b).sum();
    outcomes.iter().map(|(w, b)| w * (b - m).powi(4)).sum()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum OracleKind {
    UEnumeration,
    VMontecarlo,
    MseNu,
    BoundOneSided,
}

impl std::str::FromStr for OracleKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "u-enumeration" => Ok(OracleKind::UEnumeration),
            "v-montecarlo" => Ok(OracleKind::VMontecarlo),
            "mse-nu" => Ok(OracleKind::MseNu),
            "bound-one-sided" => Ok(OracleKind::BoundOneSided),
            other => Err(Error::InvalidArgument(format!("unknown oracle kind '{other}'"))),
        }
    }
}

/// Inputs for [`oracle_suite`]; each kind reads the fields it needs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OracleConfig {
    /// Strictly stable law for `v-montecarlo` and `mse-nu`.
    pub strict: StrictParams,
    /// General law for `bound-one-sided`.
    pub alpha: f64,
    pub beta: f64,
    pub n: usize,
    pub theta_grid: Vec<f64>,
    pub replications: usize,
    pub seed: u64,
    pub workers: usize,
}

impl Default for OracleConfig {
    fn default() -> Self {
        OracleConfig {
            strict: StrictParams {
                nu: 1.0,
                theta: 0.0,
                tau: 0.0,
            },
            alpha: 1.5,
            beta: 0.0,
            n: 100,
            theta_grid: vec![-1.0, -0.75, -0.5, -0.25, 0.0, 0.25, 0.5, 0.75, 1.0],
            replications: 100_000,
            seed: 0,
            workers: 1,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OracleCheck {
    pub label: String,
    pub observed: f64,
    pub reference: f64,
    pub deviation: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OracleReport {
    pub kind: OracleKind,
    pub checks: Vec<OracleCheck>,
    pub max_deviation: f64,
    pub tolerance: f64,
    pub passed: bool,
}

impl OracleReport {
    fn new(kind: OracleKind, checks: Vec<OracleCheck>, tolerance: f64) -> Self {
        let max_deviation = checks.iter().map(|c| c.deviation).fold(0.0, f64::max);
        let passed = checks.iter().all(|c| c.deviation <= tolerance);
        OracleReport {
            kind,
            checks,
            max_deviation,
            tolerance,
            passed,
        }
    }
}

fn relative_deviation(observed: f64, reference: f64) -> f64 {
    if reference == 0.0 {
        observed.abs()
    } else {
        ((observed - reference) / reference).abs()
    }
}

/// Run one oracle comparison. Deviations are relative errors for
/// `u-enumeration` and `mse-nu`, standard errors for `v-montecarlo`, and
/// empirical/bound ratios for `bound-one-sided`.
pub fn oracle_suite(kind: OracleKind, cfg: &OracleConfig) -> Result<OracleReport> {
    match kind {
        OracleKind::UEnumeration => {
            if !(2..=20).contains(&cfg.n) {
                return Err(Error::InvalidArgument(format!(
                    "enumeration needs 2 <= n <= 20, got {}",
                    cfg.n
                )));
            }
            let checks = cfg
                .theta_grid
                .iter()
                .map(|&theta| {
                    let observed = b_u4_central(theta, cfg.n);
                    let reference = enumerate_b_u4(theta, cfg.n);
                    OracleCheck {
                        label: format!("theta={theta} n={}", cfg.n),
                        observed,
                        reference,
                        deviation: relative_deviation(observed, reference),
                    }
                })
                .collect();
            Ok(OracleReport::new(kind, checks, 1e-10))
        }
        OracleKind::VMontecarlo => {
            let s = cfg.strict;
            s.check()?;
            let x = sample_strict(&s, cfg.replications, RandomStream::new(cfg.seed, 0))?;
            let v: Vec<f64> = x.iter().map(|y| y.abs().ln()).collect();
            let mut checks = Vec::new();
            for k in 2..=4u32 {
                let (est, se) = central_moment_with_se(&v, k as i32);
                let reference = v_central_moment(k, &s)?;
                checks.push(OracleCheck {
                    label: format!("E V^{k}"),
                    observed: est,
                    reference,
                    deviation: (est - reference).abs() / se,
                });
            }
            Ok(OracleReport::new(kind, checks, 4.0))
        }
        OracleKind::MseNu => {
            let s = cfg.strict;
            s.check()?;
            let nu_hats = replicate(cfg.workers, cfg.replications, |i| {
                let x = sample_strict(&s, cfg.n, RandomStream::new(cfg.seed, i))?;
                estimate_strict(&x).map(|e| e.nu_hat)
            })?
            .into_iter()
            .collect::<Result<Vec<f64>>>()?;
            let observed =
                nu_hats.iter().map(|v| (v - s.nu).powi(2)).sum::<f64>() / nu_hats.len() as f64;
            let reference = mse_nu(&s, cfg.n);
            let check = OracleCheck {
                label: format!("E(nu^ - nu)^2 nu={} theta={} n={}", s.nu, s.theta, cfg.n),
                observed,
                reference,
                deviation: relative_deviation(observed, reference),
            };
            Ok(OracleReport::new(kind, vec![check], 0.05))
        }
        OracleKind::BoundOneSided => {
            let p = FormAParams::new(cfg.alpha, cfg.beta, 0.0, 1.0)?;
            let s = transformed_strict(cfg.alpha, cfg.beta)?;
            let outcomes = replicate(cfg.workers, cfg.replications, |i| {
                let x = sample_form_a(&p, cfg.n, RandomStream::new(cfg.seed, i))?;
                estimate_general(&x).map(|e| (e.strict.nu_tilde, e.alpha_tilde, e.m))
            })?;
            let kept: Vec<(f64, f64, usize)> = outcomes.into_iter().filter_map(|r| r.ok()).collect();
            if kept.is_empty() {
                return Err(Error::InvalidSample("every replication was degenerate".into()));
            }
            let k = kept.len() as f64;
            let m = cfg.n / 3;
            let e4 = kept.iter().map(|r| (r.0 - s.nu).powi(4)).sum::<f64>() / k;
            let e3 = kept.iter().map(|r| (r.0 - s.nu).abs().powi(3)).sum::<f64>() / k;
            let ea = kept.iter().map(|r| (r.1 - p.alpha).powi(2)).sum::<f64>() / k;
            let pairs = [
                ("E(nu~ - nu)^4", e4, bound_nu4(&s, m)),
                ("E|nu~ - nu|^3", e3, bound_abs3(&s, m).0),
                ("E(alpha~ - alpha)^2", ea, alpha_mse_bound(&s, m)),
            ];
            let checks = pairs
                .iter()
                .map(|&(label, observed, reference)| OracleCheck {
                    label: label.into(),
                    observed,
                    reference,
                    deviation: observed / reference,
                })
                .collect();
            Ok(OracleReport::new(kind, checks, 1.0))
        }
    }
}
