use std::f64::consts::PI;

use stablefit::params::{FormAParams, StrictParams, EULER_GAMMA};
use stablefit::sampler::{sample_form_a, sample_strict, RandomStream};
use stablefit::stats::{ks_critical_1pct, ks_one_sample, ks_two_sample, ks_two_sample_critical_1pct};
use statrs::function::erf::{erf, erfc};

const N: usize = 100_000;

fn normal_var2_cdf(x: f64) -> f64 {
    // N(0, 2): Phi(x / sqrt 2) = (1 + erf(x / 2)) / 2.
    0.5 * (1.0 + erf(x / 2.0))
}

fn cauchy_cdf(x: f64) -> f64 {
    0.5 + x.atan() / PI
}

fn levy_cdf(x: f64) -> f64 {
    if x <= 0.0 {
        0.0
    } else {
        erfc((0.5 / x).sqrt())
    }
}

#[test]
fn gaussian_case() {
    let p = FormAParams::standard(2.0, 0.0).unwrap();
    let x = sample_form_a(&p, N, RandomStream::new(1, 0)).unwrap();
    let d = ks_one_sample(&x, normal_var2_cdf);
    assert!(d < ks_critical_1pct(N), "D = {d}");
}

#[test]
fn cauchy_case() {
    let p = FormAParams::standard(1.0, 0.0).unwrap();
    let x = sample_form_a(&p, N, RandomStream::new(2, 0)).unwrap();
    let d = ks_one_sample(&x, cauchy_cdf);
    assert!(d < ks_critical_1pct(N), "D = {d}");
}

#[test]
fn levy_case() {
    let p = FormAParams::standard(0.5, 1.0).unwrap();
    let x = sample_form_a(&p, N, RandomStream::new(3, 0)).unwrap();
    assert!(x.iter().all(|&v| v >= 0.0));
    let d = ks_one_sample(&x, levy_cdf);
    assert!(d < ks_critical_1pct(N), "D = {d}");
}

#[test]
fn scale_and_shift_follow_form_a() {
    // alpha = 2: mean lambda*gamma, variance 2*lambda.
    let p = FormAParams::new(2.0, 0.0, 0.4, 2.5).unwrap();
    let x = sample_form_a(&p, N, RandomStream::new(5, 0)).unwrap();
    let d = ks_one_sample(&x, |v| normal_var2_cdf((v - 1.0) / 2.5f64.sqrt()));
    assert!(d < ks_critical_1pct(N), "D = {d}");
    // alpha = 1: location lambda*gamma, scale lambda.
    let p = FormAParams::new(1.0, 0.0, -0.7, 3.0).unwrap();
    let x = sample_form_a(&p, N, RandomStream::new(6, 0)).unwrap();
    let d = ks_one_sample(&x, |v| cauchy_cdf((v + 2.1) / 3.0));
    assert!(d < ks_critical_1pct(N), "D = {d}");
}

#[test]
fn strict_parameterization() {
    let s = StrictParams::new(1.0, 0.0, 0.0).unwrap();
    let x = sample_strict(&s, N, RandomStream::new(7, 0)).unwrap();
    assert!(ks_one_sample(&x, cauchy_cdf) < ks_critical_1pct(N));

    let s = StrictParams::new(0.25, 0.0, -EULER_GAMMA / 2.0).unwrap();
    let x = sample_strict(&s, N, RandomStream::new(8, 0)).unwrap();
    assert!(ks_one_sample(&x, normal_var2_cdf) < ks_critical_1pct(N));

    let a = sample_strict(&s, 1, RandomStream::new(9, 9)).unwrap();
    let b = sample_strict(&s, 1, RandomStream::new(9, 9)).unwrap();
    assert_eq!(a, b);
    assert_eq!(a.len(), 1);
}

#[test]
fn stability_under_summation() {
    for &alpha in &[0.75, 1.5] {
        let p = FormAParams::standard(alpha, 0.0).unwrap();
        let pairs = sample_form_a(&p, 2 * N, RandomStream::new(10, 0)).unwrap();
        let c = 2f64.powf(1.0 / alpha);
        let sums: Vec<f64> = pairs.chunks_exact(2).map(|w| (w[0] + w[1]) / c).collect();
        let fresh = sample_form_a(&p, N, RandomStream::new(10, 1)).unwrap();
        let d = ks_two_sample(&sums, &fresh);
        assert!(d < ks_two_sample_critical_1pct(N, N), "alpha={alpha}: D = {d}");
    }
}

#[test]
fn sign_balance() {
    let p = FormAParams::standard(1.2, 0.0).unwrap();
    let n = 1_000_000;
    let x = sample_form_a(&p, n, RandomStream::new(11, 0)).unwrap();
    let mean_sign = x.iter().map(|v| v.signum()).sum::<f64>() / n as f64;
    assert!(mean_sign.abs() < 4.0 / (n as f64).sqrt(), "{mean_sign}");
}

#[test]
fn bitwise_determinism() {
    let p = FormAParams::new(1.7, -0.4, 0.3, 2.0).unwrap();
    let a = sample_form_a(&p, 1000, RandomStream::new(12, 3)).unwrap();
    let b = sample_form_a(&p, 1000, RandomStream::new(12, 3)).unwrap();
    assert!(a.iter().zip(&b).all(|(x, y)| x.to_bits() == y.to_bits()));
}
