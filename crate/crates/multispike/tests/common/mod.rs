#![allow(dead_code)] // each test binary uses a different subset of these oracles

//! Shared Monte Carlo oracles for the integration tests: an exact GOE
//! largest-eigenvalue sampler (tridiagonal beta-ensemble plus Sturm
//! bisection) and a Marchenko–Pastur quantile function obtained by
//! inverting the CDF numerically. Both are independent of the closed-form
//! code paths they are used to check.

use multispike::mp::MpLaw;
use multispike::rng::stream_rng;
use rand::Rng;
use rand_distr::{ChiSquared, Distribution, StandardNormal};
use rayon::prelude::*;

/// Largest eigenvalue of a symmetric tridiagonal matrix by Sturm-count
/// bisection on the Gershgorin interval.
pub fn tridiag_lambda_max(d: &[f64], e: &[f64]) -> f64 {
    let n = d.len();
    let count_below = |x: f64| -> usize {
        let mut cnt = 0usize;
        let mut q = d[0] - x;
        if q < 0.0 {
            cnt += 1;
        }
        for i in 1..n {
            if q == 0.0 {
                q = 1e-300;
            }
            q = d[i] - x - e[i - 1] * e[i - 1] / q;
            if q < 0.0 {
                cnt += 1;
            }
        }
        cnt
    };
    let mut hi = f64::NEG_INFINITY;
    let mut lo = f64::INFINITY;
    for i in 0..n {
        let left = if i > 0 { e[i - 1].abs() } else { 0.0 };
        let right = if i < n - 1 { e[i].abs() } else { 0.0 };
        hi = hi.max(d[i] + left + right);
        lo = lo.min(d[i] - left - right);
    }
    for _ in 0..80 {
        let mid = 0.5 * (lo + hi);
        if count_below(mid) == n {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    0.5 * (lo + hi)
}

/// One draw of the largest eigenvalue of the `n×n` GOE (diagonal `N(0,2)`,
/// off-diagonal `N(0,1)`), via the tridiagonal Hermite ensemble with the
/// identical eigenvalue law.
pub fn goe_lambda_max(n: usize, seed: u64, stream: u64) -> f64 {
    let mut rng = stream_rng(seed, stream);
    let d: Vec<f64> = (0..n)
        .map(|_| 2.0_f64.sqrt() * rng.sample::<f64, _>(StandardNormal))
        .collect();
    let e: Vec<f64> = (1..n)
        .rev()
        .map(|k| ChiSquared::new(k as f64).unwrap().sample(&mut rng).sqrt())
        .collect();
    tridiag_lambda_max(&d, &e)
}

/// Samples of the edge-scaled GOE largest eigenvalue
/// `(λ_max - 2√n)·n^{1/6}`, which follow the TW1 law as n grows.
pub fn goe_tw1_samples(n: usize, reps: usize, seed: u64) -> Vec<f64> {
    let center = 2.0 * (n as f64).sqrt();
    let scale = (n as f64).powf(1.0 / 6.0);
    (0..reps)
        .into_par_iter()
        .map(|i| (goe_lambda_max(n, seed, i as u64) - center) * scale)
        .collect()
}

/// Empirical upper quantile (order statistic at `ceil(q·len)`).
pub fn empirical_quantile(xs: &mut [f64], q: f64) -> f64 {
    xs.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let k = ((q * xs.len() as f64).ceil() as usize).clamp(1, xs.len());
    xs[k - 1]
}

/// Marchenko–Pastur quantile by bisection on the (quadrature-based) CDF.
pub fn mp_quantile(law: &MpLaw, u: f64) -> f64 {
    assert!((0.0..1.0).contains(&u));
    if u < law.atom() {
        return 0.0;
    }
    let (a, b) = law.support();
    let mut lo = a;
    let mut hi = b;
    for _ in 0..80 {
        let mid = 0.5 * (lo + hi);
        if law.cdf(mid).unwrap() < u {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}
