//! Small statistical helpers shared by the tests and the experiment harness:
//! the standard normal CDF and quantile, sample moments, binomial standard
//! errors, and Kolmogorov–Smirnov machinery.
//!
//! The normal CDF is computed from scratch — a positive-term Taylor series
//! for small arguments and a Lentz-evaluated continued fraction in the tails
//! — because the power formulas difference Φ at points where ~1e-12 relative
//! accuracy matters. The quantile takes the `statrs` value as a seed and
//! polishes it with one Halley step against our own CDF.

use statrs::distribution::{ContinuousCDF, Normal};

use crate::error::{Error, Result};

const FRAC_2_SQRT_PI: f64 = std::f64::consts::FRAC_2_SQRT_PI;
const SQRT_2: f64 = std::f64::consts::SQRT_2;

/// erf(z) for 0 ≤ z ≲ 1.5 by the confluent series
/// `erf(z) = (2/√π) e^{-z²} Σ_k 2^k z^{2k+1} / (1·3···(2k+1))`
/// whose terms are all positive (no cancellation).
fn erf_series(z: f64) -> f64 {
    let z2 = z * z;
    let mut term = z;
    let mut sum = z;
    let mut k = 0u32;
    loop {
        k += 1;
        term *= 2.0 * z2 / (2.0 * k as f64 + 1.0);
        let new = sum + term;
        if new == sum || k > 200 {
            break;
        }
        sum = new;
    }
    FRAC_2_SQRT_PI * (-z2).exp() * sum
}

/// erfc(z) for z ≳ 1.5 by the Laplace continued fraction
/// `√π e^{z²} erfc(z) = 1/(z + (1/2)/(z + (2/2)/(z + (3/2)/(z + …))))`,
/// evaluated with the modified Lentz algorithm.
fn erfc_cf(z: f64) -> f64 {
    const TINY: f64 = 1e-300;
    let mut f = z.max(TINY);
    let mut c = f;
    let mut d = 0.0;
    for k in 1..=300 {
        let a = 0.5 * k as f64;
        d = z + a * d;
        if d.abs() < TINY {
            d = TINY;
        }
        c = z + a / c;
        if c.abs() < TINY {
            c = TINY;
        }
        d = 1.0 / d;
        let delta = c * d;
        f *= delta;
        if (delta - 1.0).abs() < 1e-17 {
            break;
        }
    }
    (-z * z).exp() / (std::f64::consts::PI.sqrt() * f)
}

/// Complementary error function, accurate to ~1e-15 relative on the reals.
pub fn erfc(z: f64) -> f64 {
    if z < 0.0 {
        return 2.0 - erfc(-z);
    }
    if z <= 1.5 {
        1.0 - erf_series(z)
    } else if z < 38.0 {
        erfc_cf(z)
    } else {
        0.0 // below the smallest positive double
    }
}

/// Standard normal CDF Φ(x).
pub fn normal_cdf(x: f64) -> f64 {
    0.5 * erfc(-x / SQRT_2)
}

/// Standard normal density φ(x).
pub fn normal_pdf(x: f64) -> f64 {
    (-0.5 * x * x).exp() / (2.0 * std::f64::consts::PI).sqrt()
}

/// Standard normal quantile Φ⁻¹(p), p ∈ (0, 1).
pub fn normal_quantile(p: f64) -> Result<f64> {
    if !(0.0 < p && p < 1.0) {
        return Err(Error::domain(format!(
            "normal quantile needs p in (0,1), got {p}"
        )));
    }
    let seed = Normal::new(0.0, 1.0)
        .expect("standard normal")
        .inverse_cdf(p);
    // One Halley step against our CDF.
    let e = normal_cdf(seed) - p;
    let d = normal_pdf(seed);
    if d > 0.0 {
        Ok(seed - e / d / (1.0 + e * seed / (2.0 * d)))
    } else {
        Ok(seed)
    }
}

/// Two-pass sample mean and (unbiased) variance.
pub fn mean_var(xs: &[f64]) -> (f64, f64) {
    let n = xs.len();
    if n == 0 {
        return (f64::NAN, f64::NAN);
    }
    let mean = xs.iter().sum::<f64>() / n as f64;
    if n == 1 {
        return (mean, 0.0);
    }
    let ss = xs.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>();
    (mean, ss / (n as f64 - 1.0))
}

/// Standard error of an empirical rate from `n` Bernoulli trials.
pub fn binomial_se(rate: f64, n: usize) -> f64 {
    if n == 0 {
        return f64::NAN;
    }
    (rate * (1.0 - rate) / n as f64).sqrt()
}

/// Survival function of the Kolmogorov distribution,
/// `Q(x) = 2 Σ_{k≥1} (-1)^{k-1} exp(-2 k² x²)`.
pub fn kolmogorov_sf(x: f64) -> f64 {
    if x <= 0.0 {
        return 1.0;
    }
    let mut sum = 0.0;
    for k in 1..=100 {
        let term = (-2.0 * (k as f64) * (k as f64) * x * x).exp();
        sum += if k % 2 == 1 { term } else { -term };
        if term < 1e-16 {
            break;
        }
    }
    (2.0 * sum).clamp(0.0, 1.0)
}

/// One-sample KS statistic of `xs` against a CDF `f`.
pub fn ks_statistic<F: Fn(f64) -> f64>(xs: &[f64], f: F) -> f64 {
    let mut sorted = xs.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let n = sorted.len() as f64;
    let mut d: f64 = 0.0;
    for (i, x) in sorted.iter().enumerate() {
        let fx = f(*x);
        d = d.max(((i + 1) as f64 / n - fx).abs());
        d = d.max((fx - i as f64 / n).abs());
    }
    d
}

/// One-sample KS test of normality: standardizes by the sample moments and
/// compares to Φ, with the asymptotic Kolmogorov p-value.
pub fn ks_normality_pvalue(xs: &[f64]) -> f64 {
    let (m, v) = mean_var(xs);
    let sd = v.sqrt();
    let d = ks_statistic(xs, |x| normal_cdf((x - m) / sd));
    kolmogorov_sf((xs.len() as f64).sqrt() * d)
}

/// Two-sample KS test p-value (asymptotic).
pub fn ks_two_sample_pvalue(xs: &[f64], ys: &[f64]) -> f64 {
    let mut a = xs.to_vec();
    let mut b = ys.to_vec();
    a.sort_by(|x, y| x.partial_cmp(y).unwrap());
    b.sort_by(|x, y| x.partial_cmp(y).unwrap());
    let (n, m) = (a.len(), b.len());
    let mut i = 0;
    let mut j = 0;
    let mut d: f64 = 0.0;
    while i < n && j < m {
        let x = a[i].min(b[j]);
        while i < n && a[i] <= x {
            i += 1;
        }
        while j < m && b[j] <= x {
            j += 1;
        }
        d = d.max((i as f64 / n as f64 - j as f64 / m as f64).abs());
    }
    let ne = (n * m) as f64 / (n + m) as f64;
    kolmogorov_sf(ne.sqrt() * d)
}
