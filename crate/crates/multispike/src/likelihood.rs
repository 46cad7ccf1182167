//! Log-likelihood-ratio processes for the eigenvalues (`λ`) and the
//! trace-normalized eigenvalues (`μ`) of the sample covariance matrix,
//! evaluated at multispiked alternatives.
//!
//! Three routes to the same object live here:
//!
//! * [`loglik_lambda`] / [`loglik_mu`]: the asymptotic closed forms built
//!   from the centered linear spectral statistic [`delta_p`] and the
//!   closed-form MP log-integral — cheap enough to evaluate on grids.
//! * [`spherical_log_asymptotic`]: the second-order expansion of the
//!   orthogonal-group integral `∫ exp(p·tr(ΘQ′ΛQ)) (dQ)` that the closed
//!   forms are derived from; kept separate as an internal consistency route.
//! * [`spherical_integral_mc`] / [`exact_loglik_lambda_mc`]: Monte Carlo of
//!   the *exact* finite-p likelihood ratio via Haar frames, the oracle that
//!   the asymptotic formulas are validated against.
//!
//! Throughout, the reference law should be `MpLaw::for_dims(p, n)` for the
//! data at hand: the centering terms are all relative to the finite-`p`
//! aspect ratio `c_p = p/n`.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::mp::MpLaw;
use crate::rng::stream_rng;
use crate::sim::{haar_frame, EigenData, SpikeVector};

/// Exponent parameters `θ = (θ_1, …, θ_r)` of the spherical integral, with
/// the derived values `v_j = R(2θ_j)` of the R-transform.
///
/// For spike-induced parameters `θ_j = h_j/(2c(1+h_j))` the identity
/// `v_j = 1 + h_j` holds exactly.
#[derive(Debug, Clone, PartialEq)]
pub struct ThetaSpec {
    theta: Vec<f64>,
    v: Vec<f64>,
    admissible: bool,
}

impl ThetaSpec {
    /// Derives `v_j = R(2θ_j) = 1/(1 - 2cθ_j)` and records whether every
    /// `2θ_j` is admissible (lies in the image of the Hilbert transform).
    ///
    /// Non-admissible specs are still legal inputs for the Monte Carlo
    /// estimator, which is exact for any θ; only the second-order
    /// asymptotics require admissibility. Zero entries are rejected.
    pub fn new(law: &MpLaw, theta: Vec<f64>) -> Result<Self> {
        let c = law.c();
        let mut v = Vec::with_capacity(theta.len());
        let mut admissible = true;
        for t in &theta {
            if !t.is_finite() || *t == 0.0 {
                return Err(Error::domain("θ entries must be finite and nonzero"));
            }
            let denom = 1.0 - 2.0 * c * t;
            let vj = if denom == 0.0 {
                f64::INFINITY
            } else {
                1.0 / denom
            };
            admissible &= law.in_hilbert_image(2.0 * t) && vj.is_finite();
            v.push(vj);
        }
        Ok(ThetaSpec {
            theta,
            v,
            admissible,
        })
    }

    /// Spike-induced parameters: `θ_j = h_j/(2c(1+h_j))`, `v_j = 1 + h_j`.
    /// Every spike must lie in `(0, √c)`.
    pub fn from_spikes(law: &MpLaw, spikes: &[f64]) -> Result<Self> {
        let c = law.c();
        let sqrt_c = c.sqrt();
        let mut theta = Vec::with_capacity(spikes.len());
        let mut v = Vec::with_capacity(spikes.len());
        for h in spikes {
            if !(h.is_finite() && *h > 0.0 && *h < sqrt_c) {
                return Err(Error::domain(format!(
                    "spike must lie in (0, √c) = (0, {sqrt_c:.6}), got {h}"
                )));
            }
            theta.push(h / (2.0 * c * (1.0 + h)));
            v.push(1.0 + h);
        }
        Ok(ThetaSpec {
            theta,
            v,
            admissible: true,
        })
    }

    pub fn theta(&self) -> &[f64] {
        &self.theta
    }

    pub fn v(&self) -> &[f64] {
        &self.v
    }

    /// Whether every `2θ_j` lies in the admissible image; required by the
    /// second-order asymptotics, irrelevant to the Monte Carlo estimator.
    pub fn admissible(&self) -> bool {
        self.admissible
    }

    /// Number of nonzero exponent directions.
    pub fn r(&self) -> usize {
        self.theta.len()
    }
}

/// The centered linear spectral statistic
/// `Δ_p(z₀) = Σ_i ln(z₀ - λ_i) - p ∫ ln(z₀ - λ) dF^MP(λ)`
/// at the inverse point `z₀ = z₀(h)`; the `p - m` zero eigenvalues
/// contribute `ln z₀` each.
pub fn delta_p(eig: &EigenData, law: &MpLaw, h: f64) -> Result<f64> {
    let z0 = law.z0(h)?;
    if z0 <= eig.lambda_max() {
        return Err(Error::domain(format!(
            "z0(h) = {z0:.6} does not exceed λ_max = {:.6}: spike too large relative to the sample",
            eig.lambda_max()
        )));
    }
    let mut sum = 0.0;
    for l in eig.lambda() {
        sum += (z0 - l).ln();
    }
    sum += eig.zero_count() as f64 * z0.ln();
    Ok(sum - eig.p() as f64 * law.log_integral(h)?)
}

/// Asymptotic log-likelihood ratio of the eigenvalue data at spikes `h`:
/// `Σ_j [ -½ Δ_p(z_j0) + ½ Σ_{s≤j} ln(1 - h_j h_s / c) ]`.
///
/// Exact zeros in `h` contribute nothing and are dropped; `h = 0` gives 0.
pub fn loglik_lambda(eig: &EigenData, law: &MpLaw, spikes: &SpikeVector) -> Result<f64> {
    let h = spikes.nonzero();
    let c = law.c();
    let mut total = 0.0;
    for (j, hj) in h.iter().enumerate() {
        total -= 0.5 * delta_p(eig, law, *hj)?;
        for hs in &h[..=j] {
            let arg = 1.0 - hj * hs / c;
            if arg <= 0.0 {
                return Err(Error::domain(format!(
                    "h_j h_s = {} reaches the contiguity boundary c = {c}",
                    hj * hs
                )));
            }
            total += 0.5 * arg.ln();
        }
    }
    Ok(total)
}

/// Asymptotic log-likelihood ratio of the trace-normalized data:
/// `loglik_lambda + (Σ h_j)²/(4c) - (S_p - p)·(Σ h_j)/(2c)`.
///
/// The statistic is a function of `μ` alone, so the eigenvalues are first
/// rescaled to trace `p` (after which the `S_p - p` term vanishes). This
/// agrees with the displayed formula whenever the input is already
/// trace-normalized, and makes the operation exactly scale-invariant, which
/// the raw formula is only up to the asymptotic error.
pub fn loglik_mu(eig: &EigenData, law: &MpLaw, spikes: &SpikeVector) -> Result<f64> {
    let p = eig.p() as f64;
    let normalized = eig.scaled(p / eig.s_p())?;
    let base = loglik_lambda(&normalized, law, spikes)?;
    let c = law.c();
    let sum_h: f64 = spikes.values().iter().sum();
    Ok(base + sum_h * sum_h / (4.0 * c))
}

/// Second-order asymptotics of the log spherical integral
/// `ln ∫ exp(p·tr(ΘQ′ΛQ)) (dQ)`:
///
/// `p Σ_j [θ_j v_j - (1/2p) Σ_i ln(1 + 2θ_j v_j - 2θ_j λ_i)]
///  + Σ_j Σ_{s≤j} ½ ln(1 - 4 θ_j v_j θ_s v_s c)`.
pub fn spherical_log_asymptotic(theta: &ThetaSpec, eig: &EigenData, law: &MpLaw) -> Result<f64> {
    if !theta.admissible() {
        return Err(Error::domain(
            "θ is outside the admissible image; the second-order expansion does not apply",
        ));
    }
    let c = law.c();
    let p = eig.p() as f64;
    let mut total = 0.0;
    for (tj, vj) in theta.theta().iter().zip(theta.v()) {
        let shift = 1.0 + 2.0 * tj * vj;
        let mut logsum = 0.0;
        for l in eig.lambda() {
            let arg = shift - 2.0 * tj * l;
            if arg <= 0.0 {
                return Err(Error::domain(format!(
                    "1 + 2θv - 2θλ = {arg} is nonpositive at λ = {l}"
                )));
            }
            logsum += arg.ln();
        }
        if shift <= 0.0 {
            return Err(Error::domain(format!("1 + 2θv = {shift} is nonpositive")));
        }
        logsum += eig.zero_count() as f64 * shift.ln();
        total += p * tj * vj - 0.5 * logsum;
    }
    for j in 0..theta.r() {
        for s in 0..=j {
            let arg = 1.0 - 4.0 * theta.theta[j] * theta.v[j] * theta.theta[s] * theta.v[s] * c;
            if arg <= 0.0 {
                return Err(Error::domain(format!(
                    "1 - 4θ_j v_j θ_s v_s c = {arg} is nonpositive"
                )));
            }
            total += 0.5 * arg.ln();
        }
    }
    Ok(total)
}

/// Monte Carlo estimate of the spherical integral, carried in log scale.
#[derive(Debug, Clone, Copy)]
pub struct SphericalIntegralMc {
    /// `ln` of the Monte Carlo mean.
    pub log_mean: f64,
    /// Relative standard error of the mean (equals the standard error of
    /// `log_mean` to first order).
    pub rel_std_error: f64,
    pub draws: usize,
}

impl SphericalIntegralMc {
    /// The mean on the linear scale; may overflow to `+∞` for large
    /// exponents, which is why the log form is primary.
    pub fn estimate(&self) -> f64 {
        self.log_mean.exp()
    }

    pub fn std_error(&self) -> f64 {
        self.estimate() * self.rel_std_error
    }
}

/// Monte Carlo average of `exp(p·tr(ΘQ′ΛQ))` over Haar draws.
///
/// Only the top-left `r×r` block of `Q′ΛQ` enters, so each draw samples an
/// orthonormal `r`-frame instead of a full `p×p` matrix. Exponents are
/// accumulated with a max shift, so the estimate cannot overflow
/// internally. Draws are independent streams of `seed` and the result does
/// not depend on the number of worker threads.
pub fn spherical_integral_mc(
    theta: &ThetaSpec,
    eig: &EigenData,
    draws: usize,
    seed: u64,
) -> Result<SphericalIntegralMc> {
    if draws == 0 {
        return Err(Error::invalid("need at least one draw"));
    }
    if theta.r() > eig.p() {
        return Err(Error::domain("more exponent directions than dimensions"));
    }
    if theta.r() == 0 {
        // Θ = 0: the integrand is identically 1.
        return Ok(SphericalIntegralMc {
            log_mean: 0.0,
            rel_std_error: 0.0,
            draws,
        });
    }
    let p = eig.p();
    let r = theta.r();
    let pf = p as f64;
    let lambda = eig.lambda();

    let exponents: Vec<f64> = (0..draws)
        .into_par_iter()
        .map(|d| {
            let mut rng = stream_rng(seed, d as u64);
            let q = haar_frame(p, r, &mut rng);
            let mut e = 0.0;
            for (j, tj) in theta.theta().iter().enumerate() {
                let col = q.column(j);
                // Zero eigenvalues beyond m contribute nothing.
                let quad: f64 = lambda.iter().zip(col.iter()).map(|(l, q)| l * q * q).sum();
                e += tj * quad;
            }
            pf * e
        })
        .collect();

    let max = exponents.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let shifted: Vec<f64> = exponents.iter().map(|e| (e - max).exp()).collect();
    let mean = shifted.iter().sum::<f64>() / draws as f64;
    let var =
        shifted.iter().map(|s| (s - mean) * (s - mean)).sum::<f64>() / (draws.max(2) - 1) as f64;
    let rel_se = (var / draws as f64).sqrt() / mean;
    Ok(SphericalIntegralMc {
        log_mean: max + mean.ln(),
        rel_std_error: rel_se,
        draws,
    })
}

/// A Monte Carlo log-likelihood value with its standard error.
#[derive(Debug, Clone, Copy)]
pub struct LogLikMc {
    pub estimate: f64,
    pub std_error: f64,
    pub draws: usize,
}

/// Monte Carlo estimate of the *exact* log-likelihood ratio
/// `ln L(h; λ) = -(n/2) Σ_j ln(1+h_j) + ln ∫ exp(p·tr(D_p Q′ΛQ)) (dQ)`,
/// with the integral estimated by [`spherical_integral_mc`] and the
/// standard error mapped through the logarithm.
pub fn exact_loglik_lambda_mc(
    eig: &EigenData,
    law: &MpLaw,
    spikes: &SpikeVector,
    draws: usize,
    seed: u64,
) -> Result<LogLikMc> {
    let h = spikes.nonzero();
    if h.is_empty() {
        return Ok(LogLikMc {
            estimate: 0.0,
            std_error: 0.0,
            draws,
        });
    }
    let theta = ThetaSpec::from_spikes(law, &h)?;
    let mc = spherical_integral_mc(&theta, eig, draws, seed)?;
    let n2 = eig.n() as f64 / 2.0;
    let offset: f64 = h.iter().map(|h| (1.0 + h).ln()).sum::<f64>() * n2;
    Ok(LogLikMc {
        estimate: mc.log_mean - offset,
        std_error: mc.rel_std_error,
        draws,
    })
}
