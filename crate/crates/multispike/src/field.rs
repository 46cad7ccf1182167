//! The limiting Gaussian log-likelihood fields: covariance kernels, grid
//! simulation, sup-LR critical values, and asymptotic powers via the
//! third-lemma mean shift.
//!
//! Under the null the log-likelihood process converges to a Gaussian field
//! `L(h)` with `E L(h) = -½ Var L(h)` and the kernels implemented by
//! [`FieldKernel::cov`]. Under a point alternative `h*` the same field is
//! shifted by `cov(h, h*)`. Everything here is indexed on finite grids,
//! uniform in the local parameter `θ = √(-ln(1-h²/c))`, in which the λ
//! kernel does not depend on `c` at all.

use nalgebra::{Cholesky, DMatrix};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::likelihood::{loglik_lambda, loglik_mu};
use crate::mp::MpLaw;
use crate::rng::{derive_seed, stream_rng};
use crate::sim::{EigenData, SpikeVector};
use crate::stats::binomial_se;

/// Which data reduction the field describes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FieldVariant {
    /// Eigenvalue experiment (σ² specified).
    Lambda,
    /// Trace-normalized experiment (σ² unspecified).
    Mu,
}

/// Covariance kernel of the limiting field for one aspect ratio.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FieldKernel {
    pub variant: FieldVariant,
    pub c: f64,
}

impl FieldKernel {
    pub fn new(variant: FieldVariant, c: f64) -> Result<Self> {
        if !(c.is_finite() && c > 0.0) {
            return Err(Error::domain(format!(
                "aspect ratio must be positive, got {c}"
            )));
        }
        Ok(FieldKernel { variant, c })
    }

    /// `Cov(L(h), L(g))`: `-½ Σ_{i,j} ln(1 - h_i g_j / c)` for the λ field,
    /// with the extra `- h_i g_j / c` inside the sum for the μ field.
    pub fn cov(&self, h: &[f64], g: &[f64]) -> Result<f64> {
        let mut total = 0.0;
        for hi in h {
            for gj in g {
                let x = hi * gj / self.c;
                if x >= 1.0 {
                    return Err(Error::domain(format!(
                        "h_i g_j = {} reaches the contiguity boundary c = {}",
                        hi * gj,
                        self.c
                    )));
                }
                total -= 0.5
                    * match self.variant {
                        FieldVariant::Lambda => (1.0 - x).ln(),
                        FieldVariant::Mu => (1.0 - x).ln() + x,
                    };
            }
        }
        Ok(total)
    }

    /// `E L(h) = -½ Var L(h) = -½ cov(h, h)`.
    pub fn mean(&self, h: &[f64]) -> Result<f64> {
        Ok(-0.5 * self.cov(h, h)?)
    }

    /// `Var L(h) = cov(h, h)`, the quantity `W(h)` of the power formulas.
    pub fn variance(&self, h: &[f64]) -> Result<f64> {
        self.cov(h, h)
    }
}

/// Local parameter `θ = √(-ln(1 - h²/c))` of a single spike `h ∈ [0, √c)`.
pub fn theta_of_h(h: f64, c: f64) -> Result<f64> {
    if !(h.is_finite() && (0.0..c.sqrt()).contains(&h)) {
        return Err(Error::domain(format!(
            "h must lie in [0, √c) = [0, {:.6})",
            c.sqrt()
        )));
    }
    Ok((-(1.0 - h * h / c).ln()).sqrt())
}

/// Inverse of [`theta_of_h`]: `h = √(c·(1 - e^{-θ²}))` for `θ ≥ 0`.
pub fn h_of_theta(theta: f64, c: f64) -> Result<f64> {
    if !(theta.is_finite() && theta >= 0.0) {
        return Err(Error::domain(format!("θ must be nonnegative, got {theta}")));
    }
    Ok((c * (1.0 - (-theta * theta).exp())).sqrt())
}

/// Grid-construction parameters. The per-axis grid is uniform in θ on
/// `[theta_min, min(theta_max, θ(√c - δ))]`: the box is truncated so all
/// points stay at distance δ from the contiguity boundary.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GridSpec {
    pub r: usize,
    pub points_per_axis: usize,
    /// Distance of the grid from the boundary `√c`. `None` picks
    /// `0.05·√c`, shrunk when necessary so the cap does not cut into the
    /// requested `theta_max` (the θ-grid then stays independent of `c`
    /// either way).
    pub delta: Option<f64>,
    pub theta_min: f64,
    pub theta_max: f64,
}

impl Default for GridSpec {
    fn default() -> Self {
        GridSpec {
            r: 2,
            points_per_axis: 30,
            delta: None,
            theta_min: 0.05,
            theta_max: 3.0,
        }
    }
}

impl GridSpec {
    pub fn delta_for(&self, c: f64) -> f64 {
        let s = c.sqrt();
        match self.delta {
            Some(d) => d,
            None => {
                let from_theta = h_of_theta(self.theta_max, c)
                    .map(|h| s - h)
                    .unwrap_or(0.05 * s);
                (0.05 * s).min(from_theta)
            }
        }
    }
}

/// A finite grid over spike space with the precomputed mean vector and the
/// lower-triangular factor of the kernel matrix.
#[derive(Debug, Clone)]
pub struct FieldGrid {
    kernel: FieldKernel,
    r: usize,
    points: Vec<Vec<f64>>,
    mean: Vec<f64>,
    chol: DMatrix<f64>,
    jitter: f64,
}

/// JSON-facing summary of a grid (points, means, jitter actually applied).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GridSummary {
    pub kernel: FieldKernel,
    pub r: usize,
    pub points: Vec<Vec<f64>>,
    pub mean: Vec<f64>,
    pub jitter: f64,
}

/// Discretizes the field index set: per-axis θ-uniform points mapped
/// through [`h_of_theta`], Cartesian product over `r` axes.
pub fn build_grid(kernel: FieldKernel, spec: &GridSpec) -> Result<FieldGrid> {
    if spec.r == 0 || spec.r > 3 {
        return Err(Error::domain(format!(
            "grids are supported for 1 ≤ r ≤ 3 spikes, got r = {}",
            spec.r
        )));
    }
    if spec.points_per_axis < 2 {
        return Err(Error::domain("need at least 2 points per axis"));
    }
    let c = kernel.c;
    let delta = spec.delta_for(c);
    if !(delta > 0.0 && delta < c.sqrt()) {
        return Err(Error::domain(format!("δ must lie in (0, √c), got {delta}")));
    }
    let theta_cap = theta_of_h(c.sqrt() - delta, c)?;
    let hi = spec.theta_max.min(theta_cap);
    let lo = spec.theta_min;
    if !(lo > 0.0 && lo < hi) {
        return Err(Error::domain(format!(
            "empty θ-range [{lo}, {hi}] after truncation at √c - δ"
        )));
    }
    let ppa = spec.points_per_axis;
    let axis: Vec<f64> = (0..ppa)
        .map(|i| lo + (hi - lo) * i as f64 / (ppa - 1) as f64)
        .map(|t| h_of_theta(t, c))
        .collect::<Result<_>>()?;

    let total = ppa.pow(spec.r as u32);
    let mut points = Vec::with_capacity(total);
    for idx in 0..total {
        let mut point = Vec::with_capacity(spec.r);
        let mut rem = idx;
        for _ in 0..spec.r {
            point.push(axis[rem % ppa]);
            rem /= ppa;
        }
        points.push(point);
    }
    FieldGrid::from_points(kernel, points)
}

impl FieldGrid {
    /// Builds a grid from explicit points (used for single-point tests and
    /// custom index sets). Points must be distinct: a duplicated point makes
    /// the kernel matrix exactly singular.
    pub fn from_points(kernel: FieldKernel, points: Vec<Vec<f64>>) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::domain("grid needs at least one point"));
        }
        let r = points[0].len();
        if points.iter().any(|p| p.len() != r) {
            return Err(Error::invalid(
                "grid points must share a common spike count",
            ));
        }
        for (i, p) in points.iter().enumerate() {
            for q in points.iter().skip(i + 1) {
                if p == q {
                    return Err(Error::numerical(format!(
                        "duplicate grid point {p:?} makes the kernel singular; factorization failure"
                    )));
                }
            }
        }
        let g = points.len();
        let mut k = DMatrix::<f64>::zeros(g, g);
        for i in 0..g {
            for j in 0..=i {
                let v = kernel.cov(&points[i], &points[j])?;
                k[(i, j)] = v;
                k[(j, i)] = v;
            }
        }
        let mean: Vec<f64> = (0..g).map(|i| -0.5 * k[(i, i)]).collect();

        let max_diag = (0..g)
            .map(|i| k[(i, i)])
            .fold(0.0_f64, f64::max)
            .max(1e-300);
        let mut applied = 0.0;
        let mut chol: Option<Cholesky<f64, nalgebra::Dyn>> = Cholesky::new(k.clone());
        if chol.is_none() {
            // Jitter escalation by decades.
            for exp in -12..=-8 {
                let jit = 10f64.powi(exp) * max_diag;
                let mut kj = k.clone();
                for i in 0..g {
                    kj[(i, i)] += jit;
                }
                if let Some(f) = Cholesky::new(kj) {
                    applied = jit;
                    chol = Some(f);
                    break;
                }
            }
        }
        let chol = chol.ok_or_else(|| {
            Error::numerical(
                "kernel factorization failed even with jitter 1e-8: grid too fine or too close to the boundary",
            )
        })?;
        Ok(FieldGrid {
            kernel,
            r,
            points,
            mean,
            chol: chol.unpack(),
            jitter: applied,
        })
    }

    pub fn kernel(&self) -> FieldKernel {
        self.kernel
    }

    pub fn r(&self) -> usize {
        self.r
    }

    pub fn points(&self) -> &[Vec<f64>] {
        &self.points
    }

    pub fn mean(&self) -> &[f64] {
        &self.mean
    }

    /// Jitter added to the kernel diagonal before factorization (0 when the
    /// plain Cholesky succeeded).
    pub fn jitter(&self) -> f64 {
        self.jitter
    }

    /// Max-norm relative residual `‖LL' - K‖ / ‖K‖` of the factorization.
    pub fn factorization_residual(&self) -> f64 {
        let g = self.points.len();
        let mut k = DMatrix::<f64>::zeros(g, g);
        for i in 0..g {
            for j in 0..g {
                k[(i, j)] = self.kernel.cov(&self.points[i], &self.points[j]).unwrap();
            }
        }
        let rebuilt = &self.chol * self.chol.transpose();
        (rebuilt - &k).abs().max() / k.abs().max().max(1e-300)
    }

    /// The shift vector `cov(point_i, h*)` implementing the third-lemma
    /// change of measure to the alternative `h*`.
    pub fn shift_vector(&self, h_star: &[f64]) -> Result<Vec<f64>> {
        self.points
            .iter()
            .map(|p| self.kernel.cov(p, h_star))
            .collect()
    }

    /// One field draw written into `out`, using the supplied normal deviates.
    fn draw_into(&self, z: &[f64], shift: Option<&[f64]>, out: &mut [f64]) {
        let g = self.points.len();
        match shift {
            Some(s) => {
                for i in 0..g {
                    out[i] = self.mean[i] + s[i];
                }
            }
            None => out.copy_from_slice(&self.mean),
        }
        // Lower-triangular multiply, column by column.
        for (k, zk) in z.iter().enumerate() {
            let col = self.chol.column(k);
            for i in k..g {
                out[i] += col[i] * zk;
            }
        }
    }

    /// Per-draw suprema of the field over the grid, optionally under the
    /// alternative `shift_at`. Draw `d` uses stream `d` of `seed`, so the
    /// output is independent of worker count, and grids whose points share
    /// a common prefix couple draw-by-draw under the same seed.
    pub fn simulate_sup(
        &self,
        shift_at: Option<&[f64]>,
        draws: usize,
        seed: u64,
    ) -> Result<Vec<f64>> {
        if draws == 0 {
            return Err(Error::invalid("need at least one draw"));
        }
        let shift = match shift_at {
            Some(h) => Some(self.shift_vector(h)?),
            None => None,
        };
        let g = self.points.len();
        let sups: Vec<f64> = (0..draws)
            .into_par_iter()
            .map(|d| {
                let mut rng = stream_rng(seed, d as u64);
                let z: Vec<f64> = (0..g)
                    .map(|_| rand::Rng::sample::<f64, _>(&mut rng, rand_distr::StandardNormal))
                    .collect();
                let mut x = vec![0.0; g];
                self.draw_into(&z, shift.as_deref(), &mut x);
                x.iter().copied().fold(f64::NEG_INFINITY, f64::max)
            })
            .collect();
        Ok(sups)
    }

    /// Empirical `(1-α)` quantile of the null sup distribution.
    pub fn critical_value(&self, alpha: f64, draws: usize, seed: u64) -> Result<f64> {
        if !(0.0 < alpha && alpha < 1.0) {
            return Err(Error::domain(format!(
                "alpha must lie in (0,1), got {alpha}"
            )));
        }
        if (draws as f64) < 100.0 / alpha {
            return Err(Error::invalid(format!(
                "{draws} draws are too few for the {alpha} tail; need at least {}",
                (100.0 / alpha).ceil()
            )));
        }
        let mut sups = self.simulate_sup(None, draws, seed)?;
        sups.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let k = ((1.0 - alpha) * draws as f64).ceil() as usize;
        Ok(sups[k.clamp(1, draws) - 1])
    }

    /// Asymptotic power of the sup-LR test against `h_star`: the fraction
    /// of shifted sup draws exceeding the critical value simulated on this
    /// grid with an independent seed stream.
    pub fn asymptotic_power(
        &self,
        alpha: f64,
        h_star: &[f64],
        draws: usize,
        seed: u64,
    ) -> Result<(f64, f64)> {
        let cv = self.critical_value(alpha, draws, derive_seed(seed, 0x_c5))?;
        let powers = self.power_batch(cv, &[h_star.to_vec()], draws, derive_seed(seed, 0x_9e))?;
        Ok(powers[0])
    }

    /// Powers against many alternatives reusing one batch of field draws
    /// (the draws couple across targets, so monotone shifts give monotone
    /// powers draw-by-draw). Returns `(power, binomial_se)` per target.
    pub fn power_batch(
        &self,
        critical: f64,
        targets: &[Vec<f64>],
        draws: usize,
        seed: u64,
    ) -> Result<Vec<(f64, f64)>> {
        if draws == 0 {
            return Err(Error::invalid("need at least one draw"));
        }
        let shifts: Vec<Vec<f64>> = targets
            .iter()
            .map(|t| self.shift_vector(t))
            .collect::<Result<_>>()?;
        let g = self.points.len();

        let counts = (0..draws)
            .into_par_iter()
            .fold(
                || vec![0usize; targets.len()],
                |mut acc, d| {
                    let mut rng = stream_rng(seed, d as u64);
                    let z: Vec<f64> = (0..g)
                        .map(|_| rand::Rng::sample::<f64, _>(&mut rng, rand_distr::StandardNormal))
                        .collect();
                    let mut base = vec![0.0; g];
                    self.draw_into(&z, None, &mut base);
                    for (t, shift) in shifts.iter().enumerate() {
                        let sup = base
                            .iter()
                            .zip(shift)
                            .map(|(b, s)| b + s)
                            .fold(f64::NEG_INFINITY, f64::max);
                        if sup > critical {
                            acc[t] += 1;
                        }
                    }
                    acc
                },
            )
            .reduce(
                || vec![0usize; targets.len()],
                |mut a, b| {
                    for (x, y) in a.iter_mut().zip(b) {
                        *x += y;
                    }
                    a
                },
            );

        Ok(counts
            .into_iter()
            .map(|cnt| {
                let rate = cnt as f64 / draws as f64;
                (rate, binomial_se(rate, draws))
            })
            .collect())
    }

    /// Finite-sample sup-LR statistic: the maximum of the log-likelihood
    /// over the grid points.
    ///
    /// A grid point whose `z₀(h_j)` is not above `λ_max` sits past the
    /// data's eigenvalue phase transition: the likelihood ratio there is
    /// overwhelming, so the statistic is `+∞` (certain rejection).
    pub fn sup_statistic(&self, eig: &EigenData, law: &MpLaw) -> Result<f64> {
        // The μ statistic is a function of the trace-normalized data.
        let owned;
        let (eval_eig, mu_term) = match self.kernel.variant {
            FieldVariant::Lambda => (eig, false),
            FieldVariant::Mu => {
                owned = eig.scaled(eig.p() as f64 / eig.s_p())?;
                (&owned, true)
            }
        };
        let lmax = eval_eig.lambda_max();
        let mut best = f64::NEG_INFINITY;
        for point in &self.points {
            let valid = point
                .iter()
                .filter(|h| **h > 0.0)
                .try_fold(true, |ok, h| law.z0(*h).map(|z| ok && z > lmax))?;
            if !valid {
                return Ok(f64::INFINITY);
            }
            let sv = SpikeVector::new(point.clone())?;
            let value = if mu_term {
                loglik_mu(eval_eig, law, &sv)?
            } else {
                loglik_lambda(eval_eig, law, &sv)?
            };
            best = best.max(value);
        }
        Ok(best)
    }

    pub fn summary(&self) -> GridSummary {
        GridSummary {
            kernel: self.kernel,
            r: self.r,
            points: self.points.clone(),
            mean: self.mean.clone(),
            jitter: self.jitter,
        }
    }
}
