//! Simulation of the spiked Gaussian model `Σ = σ²(I + VHV′)` and the
//! eigenvalue statistics every test consumes.
//!
//! Columns of the data matrix are i.i.d. `N(0, Σ)`. The non-trivial part of
//! the covariance root is rank `r`: `Σ^{1/2} = σ(I + V(√(I+H) - I)V′)`, so a
//! draw costs one `p×n` Gaussian fill plus an `O(prn)` correction. All
//! randomness flows through [`crate::rng::stream_rng`], so replicates are
//! reproducible and scheduling-independent.

use nalgebra::DMatrix;
use rand::Rng;
use rand_distr::StandardNormal;
use rand_xoshiro::Xoshiro256PlusPlus;

use crate::error::{Error, Result};
use crate::rng::stream_rng;

/// Spike magnitudes `h = (h_1, …, h_r)`, all finite and nonnegative.
#[derive(Debug, Clone, PartialEq)]
pub struct SpikeVector {
    values: Vec<f64>,
}

impl SpikeVector {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.iter().any(|h| !h.is_finite() || *h < 0.0) {
            return Err(Error::domain("spikes must be finite and nonnegative"));
        }
        Ok(SpikeVector { values })
    }

    /// The empty alternative (no spikes; the null model).
    pub fn empty() -> Self {
        SpikeVector { values: Vec::new() }
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Spikes scaled into units of `√c` (e.g. `(0.5, 0.2)` with `c = 0.25`
    /// gives `h = (0.25, 0.1)`).
    pub fn from_sqrt_c_units(units: &[f64], c: f64) -> Result<Self> {
        let s = c.sqrt();
        SpikeVector::new(units.iter().map(|u| u * s).collect())
    }

    /// True when every spike lies in `[0, √c - δ]`.
    pub fn within_contiguity(&self, c: f64, delta: f64) -> bool {
        self.values.iter().all(|h| *h <= c.sqrt() - delta)
    }

    /// Drops exact zeros (they contribute nothing to any likelihood).
    pub fn nonzero(&self) -> Vec<f64> {
        self.values.iter().copied().filter(|h| *h > 0.0).collect()
    }
}

impl std::ops::Deref for SpikeVector {
    type Target = [f64];

    fn deref(&self) -> &[f64] {
        &self.values
    }
}

/// How the spike directions `V` are chosen.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SpikeBasis {
    /// `V` = first `r` coordinate vectors. The eigenvalue law does not
    /// depend on `V`, so this is the cheap default.
    #[default]
    Canonical,
    /// `V` = random orthonormal `r`-frame, kept for validating that
    /// invariance.
    Haar,
}

/// Parameters of the spiked model.
#[derive(Debug, Clone)]
pub struct SpikedParams {
    pub p: usize,
    pub n: usize,
    pub spikes: SpikeVector,
    pub sigma2: f64,
    pub basis: SpikeBasis,
}

impl SpikedParams {
    pub fn new(
        p: usize,
        n: usize,
        spikes: SpikeVector,
        sigma2: f64,
        basis: SpikeBasis,
    ) -> Result<Self> {
        if p == 0 || n == 0 {
            return Err(Error::domain("p and n must be positive"));
        }
        if spikes.len() > p {
            return Err(Error::domain(format!(
                "r = {} spikes exceed dimension p = {p}",
                spikes.len()
            )));
        }
        if !(sigma2.is_finite() && sigma2 > 0.0) {
            return Err(Error::domain(format!(
                "sigma2 must be positive, got {sigma2}"
            )));
        }
        Ok(SpikedParams {
            p,
            n,
            spikes,
            sigma2,
            basis,
        })
    }

    /// Null model: white noise with unit variance.
    pub fn null(p: usize, n: usize) -> Self {
        SpikedParams {
            p,
            n,
            spikes: SpikeVector::empty(),
            sigma2: 1.0,
            basis: SpikeBasis::Canonical,
        }
    }

    pub fn cp(&self) -> f64 {
        self.p as f64 / self.n as f64
    }
}

/// Draws the `p×n` data matrix for `params`, deterministically in `seed`.
pub fn generate_data(params: &SpikedParams, seed: u64) -> DMatrix<f64> {
    let (p, n) = (params.p, params.n);
    let mut rng = stream_rng(seed, 0);
    // Column-major fill: observation by observation.
    let mut x = DMatrix::<f64>::zeros(p, n);
    for j in 0..n {
        for i in 0..p {
            x[(i, j)] = rng.sample::<f64, _>(StandardNormal);
        }
    }

    let h = params.spikes.values();
    if !h.is_empty() {
        let scale: Vec<f64> = h.iter().map(|h| (1.0 + h).sqrt() - 1.0).collect();
        match params.basis {
            SpikeBasis::Canonical => {
                for (j, s) in scale.iter().enumerate() {
                    for t in 0..n {
                        x[(j, t)] *= 1.0 + s;
                    }
                }
            }
            SpikeBasis::Haar => {
                let mut vrng = stream_rng(seed, 1);
                let v = haar_frame(p, h.len(), &mut vrng);
                // X += V diag(scale) V'X.
                let vtx = v.transpose() * &x;
                let mut corr = vtx;
                for (j, s) in scale.iter().enumerate() {
                    corr.row_mut(j).scale_mut(*s);
                }
                x += &v * corr;
            }
        }
    }

    if params.sigma2 != 1.0 {
        x.scale_mut(params.sigma2.sqrt());
    }
    x
}

/// Eigenvalue statistics of a sample covariance matrix.
///
/// `lambda` holds the `m = min(p, n)` nonzero eigenvalues of `(1/n)XX′` in
/// descending order; the remaining `p - m` eigenvalues are exactly zero and
/// enter the formulas implicitly. `s_p` is the full trace, and `mu` the
/// first `m - 1` trace-normalized eigenvalues.
#[derive(Debug, Clone)]
pub struct EigenData {
    lambda: Vec<f64>,
    s_p: f64,
    mu: Vec<f64>,
    p: usize,
    n: usize,
}

impl EigenData {
    /// Builds from precomputed nonzero eigenvalues (descending or not).
    pub fn from_eigenvalues(mut lambda: Vec<f64>, p: usize, n: usize) -> Result<Self> {
        let m = p.min(n);
        if lambda.len() != m {
            return Err(Error::invalid(format!(
                "expected m = min(p,n) = {m} eigenvalues, got {}",
                lambda.len()
            )));
        }
        if lambda.iter().any(|l| !l.is_finite() || *l < 0.0) {
            return Err(Error::invalid("eigenvalues must be finite and nonnegative"));
        }
        lambda.sort_by(|a, b| b.partial_cmp(a).unwrap());
        let s_p: f64 = lambda.iter().sum();
        if s_p <= 0.0 {
            return Err(Error::invalid("trace must be positive"));
        }
        let mu = lambda[..m - 1].iter().map(|l| l / s_p).collect();
        Ok(EigenData {
            lambda,
            s_p,
            mu,
            p,
            n,
        })
    }

    /// Nonzero eigenvalues, descending.
    pub fn lambda(&self) -> &[f64] {
        &self.lambda
    }

    pub fn lambda_max(&self) -> f64 {
        self.lambda[0]
    }

    /// Trace of `(1/n)XX′` (= sum of all `p` eigenvalues).
    pub fn s_p(&self) -> f64 {
        self.s_p
    }

    /// Trace-normalized eigenvalues `λ_i / S_p`, `i = 1..m-1`.
    pub fn mu(&self) -> &[f64] {
        &self.mu
    }

    pub fn p(&self) -> usize {
        self.p
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.lambda.len()
    }

    /// Count of implicit zero eigenvalues, `p - m`.
    pub fn zero_count(&self) -> usize {
        self.p - self.lambda.len()
    }

    pub fn cp(&self) -> f64 {
        self.p as f64 / self.n as f64
    }

    /// Rescales all eigenvalues by `k > 0` (e.g. dividing out a known σ²).
    pub fn scaled(&self, k: f64) -> Result<Self> {
        if !(k.is_finite() && k > 0.0) {
            return Err(Error::domain(format!("scale must be positive, got {k}")));
        }
        EigenData::from_eigenvalues(self.lambda.iter().map(|l| l * k).collect(), self.p, self.n)
    }
}

/// Eigenvalue statistics of `(1/n)XX′`, computed from the smaller Gram
/// matrix when `p > n`.
pub fn eigen_data(x: &DMatrix<f64>) -> Result<EigenData> {
    let (p, n) = (x.nrows(), x.ncols());
    if p == 0 || n == 0 {
        return Err(Error::invalid("matrix must be nonempty"));
    }
    if x.iter().any(|v| !v.is_finite()) {
        return Err(Error::invalid("matrix contains non-finite entries"));
    }
    let gram = if p <= n {
        x * x.transpose() / n as f64
    } else {
        x.transpose() * x / n as f64
    };
    let eigvals = gram.symmetric_eigenvalues();
    let lmax = eigvals.max();
    if !lmax.is_finite() {
        return Err(Error::numerical(
            "symmetric eigensolver produced non-finite values",
        ));
    }
    // A Gram matrix is PSD; tolerate eigensolver roundoff near zero.
    let floor = -1e-10 * lmax.max(1.0);
    let mut lambda = Vec::with_capacity(eigvals.len());
    for l in eigvals.iter() {
        if *l < floor {
            return Err(Error::numerical(format!(
                "Gram matrix eigenvalue {l} is negative beyond roundoff"
            )));
        }
        lambda.push(l.max(0.0));
    }
    EigenData::from_eigenvalues(lambda, p, n)
}

/// Haar-distributed orthonormal `r`-frame in `ℝ^p` (the first `r` columns
/// of a Haar orthogonal matrix): QR of a Gaussian matrix with the sign
/// correction that makes the factorization unique.
pub fn haar_frame(p: usize, r: usize, rng: &mut Xoshiro256PlusPlus) -> DMatrix<f64> {
    assert!(r <= p, "frame width exceeds dimension");
    let g = DMatrix::<f64>::from_fn(p, r, |_, _| rng.sample::<f64, _>(StandardNormal));
    let qr = g.qr();
    let rmat = qr.r();
    let mut q = qr.q();
    for j in 0..r {
        if rmat[(j, j)] < 0.0 {
            q.column_mut(j).neg_mut();
        }
    }
    q
}

/// Haar-distributed `p×p` orthogonal matrix, deterministic in `seed`.
pub fn haar_orthogonal(p: usize, seed: u64) -> Result<DMatrix<f64>> {
    if p == 0 {
        return Err(Error::domain("dimension must be positive"));
    }
    let mut rng = stream_rng(seed, 0);
    Ok(haar_frame(p, p, &mut rng))
}

/// Sum of squares of all entries divided by n: `tr((1/n)XX′)` without
/// forming the Gram matrix.
pub fn trace_covariance(x: &DMatrix<f64>) -> f64 {
    x.iter().map(|v| v * v).sum::<f64>() / x.ncols() as f64
}
