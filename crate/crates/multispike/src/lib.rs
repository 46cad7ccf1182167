//! Signal detection in high-dimensional sample covariance spectra:
//! likelihood-ratio processes for multispiked alternatives, their Gaussian
//! limit fields, asymptotic power envelopes, and the finite-sample and
//! asymptotic behavior of the standard sphericity tests.
//!
//! The model is `Σ = σ²(I + VHV′)` with `r` spikes `h_j ≥ 0` observed
//! through `n` Gaussian samples in dimension `p`, with `c = p/n` held
//! fixed. The null is sphericity (`h = 0`); alternatives inside the
//! contiguity region `h ∈ [0, √c)^r` are where the asymptotic theory
//! lives.
//!
//! Module map:
//!
//! * [`mp`] — Marchenko–Pastur law: density, Hilbert/K/R transforms, the
//!   admissible domains, and the closed-form log-integral behind the
//!   likelihood formulas.
//! * [`sim`] — the spiked Gaussian model, eigenvalue extraction, Haar
//!   orthogonal sampling.
//! * [`likelihood`] — log-likelihood-ratio processes for the eigenvalues
//!   and their trace-normalized version, plus the exact-likelihood Monte
//!   Carlo oracle over Haar frames.
//! * [`field`] — the limiting Gaussian fields: kernels, θ-parametrized
//!   grids, sup-statistic critical values and asymptotic powers.
//! * [`classic`] — power envelopes and the John, Ledoit–Wolf, corrected-LR,
//!   Tracy–Widom, and Cai–Ma tests.
//! * [`experiment`] — seeded, bit-reproducible Monte Carlo experiments.
//! * [`figures`] — CSV curve-data regeneration for the standard plots.
//! * [`matio`] — the CSV and raw binary data-matrix formats.

pub mod classic;
pub mod error;
pub mod experiment;
pub mod field;
pub mod figures;
pub mod likelihood;
pub mod matio;
pub mod mp;
pub mod quad;
pub mod rng;
pub mod sim;
pub mod stats;

pub use error::{Error, Result};
pub use mp::MpLaw;
pub use sim::{EigenData, SpikeBasis, SpikeVector, SpikedParams};
