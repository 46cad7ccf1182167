//! Seeded Monte Carlo experiments: size and power of the test battery,
//! weak-convergence diagnostics for the log-likelihood processes, and the
//! data-file test runner.
//!
//! Reproducibility contract: every replicate draws its data from stream
//! `rep` of the experiment seed, results are collected in replicate order,
//! and aggregation is a fixed-order fold, so a report is bit-identical for
//! any worker count. Reports embed the seed and crate version; the
//! `generated_at` stamp is left empty by the library and only filled in by
//! callers that write files.

use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::classic::{
    beta_clr, beta_john_lw_cm, caima_test, clr_test, john_test, lw_test, tw_test, TestOutcome,
};
use crate::error::{Error, Result};
use crate::field::{build_grid, FieldGrid, FieldKernel, FieldVariant, GridSpec};
use crate::likelihood::{loglik_lambda, loglik_mu};
use crate::matio::read_matrix;
use crate::mp::MpLaw;
use crate::rng::derive_seed;
use crate::sim::{eigen_data, generate_data, EigenData, SpikeBasis, SpikeVector, SpikedParams};
use crate::stats::{binomial_se, ks_normality_pvalue, mean_var};

/// Experiment family.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ExperimentKind {
    Size,
    Power,
    Convergence,
    /// Regenerates one figure's curve data instead of running replications.
    Figure,
}

/// How the `h` entries of a model are interpreted.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum SpikeUnits {
    #[default]
    Absolute,
    /// Multiples of `√c`, the natural scale of the contiguity region.
    SqrtC,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum BasisSpec {
    #[default]
    Canonical,
    Haar,
}

fn default_sigma2() -> f64 {
    1.0
}

/// Serializable model description.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ModelSpec {
    pub p: usize,
    pub n: usize,
    #[serde(default)]
    pub h: Vec<f64>,
    #[serde(default)]
    pub h_units: SpikeUnits,
    #[serde(default = "default_sigma2")]
    pub sigma2: f64,
    #[serde(default)]
    pub basis: BasisSpec,
}

impl ModelSpec {
    pub fn null(p: usize, n: usize) -> Self {
        ModelSpec {
            p,
            n,
            h: Vec::new(),
            h_units: SpikeUnits::Absolute,
            sigma2: 1.0,
            basis: BasisSpec::Canonical,
        }
    }

    pub fn cp(&self) -> f64 {
        self.p as f64 / self.n as f64
    }

    /// Spikes in absolute units.
    pub fn resolved_spikes(&self) -> Result<SpikeVector> {
        match self.h_units {
            SpikeUnits::Absolute => SpikeVector::new(self.h.clone()),
            SpikeUnits::SqrtC => SpikeVector::from_sqrt_c_units(&self.h, self.cp()),
        }
    }

    pub fn to_params(&self) -> Result<SpikedParams> {
        let basis = match self.basis {
            BasisSpec::Canonical => SpikeBasis::Canonical,
            BasisSpec::Haar => SpikeBasis::Haar,
        };
        SpikedParams::new(self.p, self.n, self.resolved_spikes()?, self.sigma2, basis)
    }
}

/// Configuration of the sup-LR tests inside experiments.
///
/// The finite-sample statistic tracks its Gaussian limit only while every
/// grid point keeps `z₀(h)` well above the bulk edge relative to the
/// edge-fluctuation scale, which shrinks like `p^{-2/3}`; the default
/// `theta_max` is therefore much smaller than the one used for purely
/// asymptotic power curves.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LrConfig {
    pub r: usize,
    pub points_per_axis: usize,
    pub theta_min: f64,
    pub theta_max: f64,
    #[serde(default)]
    pub delta: Option<f64>,
    /// Draws for the critical-value simulation.
    pub cv_draws: usize,
    /// Draws for asymptotic-power predictions.
    pub power_draws: usize,
}

impl Default for LrConfig {
    fn default() -> Self {
        LrConfig {
            r: 2,
            points_per_axis: 21,
            theta_min: 0.05,
            theta_max: 0.45,
            delta: None,
            cv_draws: 200_000,
            power_draws: 40_000,
        }
    }
}

impl LrConfig {
    pub fn grid_spec(&self) -> GridSpec {
        GridSpec {
            r: self.r,
            points_per_axis: self.points_per_axis,
            delta: self.delta,
            theta_min: self.theta_min,
            theta_max: self.theta_max,
        }
    }
}

/// A full experiment description (JSON/TOML-loadable).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ExperimentSpec {
    pub kind: ExperimentKind,
    pub model: ModelSpec,
    pub tests: Vec<String>,
    pub replications: usize,
    pub alpha: f64,
    pub seed: u64,
    #[serde(default)]
    pub lr: Option<LrConfig>,
    /// Evaluation points for convergence experiments (defaults to the
    /// model's spike vector).
    #[serde(default)]
    pub eval_points: Option<Vec<Vec<f64>>>,
    /// Figure id (`fig1` … `fig7`) for figure experiments.
    #[serde(default)]
    pub figure: Option<String>,
    #[serde(default)]
    pub output: Option<String>,
}

/// Known test identifiers.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TestId {
    John,
    Lw,
    Clr,
    Caima,
    Tw,
    LrLambda,
    LrMu,
}

impl TestId {
    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "john" => Ok(TestId::John),
            "lw" => Ok(TestId::Lw),
            "clr" => Ok(TestId::Clr),
            "caima" => Ok(TestId::Caima),
            "tw" => Ok(TestId::Tw),
            "lr-lambda" => Ok(TestId::LrLambda),
            "lr-mu" => Ok(TestId::LrMu),
            other => Err(Error::invalid(format!(
                "unknown test {other:?}; known: john, lw, clr, caima, tw, lr-lambda, lr-mu"
            ))),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            TestId::John => "john",
            TestId::Lw => "lw",
            TestId::Clr => "clr",
            TestId::Caima => "caima",
            TestId::Tw => "tw",
            TestId::LrLambda => "lr-lambda",
            TestId::LrMu => "lr-mu",
        }
    }
}

/// Empirical rejection rate of one test, with its binomial standard error
/// and the matching asymptotic prediction where one exists.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TestRate {
    pub name: String,
    pub rejections: usize,
    pub rate: f64,
    pub std_error: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub asymptotic: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub asymptotic_se: Option<f64>,
}

/// Bulk-agreement diagnostics of the simulated spectra.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EsdDiagnostics {
    pub replications_used: usize,
    /// Mean Kolmogorov distance between the empirical spectral distribution
    /// and the Marchenko–Pastur law at `c_p`.
    pub mean_ks_distance: f64,
    /// Mean of `λ_max - (1+√c)²`.
    pub mean_edge_gap: f64,
}

/// Moments of one log-likelihood sample against its theoretical limit.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MomentsCheck {
    pub mean: f64,
    pub mean_se: f64,
    pub variance: f64,
    pub expected_mean: f64,
    pub expected_variance: f64,
    pub ks_normality_p: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ConvergencePoint {
    pub h: Vec<f64>,
    pub lambda: MomentsCheck,
    pub mu: MomentsCheck,
}

/// The report every experiment produces.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub kind: ExperimentKind,
    pub p: usize,
    pub n: usize,
    /// Spikes in absolute units after resolution.
    pub h: Vec<f64>,
    pub alpha: f64,
    pub replications: usize,
    pub seed: u64,
    pub version: String,
    /// Filled by file-writing callers; never by the library (reports are
    /// bit-reproducible functions of the spec).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub generated_at: Option<String>,
    pub results: Vec<TestRate>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub diagnostics: Option<EsdDiagnostics>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub convergence: Vec<ConvergencePoint>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub lr_jitter: Vec<f64>,
}

const STREAM_CV_LAMBDA: u64 = 0xffff_0000_0001;
const STREAM_CV_MU: u64 = 0xffff_0000_0002;
const STREAM_POWER_LAMBDA: u64 = 0xffff_0000_0003;
const STREAM_POWER_MU: u64 = 0xffff_0000_0004;

struct LrMachinery {
    grid: FieldGrid,
    critical: f64,
}

/// Shared per-experiment state: parsed tests and, when sup-LR tests are
/// requested, their grids and simulated critical values.
struct Battery {
    ids: Vec<TestId>,
    law: MpLaw,
    lr_lambda: Option<LrMachinery>,
    lr_mu: Option<LrMachinery>,
}

impl Battery {
    fn build(spec: &ExperimentSpec) -> Result<Self> {
        if spec.tests.is_empty() {
            return Err(Error::invalid("experiment lists no tests"));
        }
        let ids: Vec<TestId> = spec
            .tests
            .iter()
            .map(|s| TestId::parse(s))
            .collect::<Result<_>>()?;
        let law = MpLaw::for_dims(spec.model.p, spec.model.n)?;
        let lr_cfg = spec.lr.clone().unwrap_or_default();
        let mut lr_lambda = None;
        let mut lr_mu = None;
        for (id, slot, variant, stream) in [
            (
                TestId::LrLambda,
                &mut lr_lambda,
                FieldVariant::Lambda,
                STREAM_CV_LAMBDA,
            ),
            (TestId::LrMu, &mut lr_mu, FieldVariant::Mu, STREAM_CV_MU),
        ] {
            if ids.contains(&id) {
                let kernel = FieldKernel::new(variant, law.c())?;
                let grid = build_grid(kernel, &lr_cfg.grid_spec())?;
                let critical = grid.critical_value(
                    spec.alpha,
                    lr_cfg.cv_draws,
                    derive_seed(spec.seed, stream),
                )?;
                *slot = Some(LrMachinery { grid, critical });
            }
        }
        Ok(Battery {
            ids,
            law,
            lr_lambda,
            lr_mu,
        })
    }

    fn rejections(
        &self,
        x: &nalgebra::DMatrix<f64>,
        eig: &EigenData,
        alpha: f64,
    ) -> Result<Vec<bool>> {
        self.ids
            .iter()
            .map(|id| -> Result<bool> {
                Ok(match id {
                    TestId::John => john_test(eig, alpha)?.reject,
                    TestId::Lw => lw_test(eig, alpha)?.reject,
                    TestId::Clr => clr_test(eig, alpha)?.reject,
                    TestId::Caima => caima_test(x, alpha)?.reject,
                    TestId::Tw => tw_test(eig, alpha)?.reject,
                    TestId::LrLambda => {
                        let m = self.lr_lambda.as_ref().expect("lr grid built");
                        m.grid.sup_statistic(eig, &self.law)? > m.critical
                    }
                    TestId::LrMu => {
                        let m = self.lr_mu.as_ref().expect("lr grid built");
                        m.grid.sup_statistic(eig, &self.law)? > m.critical
                    }
                })
            })
            .collect()
    }

    /// Asymptotic prediction for the rejection rate at alternative `h`
    /// (equals α when `h = 0`).
    fn asymptotic(
        &self,
        id: TestId,
        h: &[f64],
        c: f64,
        alpha: f64,
        seed: u64,
        power_draws: usize,
    ) -> Result<(Option<f64>, Option<f64>)> {
        Ok(match id {
            TestId::John | TestId::Lw | TestId::Caima => {
                (Some(beta_john_lw_cm(h, c, alpha)?), None)
            }
            TestId::Clr => (Some(beta_clr(h, c, alpha)?), None),
            TestId::Tw => (Some(alpha), None),
            TestId::LrLambda | TestId::LrMu => {
                let (m, stream) = if id == TestId::LrLambda {
                    (
                        self.lr_lambda.as_ref().expect("lr grid built"),
                        STREAM_POWER_LAMBDA,
                    )
                } else {
                    (self.lr_mu.as_ref().expect("lr grid built"), STREAM_POWER_MU)
                };
                let (power, se) = m.grid.power_batch(
                    m.critical,
                    &[h.to_vec()],
                    power_draws,
                    derive_seed(seed, stream),
                )?[0];
                (Some(power), Some(se))
            }
        })
    }
}

fn crate_version() -> String {
    env!("CARGO_PKG_VERSION").to_string()
}

/// Maximum replicates used for the ESD diagnostics (they are summaries, not
/// acceptance quantities, and the CDF evaluation has a per-rep cost).
const DIAG_REPS: usize = 200;

fn esd_diagnostics(law: &MpLaw, eigs: &[EigenData]) -> Result<EsdDiagnostics> {
    let used = eigs.len().min(DIAG_REPS);
    let table = law.cdf_table(4000)?;
    let edge = law.support().1;
    let mut ks_sum = 0.0;
    let mut gap_sum = 0.0;
    for eig in &eigs[..used] {
        let p = eig.p();
        // Ascending over all p eigenvalues (implicit zeros first).
        let zeros = eig.zero_count();
        let mut d: f64 = 0.0;
        for i in 0..p {
            let lam = if i < zeros {
                0.0
            } else {
                eig.lambda()[p - 1 - i]
            };
            let f = table.eval(lam);
            d = d.max((f - i as f64 / p as f64).abs());
            d = d.max((f - (i + 1) as f64 / p as f64).abs());
        }
        ks_sum += d;
        gap_sum += eig.lambda_max() - edge;
    }
    Ok(EsdDiagnostics {
        replications_used: used,
        mean_ks_distance: ks_sum / used as f64,
        mean_edge_gap: gap_sum / used as f64,
    })
}

fn run_rejection_experiment(spec: &ExperimentSpec) -> Result<ExperimentReport> {
    if spec.replications == 0 {
        return Err(Error::invalid("need at least one replication"));
    }
    if !(0.0 < spec.alpha && spec.alpha < 1.0) {
        return Err(Error::domain(format!(
            "alpha must lie in (0,1), got {}",
            spec.alpha
        )));
    }
    let params = spec.model.to_params()?;
    let h = spec.model.resolved_spikes()?;
    if spec.kind == ExperimentKind::Size && h.nonzero().iter().any(|v| *v != 0.0) {
        return Err(Error::invalid("size experiments run under h = 0"));
    }
    let battery = Battery::build(spec)?;
    let lr_cfg = spec.lr.clone().unwrap_or_default();

    let per_rep: Vec<Result<(Vec<bool>, EigenData)>> = (0..spec.replications)
        .into_par_iter()
        .map(|rep| {
            let x = generate_data(&params, derive_seed(spec.seed, rep as u64));
            let eig = eigen_data(&x)?;
            let rej = battery.rejections(&x, &eig, spec.alpha)?;
            Ok((rej, eig))
        })
        .collect();

    let mut rejections = vec![0usize; battery.ids.len()];
    let mut eigs = Vec::with_capacity(spec.replications.min(DIAG_REPS));
    for r in per_rep {
        let (rej, eig) = r?;
        for (slot, flag) in rejections.iter_mut().zip(&rej) {
            *slot += *flag as usize;
        }
        if eigs.len() < DIAG_REPS {
            eigs.push(eig);
        }
    }

    let c = spec.model.cp();
    let mut results = Vec::with_capacity(battery.ids.len());
    for (id, rej) in battery.ids.iter().zip(&rejections) {
        let rate = *rej as f64 / spec.replications as f64;
        let (asymptotic, asymptotic_se) = battery.asymptotic(
            *id,
            h.values(),
            c,
            spec.alpha,
            spec.seed,
            lr_cfg.power_draws,
        )?;
        results.push(TestRate {
            name: id.name().to_string(),
            rejections: *rej,
            rate,
            std_error: binomial_se(rate, spec.replications),
            asymptotic,
            asymptotic_se,
        });
    }

    let diagnostics = Some(esd_diagnostics(&battery.law, &eigs)?);
    let mut lr_jitter = Vec::new();
    if let Some(m) = &battery.lr_lambda {
        lr_jitter.push(m.grid.jitter());
    }
    if let Some(m) = &battery.lr_mu {
        lr_jitter.push(m.grid.jitter());
    }

    Ok(ExperimentReport {
        kind: spec.kind,
        p: spec.model.p,
        n: spec.model.n,
        h: h.values().to_vec(),
        alpha: spec.alpha,
        replications: spec.replications,
        seed: spec.seed,
        version: crate_version(),
        generated_at: None,
        results,
        diagnostics,
        convergence: Vec::new(),
        lr_jitter,
    })
}

fn run_convergence(spec: &ExperimentSpec) -> Result<ExperimentReport> {
    if spec.replications < 2 {
        return Err(Error::invalid(
            "convergence experiments need at least two replications",
        ));
    }
    let h0 = spec.model.resolved_spikes()?;
    if h0.nonzero().iter().any(|v| *v != 0.0) {
        return Err(Error::invalid(
            "the convergence experiment simulates under the null",
        ));
    }
    let params = spec.model.to_params()?;
    let law = MpLaw::for_dims(spec.model.p, spec.model.n)?;
    let c = law.c();

    let points: Vec<Vec<f64>> = match &spec.eval_points {
        Some(pts) if !pts.is_empty() => pts.clone(),
        _ => {
            return Err(Error::invalid(
                "convergence experiments need eval_points (spike vectors to evaluate at)",
            ))
        }
    };
    let kernel_l = FieldKernel::new(FieldVariant::Lambda, c)?;
    let kernel_m = FieldKernel::new(FieldVariant::Mu, c)?;

    type PointValues = Vec<(f64, f64)>;
    let per_rep: Vec<Result<(PointValues, EigenData)>> = (0..spec.replications)
        .into_par_iter()
        .map(|rep| {
            let x = generate_data(&params, derive_seed(spec.seed, rep as u64));
            let eig = eigen_data(&x)?;
            let vals = points
                .iter()
                .map(|point| -> Result<(f64, f64)> {
                    let sv = SpikeVector::new(point.clone())?;
                    Ok((loglik_lambda(&eig, &law, &sv)?, loglik_mu(&eig, &law, &sv)?))
                })
                .collect::<Result<Vec<_>>>()?;
            Ok((vals, eig))
        })
        .collect();

    let mut series: Vec<(Vec<f64>, Vec<f64>)> =
        points.iter().map(|_| (Vec::new(), Vec::new())).collect();
    let mut eigs = Vec::with_capacity(spec.replications.min(DIAG_REPS));
    for r in per_rep {
        let (vals, eig) = r?;
        for (slot, (ll, lm)) in series.iter_mut().zip(vals) {
            slot.0.push(ll);
            slot.1.push(lm);
        }
        if eigs.len() < DIAG_REPS {
            eigs.push(eig);
        }
    }

    let mut convergence = Vec::with_capacity(points.len());
    for (point, (ll, lm)) in points.iter().zip(series) {
        let w_l = kernel_l.variance(point)?;
        let w_m = kernel_m.variance(point)?;
        let make = |xs: &[f64], w: f64| -> MomentsCheck {
            let (mean, var) = mean_var(xs);
            MomentsCheck {
                mean,
                mean_se: (var / xs.len() as f64).sqrt(),
                variance: var,
                expected_mean: -0.5 * w,
                expected_variance: w,
                ks_normality_p: ks_normality_pvalue(xs),
            }
        };
        convergence.push(ConvergencePoint {
            h: point.clone(),
            lambda: make(&ll, w_l),
            mu: make(&lm, w_m),
        });
    }

    Ok(ExperimentReport {
        kind: spec.kind,
        p: spec.model.p,
        n: spec.model.n,
        h: Vec::new(),
        alpha: spec.alpha,
        replications: spec.replications,
        seed: spec.seed,
        version: crate_version(),
        generated_at: None,
        results: Vec::new(),
        diagnostics: Some(esd_diagnostics(&law, &eigs)?),
        convergence,
        lr_jitter: Vec::new(),
    })
}

fn run_figure(spec: &ExperimentSpec) -> Result<ExperimentReport> {
    let figure = spec
        .figure
        .as_deref()
        .ok_or_else(|| Error::invalid("figure experiments need a figure id (fig1 … fig7)"))?;
    let output = spec
        .output
        .as_deref()
        .ok_or_else(|| Error::invalid("figure experiments need an output path"))?;
    let params = crate::figures::FigureParams {
        alpha: spec.alpha,
        seed: spec.seed,
        ..Default::default()
    };
    crate::figures::emit_figure(figure, &params, std::path::Path::new(output))?;
    Ok(ExperimentReport {
        kind: spec.kind,
        p: spec.model.p,
        n: spec.model.n,
        h: Vec::new(),
        alpha: spec.alpha,
        replications: 0,
        seed: spec.seed,
        version: crate_version(),
        generated_at: None,
        results: Vec::new(),
        diagnostics: None,
        convergence: Vec::new(),
        lr_jitter: Vec::new(),
    })
}

/// Runs an experiment spec to a report. Deterministic in the spec.
pub fn run_experiment(spec: &ExperimentSpec) -> Result<ExperimentReport> {
    match spec.kind {
        ExperimentKind::Size | ExperimentKind::Power => run_rejection_experiment(spec),
        ExperimentKind::Convergence => run_convergence(spec),
        ExperimentKind::Figure => run_figure(spec),
    }
}

/// Applies the requested battery to a data file. When `sigma2_known` is
/// given the data are rescaled by `1/σ` first (the eigenvalue tests then
/// see unit-variance noise). Sup-LR tests simulate their critical values
/// from `seed`.
pub fn run_data_test(
    input: &Path,
    tests: &[String],
    alpha: f64,
    sigma2_known: Option<f64>,
    lr: Option<LrConfig>,
    seed: u64,
) -> Result<Vec<TestOutcome>> {
    let mut x = read_matrix(input)?;
    let (p, n) = (x.nrows(), x.ncols());
    if p < 2 || n < 2 {
        return Err(Error::invalid(format!(
            "need at least a 2×2 matrix, got {p}×{n}"
        )));
    }
    if let Some(s2) = sigma2_known {
        if !(s2.is_finite() && s2 > 0.0) {
            return Err(Error::domain(format!("sigma2 must be positive, got {s2}")));
        }
        x /= s2.sqrt();
    }
    let eig = eigen_data(&x)?;
    let law = MpLaw::for_dims(p, n)?;
    let lr_cfg = lr.unwrap_or_default();

    let ids: Vec<TestId> = tests
        .iter()
        .map(|s| TestId::parse(s))
        .collect::<Result<_>>()?;
    let mut out = Vec::with_capacity(ids.len());
    for id in ids {
        let outcome = match id {
            TestId::John => john_test(&eig, alpha)?,
            TestId::Lw => lw_test(&eig, alpha)?,
            TestId::Clr => clr_test(&eig, alpha)?,
            TestId::Caima => caima_test(&x, alpha)?,
            TestId::Tw => tw_test(&eig, alpha)?,
            TestId::LrLambda | TestId::LrMu => {
                let variant = if id == TestId::LrLambda {
                    (FieldVariant::Lambda, STREAM_CV_LAMBDA)
                } else {
                    (FieldVariant::Mu, STREAM_CV_MU)
                };
                let kernel = FieldKernel::new(variant.0, law.c())?;
                let grid = build_grid(kernel, &lr_cfg.grid_spec())?;
                let critical =
                    grid.critical_value(alpha, lr_cfg.cv_draws, derive_seed(seed, variant.1))?;
                let stat = grid.sup_statistic(&eig, &law)?;
                TestOutcome {
                    name: id.name().to_string(),
                    statistic: stat,
                    standardized: stat,
                    critical,
                    reject: stat > critical,
                    alpha,
                }
            }
        };
        out.push(outcome);
    }
    Ok(out)
}
