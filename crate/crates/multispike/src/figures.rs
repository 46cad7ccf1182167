//! Curve-data regeneration for the seven figures: power envelopes, sup-LR
//! power profiles and iso-envelope sections, spike-count mismatch, and the
//! classic-test comparisons.
//!
//! Everything is emitted as CSV with the header `x,y,series,params_hash`.
//! Powers and envelopes depend on the spikes only through `h/√c` (and on
//! `θ` after reparametrization), so the curves are generated at the
//! canonical aspect ratio `c = 1`; the one genuinely `c`-dependent curve
//! (the corrected LR power) is pinned at `c = 0.5` as in the source
//! comparison.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::classic::{beta_clr, beta_john_lw_cm, envelope_lambda, envelope_mu};
use crate::error::{Error, Result};
use crate::field::{build_grid, h_of_theta, FieldGrid, FieldKernel, FieldVariant, GridSpec};
use crate::rng::derive_seed;

/// Monte Carlo and grid controls for the figures that need field draws.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FigureParams {
    pub alpha: f64,
    pub seed: u64,
    pub cv_draws: usize,
    pub power_draws: usize,
    /// θ-axis resolution of the power-profile curves and of the LR grid.
    pub points_per_axis: usize,
    /// Fixed `h₁/√c` sections for the profile figures.
    pub sections: Vec<f64>,
}

impl Default for FigureParams {
    fn default() -> Self {
        FigureParams {
            alpha: 0.05,
            seed: 20_120_509,
            cv_draws: 200_000,
            power_draws: 40_000,
            points_per_axis: 30,
            sections: vec![0.0, 0.25, 0.5, 0.75],
        }
    }
}

impl FigureParams {
    fn validate(&self) -> Result<()> {
        if !(0.0 < self.alpha && self.alpha < 1.0) {
            return Err(Error::domain(format!(
                "alpha must lie in (0,1), got {}",
                self.alpha
            )));
        }
        if self.points_per_axis < 2 {
            return Err(Error::domain("need at least 2 points per axis"));
        }
        Ok(())
    }

    fn hash_for(&self, figure: &str) -> String {
        // FNV-1a over a canonical description; stable across runs and
        // toolchains, unlike the std hasher.
        let repr = format!(
            "{figure};alpha={};seed={};cv={};power={};ppa={};sections={:?}",
            self.alpha,
            self.seed,
            self.cv_draws,
            self.power_draws,
            self.points_per_axis,
            self.sections
        );
        let mut h: u64 = 0xcbf2_9ce4_8422_2325;
        for b in repr.as_bytes() {
            h ^= *b as u64;
            h = h.wrapping_mul(0x0000_0100_0000_01b3);
        }
        format!("{h:016x}")
    }
}

struct CurveWriter {
    out: BufWriter<File>,
    hash: String,
    rows: usize,
}

impl CurveWriter {
    fn create(path: &Path, hash: String) -> Result<Self> {
        if let Some(dir) = path.parent() {
            if !dir.as_os_str().is_empty() {
                std::fs::create_dir_all(dir)?;
            }
        }
        let mut out = BufWriter::new(File::create(path)?);
        writeln!(out, "x,y,series,params_hash")?;
        Ok(CurveWriter { out, hash, rows: 0 })
    }

    fn row(&mut self, x: f64, y: f64, series: &str) -> Result<()> {
        writeln!(self.out, "{x:?},{y:?},{series},{}", self.hash)?;
        self.rows += 1;
        Ok(())
    }

    fn finish(mut self) -> Result<usize> {
        self.out.flush()?;
        Ok(self.rows)
    }
}

/// The canonical aspect ratio the figures are generated at.
const FIG_C: f64 = 1.0;

fn theta_axis(params: &FigureParams) -> Vec<f64> {
    let spec = GridSpec::default();
    let n = params.points_per_axis;
    (0..n)
        .map(|i| spec.theta_min + (spec.theta_max - spec.theta_min) * i as f64 / (n - 1) as f64)
        .collect()
}

fn lr_grid(variant: FieldVariant, r: usize, params: &FigureParams) -> Result<FieldGrid> {
    let spec = GridSpec {
        r,
        points_per_axis: params.points_per_axis,
        ..Default::default()
    };
    build_grid(FieldKernel::new(variant, FIG_C)?, &spec)
}

fn emit_envelope_surfaces(params: &FigureParams, path: &Path) -> Result<usize> {
    let mut w = CurveWriter::create(path, params.hash_for("fig1"))?;
    let steps = 20;
    for variant in ["beta_lambda", "beta_mu"] {
        for j in 0..=steps {
            let h2 = 0.95 * j as f64 / steps as f64;
            for i in 0..=steps {
                let h1 = 0.95 * i as f64 / steps as f64;
                let h = [h1, h2];
                let v = match variant {
                    "beta_lambda" => envelope_lambda(&h, FIG_C, params.alpha)?,
                    _ => envelope_mu(&h, FIG_C, params.alpha)?,
                };
                w.row(h1, v, &format!("{variant}:h2={h2:.3}"))?;
            }
        }
    }
    w.finish()
}

fn emit_lr_profiles(variant: FieldVariant, params: &FigureParams, path: &Path) -> Result<usize> {
    let figure = match variant {
        FieldVariant::Lambda => "fig2",
        FieldVariant::Mu => "fig3",
    };
    let mut w = CurveWriter::create(path, params.hash_for(figure))?;
    let grid = lr_grid(variant, 2, params)?;
    let cv = grid.critical_value(params.alpha, params.cv_draws, derive_seed(params.seed, 1))?;
    let thetas = theta_axis(params);

    let mut targets = Vec::new();
    for s in &params.sections {
        let h1 = s * FIG_C.sqrt();
        for t2 in &thetas {
            targets.push(vec![h1, h_of_theta(*t2, FIG_C)?]);
        }
    }
    let powers = grid.power_batch(
        cv,
        &targets,
        params.power_draws,
        derive_seed(params.seed, 2),
    )?;

    let mut k = 0;
    for s in &params.sections {
        for t2 in &thetas {
            let h = &targets[k];
            let env = match variant {
                FieldVariant::Lambda => envelope_lambda(h, FIG_C, params.alpha)?,
                FieldVariant::Mu => envelope_mu(h, FIG_C, params.alpha)?,
            };
            w.row(*t2, powers[k].0, &format!("lr:h1={s:.2}"))?;
            w.row(*t2, env, &format!("envelope:h1={s:.2}"))?;
            k += 1;
        }
    }
    w.finish()
}

/// Root of `envelope(h1·(1,t)) = q` in `h1`, by bisection on `(0, √c)`.
fn iso_envelope_h1(variant: FieldVariant, t: f64, q: f64, alpha: f64) -> Result<f64> {
    let envelope = |h1: f64| -> Result<f64> {
        let h = [h1, t * h1];
        match variant {
            FieldVariant::Lambda => envelope_lambda(&h, FIG_C, alpha),
            FieldVariant::Mu => envelope_mu(&h, FIG_C, alpha),
        }
    };
    let mut lo = 0.0;
    let mut hi = FIG_C.sqrt() * (1.0 - 1e-12);
    if envelope(hi)? < q {
        return Err(Error::domain(format!(
            "envelope level {q} unreachable along direction (1, {t})"
        )));
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if envelope(mid)? < q {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo < 1e-14 {
            break;
        }
    }
    let root = 0.5 * (lo + hi);
    debug_assert!((envelope(root)? - q).abs() <= 1e-8);
    Ok(root)
}

fn emit_iso_envelope_power(params: &FigureParams, path: &Path) -> Result<usize> {
    let mut w = CurveWriter::create(path, params.hash_for("fig4"))?;
    let levels = [0.25, 0.5, 0.75, 0.9];
    let ratios: Vec<f64> = (0..=20).map(|i| i as f64 / 20.0).collect();
    for (variant, label) in [
        (FieldVariant::Lambda, "lr_lambda"),
        (FieldVariant::Mu, "lr_mu"),
    ] {
        let grid = lr_grid(variant, 2, params)?;
        let cv = grid.critical_value(params.alpha, params.cv_draws, derive_seed(params.seed, 3))?;
        let mut targets = Vec::with_capacity(levels.len() * ratios.len());
        for q in &levels {
            for t in &ratios {
                let h1 = iso_envelope_h1(variant, *t, *q, params.alpha)?;
                targets.push(vec![h1, t * h1]);
            }
        }
        let powers = grid.power_batch(
            cv,
            &targets,
            params.power_draws,
            derive_seed(params.seed, 4),
        )?;
        let mut k = 0;
        for q in &levels {
            for t in &ratios {
                w.row(*t, powers[k].0, &format!("{label}:q={q:.2}"))?;
                k += 1;
            }
        }
    }
    w.finish()
}

fn emit_spike_count_mismatch(params: &FigureParams, path: &Path) -> Result<usize> {
    let mut w = CurveWriter::create(path, params.hash_for("fig5"))?;
    let thetas = theta_axis(params);
    for (variant, label) in [(FieldVariant::Lambda, "lambda"), (FieldVariant::Mu, "mu")] {
        for r in [1usize, 2] {
            let grid = lr_grid(variant, r, params)?;
            let cv =
                grid.critical_value(params.alpha, params.cv_draws, derive_seed(params.seed, 5))?;
            let targets: Vec<Vec<f64>> = thetas
                .iter()
                .map(|t| Ok(vec![h_of_theta(*t, FIG_C)?]))
                .collect::<Result<_>>()?;
            let powers = grid.power_batch(
                cv,
                &targets,
                params.power_draws,
                derive_seed(params.seed, 6),
            )?;
            for (t, (power, _)) in thetas.iter().zip(&powers) {
                w.row(*t, *power, &format!("{label}:r={r}"))?;
            }
        }
    }
    w.finish()
}

fn emit_john_vs_mu_envelope(params: &FigureParams, path: &Path) -> Result<usize> {
    let mut w = CurveWriter::create(path, params.hash_for("fig6"))?;
    let thetas = theta_axis(params);
    for s in &params.sections {
        let h1 = s * FIG_C.sqrt();
        for t2 in &thetas {
            let h = [h1, h_of_theta(*t2, FIG_C)?];
            w.row(
                *t2,
                beta_john_lw_cm(&h, FIG_C, params.alpha)?,
                &format!("john:h1={s:.2}"),
            )?;
            w.row(
                *t2,
                envelope_mu(&h, FIG_C, params.alpha)?,
                &format!("envelope_mu:h1={s:.2}"),
            )?;
        }
    }
    w.finish()
}

fn emit_lw_clr_vs_lambda_envelope(params: &FigureParams, path: &Path) -> Result<usize> {
    let mut w = CurveWriter::create(path, params.hash_for("fig7"))?;
    let thetas = theta_axis(params);
    // The corrected-LR power genuinely depends on c; the comparison pins 0.5.
    let c_clr = 0.5_f64;
    for s in &params.sections {
        for t2 in &thetas {
            let h = [s * FIG_C.sqrt(), h_of_theta(*t2, FIG_C)?];
            let h_clr = [s * c_clr.sqrt(), h_of_theta(*t2, c_clr)?];
            w.row(
                *t2,
                beta_john_lw_cm(&h, FIG_C, params.alpha)?,
                &format!("lw_cm:h1={s:.2}"),
            )?;
            w.row(
                *t2,
                beta_clr(&h_clr, c_clr, params.alpha)?,
                &format!("clr_c0.5:h1={s:.2}"),
            )?;
            w.row(
                *t2,
                envelope_lambda(&h, FIG_C, params.alpha)?,
                &format!("envelope_lambda:h1={s:.2}"),
            )?;
        }
    }
    w.finish()
}

/// Writes the curve data of one figure (`fig1` … `fig7`) to `output`.
/// Returns the written path and the number of data rows.
pub fn emit_figure(
    figure_id: &str,
    params: &FigureParams,
    output: &Path,
) -> Result<(PathBuf, usize)> {
    params.validate()?;
    let rows = match figure_id {
        "fig1" => emit_envelope_surfaces(params, output)?,
        "fig2" => emit_lr_profiles(FieldVariant::Lambda, params, output)?,
        "fig3" => emit_lr_profiles(FieldVariant::Mu, params, output)?,
        "fig4" => emit_iso_envelope_power(params, output)?,
        "fig5" => emit_spike_count_mismatch(params, output)?,
        "fig6" => emit_john_vs_mu_envelope(params, output)?,
        "fig7" => emit_lw_clr_vs_lambda_envelope(params, output)?,
        other => {
            return Err(Error::invalid(format!(
                "unknown figure {other:?}; known: fig1 … fig7"
            )))
        }
    };
    Ok((output.to_path_buf(), rows))
}
