//! Adaptive Gauss–Kronrod quadrature (G7/K15).
//!
//! Used for the integrals against the Marchenko–Pastur density: the CDF, the
//! normalization check, and the quadrature cross-checks of closed-form
//! integrals. Endpoint square-root singularities are expected to be removed
//! by the caller via the `sin²` substitution (see [`crate::mp`]); on smooth
//! integrands K15 converges extremely fast, so the adaptive loop rarely
//! subdivides more than a handful of times.

use crate::error::{Error, Result};

// QUADPACK qk15 abscissae (positive half) and weights, full published digits.
#[allow(clippy::excessive_precision)]
const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_2,
    0.949_107_912_342_758_524_5,
    0.864_864_423_359_769_072_8,
    0.741_531_185_599_394_439_9,
    0.586_087_235_467_691_130_3,
    0.405_845_151_377_397_166_9,
    0.207_784_955_007_898_467_6,
    0.0,
];

#[allow(clippy::excessive_precision)]
const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_96,
    0.063_092_092_629_978_553_29,
    0.104_790_010_322_250_183_8,
    0.140_653_259_715_525_918_7,
    0.169_004_726_639_267_902_8,
    0.190_350_578_064_785_409_9,
    0.204_432_940_075_298_892_1,
    0.209_482_141_084_727_828_1,
];

// Gauss 7 weights, matching XGK[1], XGK[3], XGK[5], XGK[7].
#[allow(clippy::excessive_precision)]
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_3,
    0.279_705_391_489_276_667_9,
    0.381_830_050_505_118_944_9,
    0.417_959_183_673_469_387_8,
];

/// One G7/K15 panel on `[a, b]`; returns `(k15_value, error_estimate)`.
pub fn kronrod15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64) {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);

    let fc = f(center);
    let mut result_gauss = WG[3] * fc;
    let mut result_kronrod = WGK[7] * fc;

    for j in 0..7 {
        let dx = half * XGK[j];
        let fsum = f(center - dx) + f(center + dx);
        result_kronrod += WGK[j] * fsum;
        if j % 2 == 1 {
            result_gauss += WG[j / 2] * fsum;
        }
    }

    let value = result_kronrod * half;
    let err = ((result_kronrod - result_gauss) * half).abs();
    // QUADPACK-style sharpening of the raw difference.
    let err = if err != 0.0 {
        let scale = (200.0 * err / value.abs().max(f64::MIN_POSITIVE)).min(1.0);
        (err * scale.powf(1.5)).max(err * 1e-10)
    } else {
        0.0
    };
    (value, err)
}

/// Adaptive integration of `f` over `[a, b]` to absolute tolerance `tol`.
///
/// Bisects the interval with the largest error estimate until the summed
/// estimate drops below `tol` or the panel budget is exhausted.
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, tol: f64) -> Result<f64> {
    if !(a.is_finite() && b.is_finite()) {
        return Err(Error::invalid("integration endpoints must be finite"));
    }
    if a == b {
        return Ok(0.0);
    }

    const MAX_PANELS: usize = 2000;
    let (v, e) = kronrod15(&f, a, b);
    let mut panels = vec![(a, b, v, e)];

    loop {
        let total_err: f64 = panels.iter().map(|p| p.3).sum();
        if total_err <= tol {
            return Ok(panels.iter().map(|p| p.2).sum());
        }
        if panels.len() >= MAX_PANELS {
            return Err(Error::numerical(format!(
                "quadrature did not reach tol={tol:.3e} within {MAX_PANELS} panels (err={total_err:.3e})"
            )));
        }
        // Split the worst panel.
        let (idx, _) = panels
            .iter()
            .enumerate()
            .max_by(|x, y| x.1 .3.partial_cmp(&y.1 .3).unwrap())
            .unwrap();
        let (pa, pb, _, _) = panels.swap_remove(idx);
        let mid = 0.5 * (pa + pb);
        let (v1, e1) = kronrod15(&f, pa, mid);
        let (v2, e2) = kronrod15(&f, mid, pb);
        panels.push((pa, mid, v1, e1));
        panels.push((mid, pb, v2, e2));
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn weights_sum_to_two() {
        let k: f64 = WGK[7] + 2.0 * WGK[..7].iter().sum::<f64>();
        let g: f64 = WG[3] + 2.0 * WG[..3].iter().sum::<f64>();
        assert!((k - 2.0).abs() < 1e-15, "kronrod sum {k}");
        assert!((g - 2.0).abs() < 1e-15, "gauss sum {g}");
    }

    #[test]
    fn exact_on_polynomials() {
        // K15 is exact up to degree 22.
        let (v, _) = kronrod15(&|x: f64| x.powi(20), 0.0, 1.0);
        assert!((v - 1.0 / 21.0).abs() < 1e-14);
    }

    #[test]
    fn integrates_transcendentals() {
        let v = integrate(|x: f64| x.sin(), 0.0, std::f64::consts::PI, 1e-12).unwrap();
        assert!((v - 2.0).abs() < 1e-11);
        let v = integrate(|x: f64| (-x * x).exp(), -8.0, 8.0, 1e-12).unwrap();
        assert!((v - std::f64::consts::PI.sqrt()).abs() < 1e-11);
    }

    #[test]
    fn rejects_nonfinite_bounds() {
        assert!(integrate(|x| x, 0.0, f64::INFINITY, 1e-8).is_err());
    }
}
