//! The acceptance suite: one test per release criterion, each printing a
//! `[PASS]` line with the measured quantities (run with `--nocapture` to
//! see them on success). Every tolerance is pinned here; all Monte Carlo
//! is seeded, so each criterion is a deterministic function of this file.

mod common;

use multispike::classic::{beta_clr, beta_john_lw_cm, envelope_lambda, envelope_mu, tw1_quantile};
use multispike::error::Result;
use multispike::experiment::{
    run_experiment, ExperimentKind, ExperimentSpec, LrConfig, ModelSpec, SpikeUnits,
};
use multispike::field::{build_grid, FieldGrid, FieldKernel, FieldVariant, GridSpec};
use multispike::likelihood::{exact_loglik_lambda_mc, loglik_lambda};
use multispike::mp::MpLaw;
use multispike::rng::derive_seed;
use multispike::sim::{eigen_data, generate_data, SpikeVector, SpikedParams};
use multispike::stats::{binomial_se, normal_cdf, normal_quantile};

/// Criterion 1: K∘H and H∘K round-trip to 1e-10 on 100 admissible points
/// for c ∈ {0.25, 0.5, 1, 2}; the density normalizes to 1 within 1e-8.
#[test]
fn criterion_1_transform_identities() {
    let mut worst_rt: f64 = 0.0;
    let mut worst_mass: f64 = 0.0;
    for c in [0.25_f64, 0.5, 1.0, 2.0] {
        let law = MpLaw::new(c).unwrap();
        let (a, b) = law.support();

        // 100 admissible x per c: 60 to the right of the support, 40 to the
        // left (inside (0, a) for c > 1, negative reals otherwise).
        let mut xs = Vec::with_capacity(100);
        for i in 0..60 {
            xs.push(b + 0.02 + 10.0 * i as f64 / 59.0);
        }
        for i in 0..40 {
            if c > 1.0 {
                xs.push(a * (i as f64 + 0.5) / 41.0);
            } else {
                xs.push(-8.0 + (8.0 + a - 0.02) * i as f64 / 40.0);
            }
        }
        assert_eq!(xs.len(), 100);
        for x in xs {
            let y = law.hilbert(x).unwrap();
            let back = law.k_transform(y).unwrap();
            worst_rt = worst_rt.max((back - x).abs());
            assert!((back - x).abs() <= 1e-10, "c={c}: K(H({x})) = {back}");
        }
        // H(K(y)) = y on admissible y.
        for i in 0..100 {
            let y = match () {
                _ if c > 1.0 => -3.0 + 2.9 * i as f64 / 99.0,
                _ => 0.001 + (1.0 / (c.sqrt() * (1.0 + c.sqrt())) - 0.002) * i as f64 / 99.0,
            };
            if !law.in_hilbert_image(y) {
                continue;
            }
            let x = law.k_transform(y).unwrap();
            let back = law.hilbert(x).unwrap();
            worst_rt = worst_rt.max((back - y).abs());
            assert!((back - y).abs() <= 1e-10, "c={c}: H(K({y})) = {back}");
        }

        let mass = law.integrate_density(|_| 1.0, 1e-10).unwrap() + law.atom();
        worst_mass = worst_mass.max((mass - 1.0).abs());
        assert!((mass - 1.0).abs() <= 1e-8, "c={c}: total mass {mass}");
    }
    println!(
        "[PASS] criterion 1: transform round-trips (worst {worst_rt:.2e} <= 1e-10), \
         density mass (worst dev {worst_mass:.2e} <= 1e-8)"
    );
}

/// Criterion 2: the closed-form log-integral matches quadrature of
/// ∫ln(z0-λ)dF within 1e-7 on a 10×4 (h, c) grid.
#[test]
fn criterion_2_log_integral_vs_quadrature() {
    let mut worst: f64 = 0.0;
    for c in [0.25_f64, 0.5, 1.0, 2.0] {
        let law = MpLaw::new(c).unwrap();
        for i in 1..=10 {
            let h = c.sqrt() * i as f64 / 11.0;
            let z0 = law.z0(h).unwrap();
            let closed = law.log_integral(h).unwrap();
            let quad =
                law.integrate_density(|lam| (z0 - lam).ln(), 1e-11).unwrap() + law.atom() * z0.ln();
            worst = worst.max((closed - quad).abs());
            assert!(
                (closed - quad).abs() <= 1e-7,
                "c={c} h={h}: closed {closed} vs quadrature {quad}"
            );
        }
    }
    println!(
        "[PASS] criterion 2: log-integral vs quadrature on 10x4 grid (worst {worst:.2e} <= 1e-7)"
    );
}

/// Criterion 3: at p = n = 60, r = 2, h = (0.3, 0.2), the asymptotic
/// closed form agrees with the exact likelihood's Haar Monte Carlo
/// (1e5 draws) within 3 standard errors in at least 95% of 50 data
/// replications.
#[test]
fn criterion_3_exact_likelihood_oracle() {
    let law = MpLaw::new(1.0).unwrap();
    let h = SpikeVector::new(vec![0.3, 0.2]).unwrap();
    let mut hits = 0;
    let mut worst_z: f64 = 0.0;
    for rep in 0..50u64 {
        let x = generate_data(&SpikedParams::null(60, 60), derive_seed(1, rep));
        let eig = eigen_data(&x).unwrap();
        let asym = loglik_lambda(&eig, &law, &h).unwrap();
        let mc = exact_loglik_lambda_mc(&eig, &law, &h, 100_000, derive_seed(2, rep)).unwrap();
        let z = (asym - mc.estimate).abs() / mc.std_error;
        worst_z = worst_z.max(z);
        if z <= 3.0 {
            hits += 1;
        }
    }
    assert!(
        hits >= 48,
        "only {hits}/50 replications within 3 MC standard errors"
    );
    println!(
        "[PASS] criterion 3: oracle equivalence in {hits}/50 replications (worst z = {worst_z:.2})"
    );
}

/// Criterion 4: weak convergence at c = 0.5, p = 300, n = 600,
/// h = (0.4√c, 0.2√c), 2000 replications — sample variance within 15% of
/// W(h), sample mean within 3 SE of -W(h)/2, KS normality p > 0.01, for
/// both the λ and μ processes.
#[test]
fn criterion_4_loglik_weak_convergence() {
    let c: f64 = 0.5;
    let point = vec![0.4 * c.sqrt(), 0.2 * c.sqrt()];
    let spec = ExperimentSpec {
        kind: ExperimentKind::Convergence,
        model: ModelSpec::null(300, 600),
        tests: vec!["john".into()], // unused by convergence runs
        replications: 2000,
        alpha: 0.05,
        seed: 4,
        lr: None,
        eval_points: Some(vec![point.clone()]),
        figure: None,
        output: None,
    };
    let report = run_experiment(&spec).unwrap();
    let pt = &report.convergence[0];
    for (name, m) in [("lambda", &pt.lambda), ("mu", &pt.mu)] {
        let w = m.expected_variance;
        assert!(
            (m.variance - w).abs() <= 0.15 * w,
            "{name}: variance {} vs W = {w} (beyond 15%)",
            m.variance
        );
        assert!(
            (m.mean - m.expected_mean).abs() <= 3.0 * m.mean_se,
            "{name}: mean {} vs {} (3 SE = {})",
            m.mean,
            m.expected_mean,
            3.0 * m.mean_se
        );
        assert!(
            m.ks_normality_p > 0.01,
            "{name}: KS normality p = {}",
            m.ks_normality_p
        );
        println!(
            "[PASS] criterion 4 ({name}): var {:.5} vs W {:.5} ({:+.1}%), mean {:.5} vs {:.5} \
             ({:.2} SE), KS p = {:.3}",
            m.variance,
            w,
            100.0 * (m.variance - w) / w,
            m.mean,
            m.expected_mean,
            (m.mean - m.expected_mean).abs() / m.mean_se,
            m.ks_normality_p
        );
    }
    // Mean-variance link: fitted mean ≈ -fitted variance / 2.
    let m = &pt.lambda;
    let link_gap = (m.mean + 0.5 * m.variance).abs();
    let link_tol = 3.0 * m.mean_se + 0.15 * 0.5 * m.expected_variance;
    assert!(link_gap <= link_tol, "mean/variance link off by {link_gap}");
}

/// Criterion 5: size control of all seven tests at α = 0.05, n = 400,
/// p = 200, 5000 replications — empirical size within [0.03, 0.07].
#[test]
fn criterion_5_size_control() {
    let spec = ExperimentSpec {
        kind: ExperimentKind::Size,
        model: ModelSpec::null(200, 400),
        tests: vec![
            "john".into(),
            "lw".into(),
            "clr".into(),
            "caima".into(),
            "tw".into(),
            "lr-lambda".into(),
            "lr-mu".into(),
        ],
        replications: 5000,
        alpha: 0.05,
        seed: 5,
        lr: Some(LrConfig::default()),
        eval_points: None,
        figure: None,
        output: None,
    };
    let report = run_experiment(&spec).unwrap();
    let mut shown = Vec::new();
    for r in &report.results {
        assert!(
            (0.03..=0.07).contains(&r.rate),
            "{}: size {} outside [0.03, 0.07]",
            r.name,
            r.rate
        );
        shown.push(format!("{} {:.4}", r.name, r.rate));
    }
    println!(
        "[PASS] criterion 5: sizes in [0.03, 0.07] at n=400, p=200: {}",
        shown.join(", ")
    );
}

fn criterion_6_report() -> &'static multispike::experiment::ExperimentReport {
    static REPORT: std::sync::OnceLock<multispike::experiment::ExperimentReport> =
        std::sync::OnceLock::new();
    REPORT.get_or_init(|| {
        let spec = ExperimentSpec {
            kind: ExperimentKind::Power,
            model: ModelSpec {
                h: vec![0.5, 0.5],
                h_units: SpikeUnits::SqrtC,
                ..ModelSpec::null(400, 800)
            },
            tests: vec![
                "john".into(),
                "lw".into(),
                "clr".into(),
                "caima".into(),
                "tw".into(),
            ],
            replications: 5000,
            alpha: 0.05,
            seed: 6,
            lr: None,
            eval_points: None,
            figure: None,
            output: None,
        };
        run_experiment(&spec).unwrap()
    })
}

/// Criterion 6 (closed-form part): empirical powers at h = (0.5√c, 0.5√c),
/// n = 800, p = 400, 5000 replications, within ±0.03 of the John/LW/Cai–Ma
/// and corrected-LR asymptotic power formulas.
#[test]
fn criterion_6_classic_power_agreement() {
    let report = criterion_6_report();
    let mut shown = Vec::new();
    for r in report.results.iter().filter(|r| r.name != "tw") {
        let target = r.asymptotic.unwrap();
        assert!(
            (r.rate - target).abs() <= 0.03,
            "{}: empirical {} vs asymptotic {target} (tol 0.03)",
            r.name,
            r.rate
        );
        shown.push(format!("{} {:.4} (asym {:.4})", r.name, r.rate, target));
    }
    println!(
        "[PASS] criterion 6: powers within ±0.03 at n=800, p=400: {}",
        shown.join(", ")
    );
}

/// Criterion 6 (Tracy–Widom part): empirical TW power within ±0.02 of α at
/// the same scale.
///
/// This sub-check is expected to fail: inside the contiguity region the TW
/// power converges to α, but only at the p^{-1/3} edge rate (measured
/// 0.0925 / 0.0825 / 0.0760 / 0.0680 at p = 100/200/400/800 under this
/// alternative), so at p = 400 the true power ≈ 0.078 sits outside the
/// band no matter how the test is calibrated — the null size is
/// simultaneously pinned at 0.05 by criterion 5. The tolerance is asserted
/// as stated rather than widened.
#[test]
fn criterion_6_tw_power() {
    let report = criterion_6_report();
    let tw = report.results.iter().find(|r| r.name == "tw").unwrap();
    let pass = (tw.rate - 0.05).abs() <= 0.02;
    println!(
        "[{}] criterion 6 (tw): empirical {:.4} vs alpha 0.05 (tol 0.02)",
        if pass { "PASS" } else { "FAIL" },
        tw.rate
    );
    assert!(pass, "tw: empirical {} vs alpha 0.05 (tol 0.02)", tw.rate);
}

fn iso_crossing_within_figure_range(
    variant: FieldVariant,
    h1: f64,
    q: f64,
    theta_max: f64,
) -> Result<Option<Vec<f64>>> {
    let env = |h2: f64| -> Result<f64> {
        match variant {
            FieldVariant::Lambda => envelope_lambda(&[h1, h2], 1.0, 0.05),
            FieldVariant::Mu => envelope_mu(&[h1, h2], 1.0, 0.05),
        }
    };
    let h2_cap = multispike::field::h_of_theta(theta_max, 1.0)?;
    if env(h2_cap)? < q {
        return Ok(None); // the level is not attained on the plotted section
    }
    let (mut lo, mut hi) = (0.0, h2_cap);
    for _ in 0..100 {
        let mid = 0.5 * (lo + hi);
        if env(mid)? < q {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(Some(vec![h1, 0.5 * (lo + hi)]))
}

/// Criterion 7: envelope dominance. On a 20×20 grid the simulated sup-LR
/// power stays below envelope + 3 MC SE for both variants; the closed-form
/// powers stay below the λ-envelope pointwise for c ∈ {0.1, 0.5}; at the
/// section points of the power-profile figures with envelope level 0.5 and
/// 0.75, the sup-LR power is within 0.10 of the envelope and strictly above
/// John's power.
#[test]
fn criterion_7_envelope_dominance() {
    // Closed-form dominance on the full grid, two aspect ratios.
    for c in [0.1_f64, 0.5] {
        for i in 0..20 {
            for j in 0..20 {
                let h = [
                    0.95 * c.sqrt() * i as f64 / 19.0,
                    0.95 * c.sqrt() * j as f64 / 19.0,
                ];
                let env = envelope_lambda(&h, c, 0.05).unwrap();
                let bj = beta_john_lw_cm(&h, c, 0.05).unwrap();
                let bclr = beta_clr(&h, c, 0.05).unwrap();
                assert!(
                    bj <= env + 1e-12,
                    "c={c} h={h:?}: beta_J {bj} > envelope {env}"
                );
                assert!(
                    bclr <= env + 1e-12,
                    "c={c} h={h:?}: beta_CLR {bclr} > envelope {env}"
                );
            }
        }
    }

    // Simulated LR power vs envelope on the 20×20 grid (c-free in θ-units;
    // evaluated at c = 1).
    let mut max_excess: f64 = -1.0;
    for (variant, name) in [(FieldVariant::Lambda, "lambda"), (FieldVariant::Mu, "mu")] {
        let grid = build_grid(
            FieldKernel::new(variant, 1.0).unwrap(),
            &GridSpec::default(),
        )
        .unwrap();
        let cv = grid
            .critical_value(0.05, 200_000, derive_seed(7, 1))
            .unwrap();
        let mut targets = Vec::with_capacity(400);
        for i in 0..20 {
            for j in 0..20 {
                targets.push(vec![0.95 * i as f64 / 19.0, 0.95 * j as f64 / 19.0]);
            }
        }
        let powers = grid
            .power_batch(cv, &targets, 20_000, derive_seed(7, 2))
            .unwrap();
        for (t, (power, se)) in targets.iter().zip(&powers) {
            let env = match variant {
                FieldVariant::Lambda => envelope_lambda(t, 1.0, 0.05).unwrap(),
                FieldVariant::Mu => envelope_mu(t, 1.0, 0.05).unwrap(),
            };
            max_excess = max_excess.max(power - env);
            assert!(
                *power <= env + 3.0 * se.max(binomial_se(env, 20_000)),
                "{name} at {t:?}: LR power {power} exceeds envelope {env} + 3se"
            );
        }
    }
    println!(
        "[PASS] criterion 7a: dominance on 20x20 grids (max LR-envelope excess {max_excess:.4})"
    );

    // Section points: envelope levels 0.5 and 0.75 along the fixed-h1
    // sections (within the plotted θ-range) and the equi-spiked diagonal.
    let theta_max = GridSpec::default().theta_max;
    for (variant, name) in [(FieldVariant::Lambda, "lambda"), (FieldVariant::Mu, "mu")] {
        let grid = build_grid(
            FieldKernel::new(variant, 1.0).unwrap(),
            &GridSpec::default(),
        )
        .unwrap();
        let cv = grid
            .critical_value(0.05, 200_000, derive_seed(7, 3))
            .unwrap();
        let mut targets = Vec::new();
        let mut labels = Vec::new();
        for q in [0.5, 0.75] {
            for h1 in [0.0, 0.25, 0.5, 0.75] {
                if let Some(t) =
                    iso_crossing_within_figure_range(variant, h1, q, theta_max).unwrap()
                {
                    labels.push((q, format!("h1={h1}")));
                    targets.push(t);
                }
            }
            // Equi-spiked diagonal crossing (always within range).
            let env = |t: f64| -> f64 {
                match variant {
                    FieldVariant::Lambda => envelope_lambda(&[t, t], 1.0, 0.05).unwrap(),
                    FieldVariant::Mu => envelope_mu(&[t, t], 1.0, 0.05).unwrap(),
                }
            };
            let (mut lo, mut hi) = (0.0, 1.0 - 1e-12);
            for _ in 0..100 {
                let mid = 0.5 * (lo + hi);
                if env(mid) < q {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            labels.push((q, "diagonal".into()));
            targets.push(vec![0.5 * (lo + hi), 0.5 * (lo + hi)]);
        }
        let powers = grid
            .power_batch(cv, &targets, 40_000, derive_seed(7, 4))
            .unwrap();
        for ((q, label), (t, (power, _se))) in labels.iter().zip(targets.iter().zip(&powers)) {
            let bj = beta_john_lw_cm(t, 1.0, 0.05).unwrap();
            assert!(
                *power >= q - 0.10,
                "{name} {label} q={q}: LR power {power} below envelope - 0.10"
            );
            assert!(
                *power > bj,
                "{name} {label} q={q}: LR power {power} not above beta_J {bj}"
            );
            println!(
                "[PASS] criterion 7b ({name}, {label}, env {q}): LR {power:.4} >= {:.2}, beta_J {bj:.4}",
                q - 0.10
            );
        }
    }
}

/// Criterion 8: the single-point sup-LR power equals the Neyman–Pearson
/// closed form within 3 MC SE, and the λ-kernel is c-invariant in
/// θ-coordinates to 1e-12.
#[test]
fn criterion_8_limit_field_consistency() {
    // Neyman-Pearson closed form at a single-point grid.
    let kernel = FieldKernel::new(FieldVariant::Lambda, 0.5).unwrap();
    let h = vec![0.5 * 0.5_f64.sqrt()];
    let w = kernel.variance(&h).unwrap();
    let grid = FieldGrid::from_points(kernel, vec![h.clone()]).unwrap();
    let (power, se) = grid.asymptotic_power(0.05, &h, 200_000, 8).unwrap();
    let np = 1.0 - normal_cdf(normal_quantile(0.95).unwrap() - w.sqrt());
    assert!(
        (power - np).abs() <= 3.0 * se.max(binomial_se(np, 200_000)),
        "single-point power {power} vs Neyman-Pearson {np}"
    );

    // θ-coordinate c-invariance of the λ kernel to 1e-12.
    let mut worst: f64 = 0.0;
    for (c1, c2) in [(0.25, 1.0), (0.5, 2.0), (1.0, 4.0)] {
        let k1 = FieldKernel::new(FieldVariant::Lambda, c1).unwrap();
        let k2 = FieldKernel::new(FieldVariant::Lambda, c2).unwrap();
        let scale: f64 = (c2 / c1).sqrt();
        for i in 1..10 {
            for j in 1..10 {
                let h = [0.09 * i as f64 * f64::sqrt(c1), 0.05 * f64::sqrt(c1)];
                let g = [0.09 * j as f64 * f64::sqrt(c1), 0.08 * f64::sqrt(c1)];
                let hs: Vec<f64> = h.iter().map(|x| x * scale).collect();
                let gs: Vec<f64> = g.iter().map(|x| x * scale).collect();
                let d = (k1.cov(&h, &g).unwrap() - k2.cov(&hs, &gs).unwrap()).abs();
                worst = worst.max(d);
                assert!(d <= 1e-12, "kernel not c-invariant: {d}");
            }
        }
    }
    println!(
        "[PASS] criterion 8: NP power {power:.4} vs {np:.4} (3se band), kernel c-invariance \
         (worst {worst:.1e} <= 1e-12)"
    );
}

/// Criterion 9: a rerun of the same experiment spec reproduces the report
/// byte-for-byte at any worker count (including sup-LR machinery).
#[test]
fn criterion_9_determinism() {
    let spec = ExperimentSpec {
        kind: ExperimentKind::Size,
        model: ModelSpec::null(60, 120),
        tests: vec![
            "john".into(),
            "caima".into(),
            "tw".into(),
            "lr-lambda".into(),
        ],
        replications: 40,
        alpha: 0.05,
        seed: 9,
        lr: Some(LrConfig {
            cv_draws: 4000,
            power_draws: 2000,
            ..Default::default()
        }),
        eval_points: None,
        figure: None,
        output: None,
    };
    let pool1 = rayon::ThreadPoolBuilder::new()
        .num_threads(1)
        .build()
        .unwrap();
    let pool3 = rayon::ThreadPoolBuilder::new()
        .num_threads(3)
        .build()
        .unwrap();
    let a =
        serde_json::to_string_pretty(&pool1.install(|| run_experiment(&spec)).unwrap()).unwrap();
    let b =
        serde_json::to_string_pretty(&pool3.install(|| run_experiment(&spec)).unwrap()).unwrap();
    let c = serde_json::to_string_pretty(&run_experiment(&spec).unwrap()).unwrap();
    assert_eq!(a, b, "reports differ between 1 and 3 workers");
    assert_eq!(a, c, "rerun differs from first run");
    println!(
        "[PASS] criterion 9: byte-identical reports across reruns and worker counts ({} bytes)",
        a.len()
    );
}

/// Companion to the acceptance battery: the stored TW1 quantiles are
/// reproduced by the GOE oracle (largest eigenvalue of the 800×800 GOE,
/// tridiagonal sampler) within ±0.02.
#[test]
fn tw_quantiles_validated_by_goe_oracle() {
    let mut samples = common::goe_tw1_samples(800, 100_000, 10);
    for (level, stored) in [
        (0.90, tw1_quantile(0.90).unwrap()),
        (0.95, tw1_quantile(0.95).unwrap()),
        (0.99, tw1_quantile(0.99).unwrap()),
    ] {
        let q = common::empirical_quantile(&mut samples, level);
        assert!(
            (q - stored).abs() <= 0.02,
            "TW1 q({level}): oracle {q:.4} vs stored {stored:.4}"
        );
        println!("[PASS] TW1 q({level}): oracle {q:.4} vs stored {stored:.4} (±0.02)");
    }
}
