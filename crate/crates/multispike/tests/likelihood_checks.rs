//! Oracle-backed checks of the likelihood formulas that need nontrivial
//! setup: the centered spectral statistic on quantile-discretized spectra,
//! and the spherical-integral asymptotics against its Monte Carlo.

mod common;

use multispike::likelihood::{
    exact_loglik_lambda_mc, loglik_lambda, spherical_integral_mc, spherical_log_asymptotic,
    ThetaSpec,
};
use multispike::mp::MpLaw;
use multispike::rng::derive_seed;
use multispike::sim::{eigen_data, generate_data, EigenData, SpikeVector, SpikedParams};

#[test]
fn delta_p_vanishes_on_quantile_discretized_spectrum() {
    // Eigenvalues placed at the p quantiles of the MP law net out the
    // centering term: |Delta_p| stays small.
    let law = MpLaw::new(1.0).unwrap();
    let p = 1000;
    let lambda: Vec<f64> = (0..p)
        .map(|i| common::mp_quantile(&law, (i as f64 + 0.5) / p as f64))
        .collect();
    let eig = EigenData::from_eigenvalues(lambda, p, p).unwrap();
    let d = multispike::likelihood::delta_p(&eig, &law, 0.5).unwrap();
    assert!(
        d.abs() <= 0.1,
        "Delta_p = {d} on a quantile-discretized spectrum"
    );
    println!("Delta_p = {d:.4} at p = {p}");
}

#[test]
fn spherical_asymptotic_within_mc_band() {
    // p = 40, r = 1, admissible θ: the second-order expansion sits inside
    // the Monte Carlo band of ln I_p.
    let law = MpLaw::new(1.0).unwrap();
    let eig = {
        let x = multispike::sim::generate_data(&multispike::sim::SpikedParams::null(40, 40), 1);
        multispike::sim::eigen_data(&x).unwrap()
    };
    let theta = ThetaSpec::new(&law, vec![0.15]).unwrap();
    let asym = spherical_log_asymptotic(&theta, &eig, &law).unwrap();
    let mc = spherical_integral_mc(&theta, &eig, 100_000, 101).unwrap();
    let z = (asym - mc.log_mean).abs() / mc.rel_std_error;
    assert!(
        z <= 3.0,
        "ln I asymptotic {asym} vs MC {} (z = {z})",
        mc.log_mean
    );
    println!(
        "ln I: asymptotic {asym:.4} vs MC {:.4} ± {:.4}",
        mc.log_mean, mc.rel_std_error
    );
}

#[test]
fn asymptotic_formula_tracks_exact_likelihood_across_the_spike_box() {
    // 3x3 grid of two-spike alternatives in [0.1, 0.4]^2 at p = n = 60:
    // the closed form stays within 3 MC standard errors of the exact
    // likelihood in at least 95% of the replications, pooled.
    let law = MpLaw::new(1.0).unwrap();
    let mut hits = 0;
    let mut total = 0;
    for (gi, h1) in [0.1, 0.25, 0.4].iter().enumerate() {
        for (gj, h2) in [0.1, 0.25, 0.4].iter().enumerate() {
            let h = SpikeVector::new(vec![*h1, *h2]).unwrap();
            for rep in 0..12u64 {
                let stream = (gi * 3 + gj) as u64 * 100 + rep;
                let x = generate_data(&SpikedParams::null(60, 60), derive_seed(300, stream));
                let eig = eigen_data(&x).unwrap();
                let asym = loglik_lambda(&eig, &law, &h).unwrap();
                let mc =
                    exact_loglik_lambda_mc(&eig, &law, &h, 100_000, derive_seed(301, stream))
                        .unwrap();
                if (asym - mc.estimate).abs() <= 3.0 * mc.std_error {
                    hits += 1;
                }
                total += 1;
            }
        }
    }
    assert!(
        hits * 100 >= total * 95,
        "only {hits}/{total} grid replications within 3 MC standard errors"
    );
    println!("grid agreement: {hits}/{total}");
}
