//! Distribution-level checks of the simulation module: agreement of the
//! empirical spectral distribution with the Marchenko-Pastur law, and
//! invariance of the eigenvalue law to the spike basis.

mod common;

use multispike::mp::MpLaw;
use multispike::rng::derive_seed;
use multispike::sim::{eigen_data, generate_data, SpikeBasis, SpikeVector, SpikedParams};
use multispike::stats::ks_two_sample_pvalue;
use rayon::prelude::*;

#[test]
fn esd_tracks_marchenko_pastur() {
    // h = 0, p = 400, n = 800: per-replication KS distance <= 0.03 and the
    // largest eigenvalue within 0.1 of (1+sqrt(c))^2 on average.
    let law = MpLaw::new(0.5).unwrap();
    let table = law.cdf_table(4000).unwrap();
    let edge = law.support().1;
    let params = SpikedParams::null(400, 800);
    let reps = 100;
    let stats: Vec<(f64, f64)> = (0..reps)
        .into_par_iter()
        .map(|rep| {
            let eig = eigen_data(&generate_data(&params, derive_seed(500, rep))).unwrap();
            let p = eig.p();
            let mut d: f64 = 0.0;
            for i in 0..p {
                let lam = eig.lambda()[p - 1 - i];
                let f = table.eval(lam);
                d = d.max((f - i as f64 / p as f64).abs());
                d = d.max((f - (i + 1) as f64 / p as f64).abs());
            }
            (d, eig.lambda_max())
        })
        .collect();
    let mut worst_ks: f64 = 0.0;
    let mut mean_lmax = 0.0;
    for (d, lmax) in &stats {
        worst_ks = worst_ks.max(*d);
        mean_lmax += lmax / reps as f64;
        assert!(*d <= 0.03, "KS distance {d} above 0.03");
    }
    assert!(
        (mean_lmax - edge).abs() <= 0.1,
        "mean lambda_max {mean_lmax} vs edge {edge}"
    );
    println!("worst KS {worst_ks:.4}, mean lambda_max {mean_lmax:.4} vs edge {edge:.4}");
}

#[test]
fn spike_basis_does_not_change_the_eigenvalue_law() {
    // Same spikes through the canonical basis and a Haar frame: the largest
    // eigenvalue samples share a distribution (two-sample KS p > 0.01).
    let c: f64 = 0.5;
    let spikes = || SpikeVector::new(vec![0.5 * c.sqrt()]).unwrap();
    let canonical = SpikedParams::new(40, 80, spikes(), 1.0, SpikeBasis::Canonical).unwrap();
    let haar = SpikedParams::new(40, 80, spikes(), 1.0, SpikeBasis::Haar).unwrap();
    let draw = |params: &SpikedParams, stream: u64| -> Vec<f64> {
        (0..1000u64)
            .into_par_iter()
            .map(|rep| {
                eigen_data(&generate_data(params, derive_seed(stream, rep)))
                    .unwrap()
                    .lambda_max()
            })
            .collect()
    };
    let a = draw(&canonical, 600);
    let b = draw(&haar, 601);
    let p = ks_two_sample_pvalue(&a, &b);
    assert!(p > 0.01, "basis changed the eigenvalue law: KS p = {p}");
    println!("two-sample KS p = {p:.3}");
}
