use std::f64::consts::{PI, TAU};

use cavitylink::eigenmode::{
    mode_count, mode_spectral_magnitude, mode_time_response, sample_ensemble, transfer_function, wigner_cdf,
    CavityGeometry, Mode,
};
use cavitylink::perturbation::{perturb_ensemble, Codebook, RisPanel};
use rustfft::FftPlanner;

mod common;
use common::{complex_correlation, mean_std};

fn large_ensemble(seed: u64) -> cavitylink::eigenmode::EigenmodeEnsemble {
    let geom = CavityGeometry::from_center_frequency(5.0, 0.15e-6, 1.0, 3.3e9).unwrap();
    let w0 = TAU * 3.3e9;
    sample_ensemble(seed, &geom, w0 - TAU * 100e6, w0 + TAU * 100e6, 1.0).unwrap()
}

#[test]
fn spacings_pass_ks_against_wigner() {
    let ens = large_ensemble(17);
    let omegas: Vec<f64> = ens.modes().iter().map(|m| m.omega).collect();
    let mut s: Vec<f64> = omegas.windows(2).map(|w| w[1] - w[0]).collect();
    assert!(s.len() >= 10_000, "only {} spacings", s.len());
    let mean = s.iter().sum::<f64>() / s.len() as f64;
    s.iter_mut().for_each(|v| *v /= mean);
    s.sort_by(f64::total_cmp);
    let n = s.len() as f64;
    let d = s
        .iter()
        .enumerate()
        .map(|(i, &v)| {
            let f = wigner_cdf(v);
            (f - i as f64 / n).abs().max(((i + 1) as f64 / n - f).abs())
        })
        .fold(0.0, f64::max);
    // critical value at alpha = 0.01
    assert!(d < 1.628 / n.sqrt(), "KS statistic {d}");
}

#[test]
fn phases_are_uniform() {
    let ens = large_ensemble(18);
    let phi: Vec<f64> = ens.modes().iter().map(|m| m.phi).collect();
    let n = phi.len() as f64;
    let (m, sd) = mean_std(&phi);
    let var = sd * sd;
    let mean_tol = 3.0 * (PI * PI / 3.0 / n).sqrt();
    let var_tol = 3.0 * (4.0 * PI.powi(4) / 45.0 / n).sqrt();
    assert!((m - PI).abs() < mean_tol, "mean {m}");
    assert!((var - PI * PI / 3.0).abs() < var_tol, "variance {var}");
}

#[test]
fn mode_count_is_rounded_weyl_difference() {
    let geom = CavityGeometry::from_center_frequency(0.37, 1e-7, 1.0, 2.4e9).unwrap();
    for (seed, half) in [(1u64, 30e6), (2, 75e6), (3, 140e6)] {
        let w0 = TAU * 2.4e9;
        let (lo, hi) = (w0 - TAU * half, w0 + TAU * half);
        let ens = sample_ensemble(seed, &geom, lo, hi, 1.0).unwrap();
        let expect = (mode_count(hi, geom.volume) - mode_count(lo, geom.volume)).round() as usize;
        assert_eq!(ens.n_m(), expect);
    }
}

#[test]
fn fft_of_time_response_matches_lorentzian() {
    let tau = 1.0;
    let wn = 3.0;
    let mode = Mode::new(wn, 1.0, 0.0, tau).unwrap();
    let n = 1 << 15;
    let dt = 0.005;
    let mut buf: Vec<_> = (0..n).map(|k| mode_time_response(&mode, k as f64 * dt)).collect();
    // exp(+i w t) kernel so that the line sits at +w_n
    FftPlanner::new().plan_fft_inverse(n).process(&mut buf);
    let dw = TAU / (n as f64 * dt);
    let peak = mode_spectral_magnitude(&mode, wn);
    let mut checked = 0;
    for (k, v) in buf.iter().enumerate().take(n / 2) {
        let w = k as f64 * dw;
        let expect = mode_spectral_magnitude(&mode, w);
        let got = v.norm() * dt / TAU;
        if expect >= 0.5 * peak {
            checked += 1;
            assert!((got - expect).abs() / expect < 0.05, "w={w}: {got} vs {expect}");
        }
    }
    assert!(checked > 10);
    let k0 = (wn / dw).round() as usize;
    let got = buf[k0].norm() * dt / TAU;
    let expect = mode_spectral_magnitude(&mode, k0 as f64 * dw);
    assert!((got - expect).abs() / expect < 0.02);
}

#[test]
fn full_switch_decorrelates_transfer_function() {
    let geom = CavityGeometry::from_center_frequency(0.1, 0.15e-6, 1.0, 3.3e9).unwrap();
    let w0 = TAU * 3.3e9;
    let (lo, hi) = (w0 - TAU * 100e6, w0 + TAU * 100e6);
    let grid: Vec<f64> = (0..256).map(|k| w0 + TAU * (k as f64 - 128.0) * 0.625e6).collect();
    let a = Codebook::zeros(512);
    let b = a.complement();
    let mut switched = Vec::new();
    let mut independent = Vec::new();
    for seed in 0..60u64 {
        let e1 = sample_ensemble(seed, &geom, lo, hi, 1.0).unwrap();
        let e2 = sample_ensemble(seed + 1000, &geom, lo, hi, 1.0).unwrap();
        let kappa = RisPanel::calibrated_kappa(512, e1.mean_spacing());
        let panel = RisPanel::new(512, 0.01, PI, geom.lambda, kappa).unwrap();
        let after = perturb_ensemble(&e1, &a, &b, &panel, seed + 7).unwrap();
        let h1 = transfer_function(&e1, &geom, &grid);
        switched.push(complex_correlation(&h1, &transfer_function(&after, &geom, &grid)));
        independent.push(complex_correlation(&h1, &transfer_function(&e2, &geom, &grid)));
    }
    let (ms, _) = mean_std(&switched);
    let (mi, si) = mean_std(&independent);
    assert!(ms < mi + 3.0 * si, "switched {ms} vs independent {mi} +- {si}");
}
