//! The pair statistic Z on a single edge: its eigenvalue sampler against a
//! from-scratch covariance construction, the closed-form bounds against a
//! dense search oracle, and the exact MGF against simulation.

use nalgebra::DMatrix;

use mgd::bounds::{
    chernoff_optimized, exact_mgf_log, hw_bound_eq3, hw_bound_eq4, lemma2_spec, sample_quadform,
};
use mgd::model::CovarianceSpec;
use mgd::rng::{Stream, StreamKind};
use mgd::util::binom2;

/// Two-sample Kolmogorov-Smirnov statistic (sup gap of empirical CDFs).
fn ks_statistic(a: &mut [f64], b: &mut [f64]) -> f64 {
    a.sort_by(f64::total_cmp);
    b.sort_by(f64::total_cmp);
    let (mut i, mut j, mut sup) = (0usize, 0usize, 0f64);
    while i < a.len() && j < b.len() {
        if a[i] <= b[j] {
            i += 1;
        } else {
            j += 1;
        }
        let gap = (i as f64 / a.len() as f64 - j as f64 / b.len() as f64).abs();
        sup = sup.max(gap);
    }
    sup
}

/// The eigenvalue-specified sampler and the definition Z = sum_{k<l} Y_k Y_l
/// with Y ~ N(0, Sigma) describe the same distribution. Two-sample KS test
/// at level 1e-3 on 1e5 draws per side; the acceptance region is
/// c(alpha) * sqrt((n1+n2)/(n1 n2)) ~ 8.72e-3 here, and the seeds are fixed.
#[test]
fn eigen_sampler_matches_direct_definition() {
    for (m, rho, seed) in [(2usize, 0.3f64, 11u64), (3, 0.5, 12)] {
        let spec = lemma2_spec(m, rho).unwrap();
        let count = 100_000usize;
        let mut via_eigs = sample_quadform(&spec, seed, count);

        let cov = CovarianceSpec::new(m, rho).unwrap();
        let eig = cov.sigma().clone().symmetric_eigen();
        let sqrt_sigma = &eig.eigenvectors
            * DMatrix::from_diagonal(&eig.eigenvalues.map(f64::sqrt))
            * eig.eigenvectors.transpose();
        let mut stream = Stream::new(seed ^ 0xD1CE, StreamKind::QuadFormChunk, 1);
        let mut direct = Vec::with_capacity(count);
        for _ in 0..count {
            let g = DMatrix::from_fn(m, 1, |_, _| stream.normal());
            let y = &sqrt_sigma * g;
            let mut z = 0.0;
            for k in 0..m {
                for l in (k + 1)..m {
                    z += y[(k, 0)] * y[(l, 0)];
                }
            }
            direct.push(z);
        }

        let ks = ks_statistic(&mut via_eigs, &mut direct);
        let alpha: f64 = 1e-3;
        let crit = ((2.0 / alpha).ln() / 2.0).sqrt() * (2.0 / count as f64).sqrt();
        assert!(
            ks <= crit,
            "KS {ks} above critical {crit} at m={m} rho={rho}"
        );
    }
}

/// Golden-section minimization against a brute-force scan of the same
/// objective theta^2 F^2/(1 - 2 a theta) - theta t over 1e6 grid points.
#[test]
fn chernoff_matches_dense_theta_scan() {
    let spec = lemma2_spec(3, 0.5).unwrap();
    let f2 = spec.frobenius_sq();
    let a = spec.spectral();
    for t in [0.5f64, 2.0, 8.0] {
        let theta_max = (1.0 - 1e-12) / (2.0 * a);
        let mut best = f64::INFINITY;
        let grid = 1_000_000;
        for i in 1..grid {
            let theta = theta_max * i as f64 / grid as f64;
            let obj = theta * theta * f2 / (1.0 - 2.0 * a * theta) - theta * t;
            best = best.min(obj);
        }
        let scan = best.exp();
        let opt = chernoff_optimized(&spec, t).unwrap();
        assert!(
            (opt - scan).abs() <= 1e-6 * scan,
            "optimized {opt} vs scan {scan} at t={t}"
        );
        // The search also never lands above the scan's grid minimum.
        assert!(opt <= scan * (1.0 + 1e-12));
    }
}

/// chernoff <= eq3 <= eq4(gamma) for every gamma: the eq4 exponent
/// min(gamma A, (1-gamma) B) is maximized over gamma at the harmonic mean
/// AB/(A+B), which is exactly the eq3 exponent.
#[test]
fn bound_chain_is_ordered_for_every_gamma() {
    for m in [2usize, 3, 5, 8] {
        for rho in [0.0, 0.3, 0.6, 0.9] {
            let spec = lemma2_spec(m, rho).unwrap();
            let sd = spec.variance().sqrt();
            for j in 1..=10 {
                let t = 4.0 * sd * j as f64 / 10.0;
                let eq3 = hw_bound_eq3(&spec, t).unwrap();
                let cher = chernoff_optimized(&spec, t).unwrap();
                assert!(
                    cher <= eq3 * (1.0 + 1e-12),
                    "chernoff {cher} above eq3 {eq3} at m={m} rho={rho} t={t}"
                );
                for g in 1..10 {
                    let eq4 = hw_bound_eq4(&spec, t, g as f64 / 10.0).unwrap();
                    assert!(
                        eq3 <= eq4 * (1.0 + 1e-12),
                        "eq3 {eq3} above eq4 {eq4} at m={m} rho={rho} t={t} gamma=0.{g}"
                    );
                }
            }
        }
    }
}

#[test]
fn exact_mgf_matches_simulation_and_dominates_centered_surrogate() {
    let spec = lemma2_spec(2, 0.3).unwrap();
    let count = 2_000_000usize;
    let draws = sample_quadform(&spec, 77, count);
    for theta in [0.15f64, 0.3] {
        // Both E[e^(theta Z)] and E[e^(2 theta Z)] are finite here
        // (2 theta lambda_max = 0.39 < 1), so the plug-in standard error is valid.
        let vals: Vec<f64> = draws.iter().map(|z| (theta * z).exp()).collect();
        let mean = vals.iter().sum::<f64>() / count as f64;
        let var = vals.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / count as f64;
        let se = (var / count as f64).sqrt();
        let closed = exact_mgf_log(&spec, theta).unwrap().exp();
        assert!(
            (mean - closed).abs() <= 4.0 * se,
            "empirical MGF {mean} vs closed form {closed} (se {se}) at theta={theta}"
        );
    }
    // Centered log-MGF never exceeds the surrogate the tail bounds are built
    // on: log E[e^(theta(Z - EZ))] <= theta^2 F^2 / (1 - 2 a theta).
    let trace = binom2(2) as f64 * 0.3;
    let f2 = spec.frobenius_sq();
    let a = spec.spectral();
    for k in 1..60 {
        let theta = k as f64 / 60.0 * (1.0 - 1e-6) / (2.0 * a);
        let centered = exact_mgf_log(&spec, theta).unwrap() - theta * trace;
        let surrogate = theta * theta * f2 / (1.0 - 2.0 * a * theta);
        assert!(
            centered <= surrogate + 1e-12,
            "centered log-MGF {centered} above surrogate {surrogate} at theta={theta}"
        );
    }
}
