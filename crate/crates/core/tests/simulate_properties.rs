mod common;

use common::{ks_one_sample, normal_cdf, QuadratureCdf};
use diffsel_core::simulate::{
    brownian_bridge_values, ea1_endpoint_proposal, ea1_endpoint_proposal_global, sample_stationary,
    simulate_path_stream,
};
use diffsel_core::{simulate_path, DiffusionFamily, Ea1Bounds, FamilyTag, RngStream};

fn family1() -> DiffusionFamily {
    DiffusionFamily::new(FamilyTag::Family1, 6.0, 2.0).unwrap()
}

#[test]
fn bridge_moments_match() {
    let (x0, y, delta) = (0.4, -0.2, 0.5);
    let times = [0.1, 0.25, 0.4];
    let reps = 40_000;
    let mut rng = RngStream::new(11, 0);
    let mut sum = [0.0; 3];
    let mut sum_sq = [0.0; 3];
    let mut cross = 0.0;
    for _ in 0..reps {
        let w = brownian_bridge_values(&times, x0, y, delta, &mut rng).unwrap();
        for i in 0..3 {
            sum[i] += w[i];
            sum_sq[i] += w[i] * w[i];
        }
        cross += w[0] * w[2];
    }
    let n = reps as f64;
    for (i, &t) in times.iter().enumerate() {
        let mean = x0 + t / delta * (y - x0);
        let var = t * (delta - t) / delta;
        let m = sum[i] / n;
        let v = sum_sq[i] / n - m * m;
        assert!(
            (m - mean).abs() <= 3.0 * (var / n).sqrt(),
            "mean at {t}: {m} vs {mean}"
        );
        // Var of a sample variance ≈ 2σ⁴/n for Gaussian values.
        assert!(
            (v - var).abs() <= 3.0 * (2.0 * var * var / n).sqrt(),
            "variance at {t}"
        );
    }
    let (s, t) = (times[0], times[2]);
    let cov_true = s * (delta - t) / delta;
    let m0 = sum[0] / n;
    let m2 = sum[2] / n;
    let cov = cross / n - m0 * m2;
    let v0 = times[0] * (delta - times[0]) / delta;
    let v2 = times[2] * (delta - times[2]) / delta;
    assert!((cov - cov_true).abs() <= 3.0 * ((v0 * v2 + cov_true * cov_true) / n).sqrt());
}

/// CDF of the endpoint target `∝ exp(A(y) − (y − x)²/(2Δ))`.
fn endpoint_target(family: &DiffusionFamily, x: f64, delta: f64) -> QuadratureCdf {
    let f = *family;
    QuadratureCdf::new(
        move |y| (f.big_a(y) - (y - x) * (y - x) / (2.0 * delta)).exp(),
        x - 3.0,
        x + 3.0,
        200_001,
    )
}

#[test]
fn endpoint_proposals_match_their_target() {
    let (fam, x, delta) = (family1(), 0.0, 0.05);
    let bounds = Ea1Bounds::for_family(&fam).unwrap();
    let target = endpoint_target(&fam, x, delta);
    let mut rng = RngStream::new(12, 0);
    let tangent: Vec<f64> = (0..100_000)
        .map(|_| ea1_endpoint_proposal(x, delta, &fam, &bounds, &mut rng).unwrap())
        .collect();
    let global: Vec<f64> = (0..100_000)
        .map(|_| ea1_endpoint_proposal_global(x, delta, &fam, &bounds, &mut rng).unwrap())
        .collect();
    let ks_t = ks_one_sample(&tangent, |y| target.cdf(y));
    let ks_g = ks_one_sample(&global, |y| target.cdf(y));
    assert!(ks_t < 0.01, "tangent proposal KS {ks_t}");
    assert!(ks_g < 0.01, "global proposal KS {ks_g}");
}

#[test]
fn endpoint_proposal_off_centre() {
    let fam = DiffusionFamily::new(FamilyTag::Family2, 3.0, 2.0).unwrap();
    let bounds = Ea1Bounds::for_family(&fam).unwrap();
    let (x, delta) = (1.3, 0.05);
    let target = endpoint_target(&fam, x, delta);
    let mut rng = RngStream::new(13, 0);
    let draws: Vec<f64> = (0..50_000)
        .map(|_| ea1_endpoint_proposal(x, delta, &fam, &bounds, &mut rng).unwrap())
        .collect();
    assert!(ks_one_sample(&draws, |y| target.cdf(y)) < 0.015);
}

#[test]
fn zero_drift_increments_are_gaussian_for_several_seeds() {
    let delta = 0.2;
    for seed in 0..5 {
        let (xi, x) = simulate_path(&DiffusionFamily::unit_test(), 10_000, delta, seed).unwrap();
        assert_eq!(xi.values()[0], 0.0);
        assert_eq!(xi, x);
        let incs: Vec<f64> = xi.values().windows(2).map(|w| w[1] - w[0]).collect();
        assert!(ks_one_sample(&incs, normal_cdf(0.0, delta.sqrt())) < 0.02);
    }
}

#[test]
fn path_marginals_stay_stationary() {
    // Thinned values from independent streams, compared with the ξ law ∝ cosh(cξ)^{-ν}.
    let fam = family1();
    let nu = 1.0 + 2.0 * fam.theta() / (fam.c() * fam.c());
    let law = QuadratureCdf::new(|xi| (2.0 * xi).cosh().powf(-nu), -10.0, 10.0, 400_001);
    let mut pooled = Vec::new();
    for stream in 0..40 {
        let (xi, _) = simulate_path_stream(&fam, 2000, 0.05, 77, stream).unwrap();
        pooled.extend(xi.values().iter().step_by(40).copied());
    }
    let ks = ks_one_sample(&pooled, |x| law.cdf(x));
    assert!(
        ks < 0.03,
        "pooled marginal KS {ks} over {} values",
        pooled.len()
    );
}

#[test]
fn seeds_and_streams_determine_paths() {
    let fam = family1();
    let a = simulate_path_stream(&fam, 300, 0.05, 5, 3).unwrap();
    let b = simulate_path_stream(&fam, 300, 0.05, 5, 3).unwrap();
    let c = simulate_path_stream(&fam, 300, 0.05, 5, 4).unwrap();
    let d = simulate_path_stream(&fam, 300, 0.05, 6, 3).unwrap();
    assert_eq!(a, b);
    assert_ne!(a.0, c.0);
    assert_ne!(a.0, d.0);
    assert_eq!(
        simulate_path(&fam, 300, 0.05, 5).unwrap(),
        simulate_path_stream(&fam, 300, 0.05, 5, 0).unwrap()
    );
}

#[test]
fn observed_paths_are_images_of_the_unit_diffusion() {
    for tag in [
        FamilyTag::Family1,
        FamilyTag::Family2,
        FamilyTag::Family2TwoBumps,
    ] {
        let fam = DiffusionFamily::new(tag, 3.0, 2.0).unwrap();
        let (xi, x) = simulate_path(&fam, 200, 0.05, 9).unwrap();
        assert_eq!(xi.values().len(), 201);
        for (&a, &b) in xi.values().iter().zip(x.values()) {
            assert_eq!(b, fam.to_observed(a));
        }
    }
}

#[test]
fn bounds_certify_for_supported_parameters() {
    for tag in [
        FamilyTag::Family1,
        FamilyTag::Family2,
        FamilyTag::Family2TwoBumps,
    ] {
        for (theta, c) in [(6.0, 2.0), (3.0, 2.0), (1.0, 1.0), (0.5, 4.0)] {
            let fam = DiffusionFamily::new(tag, theta, c).unwrap();
            let b = Ea1Bounds::for_family(&fam).unwrap();
            b.certify(&fam).unwrap();
        }
    }
}

#[test]
fn stationary_draws_are_reproducible() {
    let fam = family1();
    let mut r1 = RngStream::new(1, 1);
    let mut r2 = RngStream::new(1, 1);
    for _ in 0..100 {
        assert_eq!(
            sample_stationary(&fam, &mut r1).unwrap(),
            sample_stationary(&fam, &mut r2).unwrap()
        );
    }
}
