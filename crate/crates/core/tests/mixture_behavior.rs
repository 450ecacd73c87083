//! Statistical behavior of the mixture benchmark against quadrature oracles.

use rand::Rng;
use wbis_core::estimators::{dis_sample, mc_estimate};
use wbis_core::mixture::MixtureProblem;
use wbis_core::rng::stream_rng;

#[test]
fn nominal_mc_recovers_the_unit_integral() {
    // Under the uniform nominal the integral is exactly 1.
    let problem = MixtureProblem::default();
    let mut rng = stream_rng(910, 0);
    let n = 1_000_000usize;
    let f_values: Vec<f64> = (0..n)
        .map(|_| problem.integrand(&problem.sample_nominal(&mut rng)))
        .collect();
    let out = mc_estimate(&f_values).unwrap();
    let se = (out.sample_variance_of_terms / n as f64).sqrt();
    assert!(
        (out.estimate - 1.0).abs() <= 3.0 * se,
        "MC {} (se {se})",
        out.estimate
    );
}

#[test]
fn product_proposal_density_normalizes() {
    // Per-axis normalization is 1e-10-tight; the 5-D product then holds to
    // 1e-8. The product is a tensor quadrature over an axis rule.
    let problem = MixtureProblem::default();
    let axis = wbis_oracle::adaptive_simpson(|x| problem.density().pdf(x), -0.5, 0.5, 1e-13);
    assert!((axis - 1.0).abs() < 1e-10, "axis integral {axis}");
    let five_d = axis.powi(5);
    assert!((five_d - 1.0).abs() < 1e-8, "product integral {five_d}");
}

#[test]
fn defensive_mixture_moments_match_component_quadrature() {
    // Per-coordinate moments of the alpha-mixture of the uniform nominal and
    // the product proposal: quadrature on each component density gives the
    // expected values.
    let problem = MixtureProblem::default();
    let alpha = 0.5;
    let q = problem.density();

    let first_p = wbis_oracle::adaptive_simpson(|x| x, -0.5, 0.5, 1e-13);
    let first_q = wbis_oracle::adaptive_simpson(|x| x * q.pdf(x), -0.5, 0.5, 1e-13);
    let second_p = wbis_oracle::adaptive_simpson(|x| x * x, -0.5, 0.5, 1e-13);
    let second_q = wbis_oracle::adaptive_simpson(|x| x * x * q.pdf(x), -0.5, 0.5, 1e-13);
    let want_first = alpha * first_p + (1.0 - alpha) * first_q;
    let want_second = alpha * second_p + (1.0 - alpha) * second_q;

    let mut rng = stream_rng(910, 1);
    let n = 400_000usize;
    let mut sum = [0.0f64; 2];
    let mut sum_sq = [0.0f64; 2];
    for _ in 0..n {
        let point = dis_sample(
            |r: &mut _| problem.sample_nominal(r),
            |r: &mut _| problem.sample_proposal(r),
            alpha,
            &mut rng,
        )
        .unwrap();
        // All coordinates are exchangeable; use the first.
        let x = point[0];
        sum[0] += x;
        sum_sq[0] += (x - want_first) * (x - want_first);
        sum[1] += x * x;
        sum_sq[1] += (x * x - want_second) * (x * x - want_second);
    }
    for (i, want) in [want_first, want_second].into_iter().enumerate() {
        let mean = sum[i] / n as f64;
        let se = (sum_sq[i] / n as f64 / n as f64).sqrt();
        assert!(
            (mean - want).abs() <= 3.0 * se,
            "moment {i}: empirical {mean}, quadrature {want}, se {se}"
        );
    }
}

#[test]
fn is_weights_are_unbounded_toward_the_boundary() {
    // The integrand stays above a positive floor while the proposal density
    // vanishes at the boundary, so weights grow without bound.
    let problem = MixtureProblem::default();
    let mut rng = stream_rng(910, 2);
    let mut max_weight: f64 = 0.0;
    for _ in 0..100_000 {
        let x = problem.sample_proposal(&mut rng);
        max_weight = max_weight.max(problem.weight(&x).unwrap());
        assert!(problem.integrand(&x) >= 0.2e-15);
    }
    assert!(
        max_weight > 10.0,
        "100k proposal draws never saw a large weight ({max_weight})"
    );
    // Deterministic check of the blowup scale near the boundary.
    assert!(problem.weight(&[0.49; 5]).unwrap() > 1e3);
}
