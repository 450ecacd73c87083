//! Desk-scale behavior of the estimators on a problem with a known answer.
//!
//! Target: E_p[x^2] with p = uniform(0, 1), using the polynomial proposal
//! q(x) = 2x (inverse-CDF sampling via sqrt). The quadrature truth is 1/3,
//! and the proposal dominates the support except at the single point 0.

use rand::Rng;
use wbis_core::estimators::{
    dis_estimate, dis_mixture_density, dis_sample, is_estimate, mc_estimate, wbis_estimate,
    WeightedSample,
};
use wbis_core::rng::stream_rng;

const N: usize = 200_000;

fn quadrature_truth() -> f64 {
    wbis_oracle::adaptive_simpson(|x| x * x, 0.0, 1.0, 1e-13)
}

fn draw_q(rng: &mut impl Rng) -> f64 {
    // Inverse CDF of q(x) = 2x on (0, 1): x = sqrt(u).
    loop {
        let u: f64 = rng.random();
        if u > 0.0 {
            return u.sqrt();
        }
    }
}

fn three_se(out: &wbis_core::estimators::EstimatorOutput) -> f64 {
    3.0 * (out.sample_variance_of_terms / out.n as f64).sqrt()
}

#[test]
fn mc_converges_to_quadrature_truth() {
    let truth = quadrature_truth();
    let mut rng = stream_rng(900, 0);
    let f_values: Vec<f64> = (0..N)
        .map(|_| {
            let x: f64 = rng.random();
            x * x
        })
        .collect();
    let out = mc_estimate(&f_values).unwrap();
    assert!(
        (out.estimate - truth).abs() <= three_se(&out),
        "MC {} vs truth {truth}",
        out.estimate
    );
}

#[test]
fn is_converges_to_quadrature_truth() {
    let truth = quadrature_truth();
    let mut rng = stream_rng(900, 1);
    let samples: Vec<WeightedSample> = (0..N)
        .map(|_| {
            let x = draw_q(&mut rng);
            WeightedSample::new(vec![x], x * x, 1.0, 2.0 * x).unwrap()
        })
        .collect();
    let out = is_estimate(&samples).unwrap();
    assert!(
        (out.estimate - truth).abs() <= three_se(&out),
        "IS {} vs truth {truth}",
        out.estimate
    );
}

#[test]
fn dis_converges_to_quadrature_truth() {
    let truth = quadrature_truth();
    let alpha = 0.3;
    let mut rng = stream_rng(900, 2);
    let samples: Vec<WeightedSample> = (0..N)
        .map(|_| {
            let point = dis_sample(
                |r: &mut _| vec![r.random::<f64>()],
                |r: &mut _| vec![draw_q(r)],
                alpha,
                &mut rng,
            )
            .unwrap();
            let x = point[0];
            let q_alpha = dis_mixture_density(1.0, 2.0 * x, alpha).unwrap();
            WeightedSample::new(point, x * x, 1.0, q_alpha).unwrap()
        })
        .collect();

    // The mixture bounds every weight by 1/alpha.
    for s in &samples {
        assert!(s.weight <= 1.0 / alpha + 1e-12);
    }

    let out = dis_estimate(&samples, alpha).unwrap();
    assert_eq!(out.alpha, Some(alpha));
    assert!(
        (out.estimate - truth).abs() <= three_se(&out),
        "DIS {} vs truth {truth}",
        out.estimate
    );
}

#[test]
fn wbis_never_exceeds_is_on_shared_batches() {
    let mut rng = stream_rng(900, 3);
    for trial in 0..20 {
        let samples: Vec<WeightedSample> = (0..2000)
            .map(|_| {
                let x = draw_q(&mut rng);
                WeightedSample::new(vec![x], x * x, 1.0, 2.0 * x).unwrap()
            })
            .collect();
        let is = is_estimate(&samples).unwrap().estimate;
        for r in [0.6, 1.2, 2.5, 10.0, 1e6] {
            let wb = wbis_estimate(&samples, r).unwrap().estimate;
            assert!(wb <= is + 1e-15, "trial {trial}, r {r}: WBIS {wb} > IS {is}");
        }
    }
}
