//! The five-dimensional mixture benchmark.
//!
//! The nominal distribution is uniform on the cube (-0.5, 0.5)^5. The
//! integrand is a 0.8/0.2 mixture of a product of truncated-normal-shaped
//! densities and a slightly perturbed copy of that product, so the true
//! integral is exactly 1. The IS density is the unperturbed product itself:
//! it matches the main lobe well, but the integrand stays bounded below by a
//! positive constant while the IS density vanishes at the boundary, so the
//! importance weight is unbounded and standard IS has infinite variance.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::stats::{normal_cdf, normal_pdf};

/// One-dimensional density `beta(theta) * (phi(theta x) - phi(theta/2))` on
/// (-0.5, 0.5), zero outside. It vanishes at the interval ends.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NmulDensity {
    theta: f64,
    beta: f64,
    /// phi(theta/2), the constant subtracted inside the density.
    offset: f64,
    envelope_max: f64,
}

/// Normalizing constant `1 / ((Phi(theta/2) - Phi(-theta/2))/theta -
/// phi(theta/2))`, which makes [`nmul_pdf`] integrate to 1.
pub fn nmul_beta(theta: f64) -> Result<f64> {
    if !(theta > 0.0) || !theta.is_finite() {
        return Err(Error::Normalization(format!(
            "theta must be positive and finite, got {theta}"
        )));
    }
    let half = 0.5 * theta;
    let integral = (normal_cdf(half) - normal_cdf(-half)) / theta - normal_pdf(half);
    if !(integral > 0.0) {
        return Err(Error::Normalization(format!(
            "normalizing integral is {integral} for theta {theta}; density would not be positive"
        )));
    }
    Ok(1.0 / integral)
}

/// The density value at `x` for shape parameter `theta`; zero outside
/// [-0.5, 0.5]. Convenience wrapper that recomputes the normalizer; hot
/// paths should hold an [`NmulDensity`].
pub fn nmul_pdf(x: f64, theta: f64) -> f64 {
    match NmulDensity::new(theta) {
        Ok(d) => d.pdf(x),
        Err(_) => 0.0,
    }
}

/// Draw one value with density [`nmul_pdf`].
pub fn nmul_sample<R: rand::Rng + ?Sized>(theta: f64, rng: &mut R) -> Result<f64> {
    Ok(NmulDensity::new(theta)?.sample(rng))
}

impl NmulDensity {
    pub fn new(theta: f64) -> Result<Self> {
        let beta = nmul_beta(theta)?;
        let offset = normal_pdf(0.5 * theta);
        let envelope_max = beta * (normal_pdf(0.0) - offset);
        Ok(Self {
            theta,
            beta,
            offset,
            envelope_max,
        })
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    /// Supremum of the density, attained at 0; the rejection-sampling
    /// envelope constant.
    pub fn envelope_max(&self) -> f64 {
        self.envelope_max
    }

    pub fn pdf(&self, x: f64) -> f64 {
        if !(-0.5..=0.5).contains(&x) {
            return 0.0;
        }
        self.beta * (normal_pdf(self.theta * x) - normal_pdf(0.5 * self.theta))
    }

    /// Rejection sampling against the flat envelope. Acceptance is strict, so
    /// points where the density vanishes (the interval ends) are never
    /// returned and every draw lies in the open interval.
    pub fn sample<R: rand::Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        loop {
            let x = rng.random::<f64>() - 0.5;
            let u: f64 = rng.random();
            if u * self.envelope_max < self.pdf(x) {
                return x;
            }
        }
    }
}

/// Parameters of the mixture benchmark. [`Default`] gives the reference
/// setup: dimension 5, theta 2, perturbation 1e-3, mixture weights 0.8/0.2.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MixtureProblem {
    dimension: usize,
    perturbation: f64,
    mix_weight_main: f64,
    mix_weight_perturbed: f64,
    density: NmulDensity,
}

impl Default for MixtureProblem {
    fn default() -> Self {
        Self::new(5, 2.0, 1e-3, 0.8, 0.2).expect("reference parameters are valid")
    }
}

impl MixtureProblem {
    pub fn new(
        dimension: usize,
        theta: f64,
        perturbation: f64,
        mix_weight_main: f64,
        mix_weight_perturbed: f64,
    ) -> Result<Self> {
        if dimension == 0 {
            return Err(Error::Normalization("dimension must be positive".into()));
        }
        if !(perturbation >= 0.0) || !perturbation.is_finite() {
            return Err(Error::Normalization(format!(
                "perturbation must be finite and >= 0, got {perturbation}"
            )));
        }
        if (mix_weight_main + mix_weight_perturbed - 1.0).abs() > 1e-12
            || mix_weight_main < 0.0
            || mix_weight_perturbed < 0.0
        {
            return Err(Error::Normalization(format!(
                "mixture weights must be nonnegative and sum to 1, got {mix_weight_main} + {mix_weight_perturbed}"
            )));
        }
        Ok(Self {
            dimension,
            perturbation,
            mix_weight_main,
            mix_weight_perturbed,
            density: NmulDensity::new(theta)?,
        })
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn theta(&self) -> f64 {
        self.density.theta()
    }

    pub fn perturbation(&self) -> f64 {
        self.perturbation
    }

    pub fn mix_weights(&self) -> (f64, f64) {
        (self.mix_weight_main, self.mix_weight_perturbed)
    }

    pub fn density(&self) -> &NmulDensity {
        &self.density
    }

    /// The integrand: `w_main * prod_j N(x_j)` plus `w_pert` times the
    /// product of perturbed factors `N(x_j) + d - 2d * I(|x_j| <= 1/4)`.
    /// With the reference parameters every perturbed factor is at least `d`,
    /// so the integrand is bounded below by `w_pert * d^dim > 0` on the
    /// closed cube.
    pub fn integrand(&self, x: &[f64]) -> f64 {
        debug_assert_eq!(x.len(), self.dimension);
        let d = self.perturbation;
        let mut main = 1.0;
        let mut pert = 1.0;
        for &xi in x {
            let n = self.density.pdf(xi);
            main *= n;
            pert *= if (-0.25..=0.25).contains(&xi) {
                n - d
            } else {
                n + d
            };
        }
        self.mix_weight_main * main + self.mix_weight_perturbed * pert
    }

    /// Uniform nominal density: 1 inside the open cube, 0 outside.
    pub fn nominal_pdf(&self, x: &[f64]) -> f64 {
        if x.iter().all(|xi| xi.abs() < 0.5) {
            1.0
        } else {
            0.0
        }
    }

    /// Product IS density `prod_j N(x_j)`.
    pub fn proposal_pdf(&self, x: &[f64]) -> f64 {
        debug_assert_eq!(x.len(), self.dimension);
        x.iter().map(|&xi| self.density.pdf(xi)).product()
    }

    /// Importance weight `1 / prod_j N(x_j)` of the uniform nominal against
    /// the product IS density. Unbounded toward the cube boundary; a point
    /// where the IS density vanishes is a support violation.
    pub fn weight(&self, x: &[f64]) -> Result<f64> {
        let q = self.proposal_pdf(x);
        if !(q > 0.0) {
            return Err(Error::SupportViolation {
                nominal: self.nominal_pdf(x),
                proposal: q,
            });
        }
        Ok(1.0 / q)
    }

    /// Draw from the uniform nominal on the open cube.
    pub fn sample_nominal<R: rand::Rng + ?Sized>(&self, rng: &mut R) -> Vec<f64> {
        (0..self.dimension)
            .map(|_| loop {
                let x = rng.random::<f64>() - 0.5;
                if x > -0.5 {
                    return x;
                }
            })
            .collect()
    }

    /// Draw from the product IS density.
    pub fn sample_proposal<R: rand::Rng + ?Sized>(&self, rng: &mut R) -> Vec<f64> {
        (0..self.dimension)
            .map(|_| self.density.sample(rng))
            .collect()
    }
}

static DEFAULT_PROBLEM: std::sync::OnceLock<MixtureProblem> = std::sync::OnceLock::new();

fn default_problem() -> &'static MixtureProblem {
    DEFAULT_PROBLEM.get_or_init(MixtureProblem::default)
}

/// The reference integrand at `x` (dimension 5, theta 2).
pub fn integrand_f(x: &[f64]) -> f64 {
    default_problem().integrand(x)
}

/// The reference importance weight at `x` (dimension 5, theta 2).
pub fn weight_fn(x: &[f64]) -> Result<f64> {
    default_problem().weight(x)
}
