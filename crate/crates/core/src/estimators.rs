//! The four estimators: plain Monte Carlo, standard importance sampling,
//! defensive importance sampling, and weight-bounded importance sampling.
//!
//! Importance weights are the ratio `W(x) = p(x)/q(x)` of the nominal density
//! to the sampling density. Weight bounding zeroes every sample whose weight
//! exceeds a bound `r`, which caps each summand at `r * max(f)` and so forces
//! a finite estimator variance at the price of a (typically small) bias. The
//! population variance of the unbounded IS estimator,
//! `(int f^2 W q dx - I^2)/n`, may be infinite; only the empirical variance of
//! the summands is exposed here.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// One draw from the sampling density together with everything needed to
/// weight it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeightedSample {
    /// The drawn point.
    pub point: Vec<f64>,
    /// Integrand value at the point, `f(x) >= 0`.
    pub f_value: f64,
    /// Nominal density `p(x)`.
    pub nominal_density: f64,
    /// Density actually sampled from, `q(x)` or a defensive mixture.
    pub proposal_density: f64,
    /// Importance weight `p(x)/q(x)`.
    pub weight: f64,
}

impl WeightedSample {
    /// Build a sample from raw density values. The sampling density must be
    /// positive wherever the nominal density is (support domination); a drawn
    /// point always has positive sampling density, so a zero here is rejected.
    pub fn new(point: Vec<f64>, f_value: f64, nominal: f64, proposal: f64) -> Result<Self> {
        if !f_value.is_finite() || f_value < 0.0 {
            return Err(Error::InvalidSample("f_value must be finite and >= 0"));
        }
        if !nominal.is_finite() || nominal < 0.0 {
            return Err(Error::InvalidSample(
                "nominal density must be finite and >= 0",
            ));
        }
        if !(proposal > 0.0) || !proposal.is_finite() {
            return Err(Error::SupportViolation {
                nominal,
                proposal,
            });
        }
        Ok(Self {
            point,
            f_value,
            nominal_density: nominal,
            proposal_density: proposal,
            weight: nominal / proposal,
        })
    }

    /// Build a sample from log densities. The weight is computed as
    /// `exp(log p - log q)`, which stays stable where the raw densities would
    /// underflow (e.g. ratios of high-dimensional Gaussians).
    pub fn from_log_densities(
        point: Vec<f64>,
        f_value: f64,
        log_nominal: f64,
        log_proposal: f64,
    ) -> Result<Self> {
        if !f_value.is_finite() || f_value < 0.0 {
            return Err(Error::InvalidSample("f_value must be finite and >= 0"));
        }
        if log_nominal.is_nan() || log_proposal.is_nan() || log_proposal == f64::INFINITY {
            return Err(Error::NonFinite("log density"));
        }
        if log_proposal == f64::NEG_INFINITY {
            return Err(Error::SupportViolation {
                nominal: log_nominal.exp(),
                proposal: 0.0,
            });
        }
        Ok(Self {
            point,
            f_value,
            nominal_density: log_nominal.exp(),
            proposal_density: log_proposal.exp(),
            weight: (log_nominal - log_proposal).exp(),
        })
    }
}

/// Which estimator produced an output.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Method {
    Mc,
    Is,
    Dis,
    Wbis,
}

impl std::fmt::Display for Method {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Method::Mc => "MC",
            Method::Is => "IS",
            Method::Dis => "DIS",
            Method::Wbis => "WBIS",
        })
    }
}

impl std::str::FromStr for Method {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s.to_ascii_uppercase().as_str() {
            "MC" => Ok(Method::Mc),
            "IS" => Ok(Method::Is),
            "DIS" => Ok(Method::Dis),
            "WBIS" => Ok(Method::Wbis),
            other => Err(format!("unknown method `{other}` (expected MC, IS, DIS, WBIS)")),
        }
    }
}

/// An estimate together with the empirical spread of its per-sample summands.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EstimatorOutput {
    /// Arithmetic mean of the per-sample summands.
    pub estimate: f64,
    /// Unbiased sample variance of the summands (0 when n = 1).
    pub sample_variance_of_terms: f64,
    /// Number of samples.
    pub n: usize,
    /// Estimator that produced this output.
    pub method: Method,
    /// Weight bound `r`; present only for WBIS.
    pub truncation_bound: Option<f64>,
    /// Defensive mixture weight; present only for DIS.
    pub alpha: Option<f64>,
}

// Mean and unbiased variance of the summands, summed strictly left to right
// so that estimators sharing summands agree bit-for-bit.
fn summand_output(terms: impl Iterator<Item = f64> + Clone, n: usize, method: Method) -> EstimatorOutput {
    let mut sum = 0.0;
    for t in terms.clone() {
        sum += t;
    }
    let estimate = sum / n as f64;
    let variance = if n > 1 {
        let mut ss = 0.0;
        for t in terms {
            ss += (t - estimate) * (t - estimate);
        }
        ss / (n as f64 - 1.0)
    } else {
        0.0
    };
    EstimatorOutput {
        estimate,
        sample_variance_of_terms: variance,
        n,
        method,
        truncation_bound: None,
        alpha: None,
    }
}

/// Plain Monte Carlo mean of integrand values drawn under the nominal
/// distribution.
pub fn mc_estimate(f_values: &[f64]) -> Result<EstimatorOutput> {
    if f_values.is_empty() {
        return Err(Error::EmptyInput("mc_estimate"));
    }
    Ok(summand_output(
        f_values.iter().copied(),
        f_values.len(),
        Method::Mc,
    ))
}

/// Standard importance sampling estimate, `(1/n) * sum f(x_i) W(x_i)`.
pub fn is_estimate(samples: &[WeightedSample]) -> Result<EstimatorOutput> {
    if samples.is_empty() {
        return Err(Error::EmptyInput("is_estimate"));
    }
    Ok(summand_output(
        samples.iter().map(|s| s.f_value * s.weight),
        samples.len(),
        Method::Is,
    ))
}

/// Defensive IS estimate over samples drawn from the defensive mixture. The
/// summation is identical to [`is_estimate`]; only the method tag and the
/// recorded mixture weight differ.
pub fn dis_estimate(samples: &[WeightedSample], alpha: f64) -> Result<EstimatorOutput> {
    check_alpha(alpha)?;
    if samples.is_empty() {
        return Err(Error::EmptyInput("dis_estimate"));
    }
    let mut out = summand_output(
        samples.iter().map(|s| s.f_value * s.weight),
        samples.len(),
        Method::Dis,
    );
    out.alpha = Some(alpha);
    Ok(out)
}

/// Defensive mixture density `alpha * p(x) + (1 - alpha) * q(x)`. Weights
/// against this density are bounded by `1/alpha`.
pub fn dis_mixture_density(p_value: f64, q_value: f64, alpha: f64) -> Result<f64> {
    check_alpha(alpha)?;
    if p_value < 0.0 || q_value < 0.0 {
        return Err(Error::InvalidSample("density values must be >= 0"));
    }
    Ok(alpha * p_value + (1.0 - alpha) * q_value)
}

/// Draw one point from the defensive mixture: the nominal sampler with
/// probability `alpha`, the proposal sampler otherwise.
pub fn dis_sample<R, N, P>(
    nominal_sampler: N,
    proposal_sampler: P,
    alpha: f64,
    rng: &mut R,
) -> Result<Vec<f64>>
where
    R: rand::Rng + ?Sized,
    N: FnOnce(&mut R) -> Vec<f64>,
    P: FnOnce(&mut R) -> Vec<f64>,
{
    check_alpha(alpha)?;
    let u: f64 = rng.random();
    if u < alpha {
        Ok(nominal_sampler(rng))
    } else {
        Ok(proposal_sampler(rng))
    }
}

/// Truncated weight: `w` when `w <= r`, zero above the bound. Ties at the
/// bound keep the weight.
pub fn truncate_weight(w: f64, r: f64) -> f64 {
    if w <= r {
        w
    } else {
        0.0
    }
}

/// Weight-bounded IS estimate, `(1/n) * sum f(x_i) W_r(x_i)`, where samples
/// whose weight exceeds `r` contribute zero.
pub fn wbis_estimate(samples: &[WeightedSample], r: f64) -> Result<EstimatorOutput> {
    if !(r > 0.0) {
        return Err(Error::InvalidBound(r));
    }
    if samples.is_empty() {
        return Err(Error::EmptyInput("wbis_estimate"));
    }
    let mut out = summand_output(
        samples.iter().map(|s| s.f_value * truncate_weight(s.weight, r)),
        samples.len(),
        Method::Wbis,
    );
    out.truncation_bound = Some(r);
    Ok(out)
}

fn check_alpha(alpha: f64) -> Result<()> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::InvalidAlpha(alpha));
    }
    Ok(())
}
