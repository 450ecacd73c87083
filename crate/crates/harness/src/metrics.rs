//! Error metrics over repeated estimates.
//!
//! With estimates `I_1..I_K` of a reference `I` and `n` samples per
//! estimate:
//!
//! - `NMSE = (n/K) sum (I_k - I)^2`, comparable across sample sizes;
//! - `RMSE = sqrt((1/K) sum (I_k - I)^2)`;
//! - `bias^2 = (mean(I_k) - I)^2` and `variance` the population variance,
//!   which decompose the squared error: `rmse^2 = bias^2 + variance`.

use serde::{Deserialize, Serialize};

use crate::error::HarnessError;
use crate::records::RunRecord;

/// Summary of a repeat set: all four metrics plus the mean selected weight
/// bound for WBIS runs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricsSummary {
    pub nmse: f64,
    pub rmse: f64,
    pub bias_squared: f64,
    pub variance: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mean_threshold_r: Option<f64>,
    pub repeats: usize,
    pub n: usize,
}

fn check_nonempty(estimates: &[f64], what: &'static str) -> Result<(), HarnessError> {
    if estimates.is_empty() {
        return Err(HarnessError::EmptyEstimates(what));
    }
    Ok(())
}

fn mean_squared_error(estimates: &[f64], reference: f64) -> f64 {
    estimates
        .iter()
        .map(|e| (e - reference) * (e - reference))
        .sum::<f64>()
        / estimates.len() as f64
}

/// Sample-size-normalized mean squared error, `(n/K) sum (I_k - I)^2`.
pub fn nmse(estimates: &[f64], reference: f64, n: usize) -> Result<f64, HarnessError> {
    check_nonempty(estimates, "nmse")?;
    Ok(n as f64 * mean_squared_error(estimates, reference))
}

/// Root mean squared error against the reference.
pub fn rmse(estimates: &[f64], reference: f64) -> Result<f64, HarnessError> {
    check_nonempty(estimates, "rmse")?;
    Ok(mean_squared_error(estimates, reference).sqrt())
}

/// Squared bias and population variance of the estimates; their sum is the
/// mean squared error.
pub fn bias_variance(estimates: &[f64], reference: f64) -> Result<(f64, f64), HarnessError> {
    if estimates.len() < 2 {
        return Err(HarnessError::TooFewEstimates {
            needed: 2,
            got: estimates.len(),
        });
    }
    let k = estimates.len() as f64;
    let mean = estimates.iter().sum::<f64>() / k;
    let bias_squared = (mean - reference) * (mean - reference);
    let variance = estimates.iter().map(|e| (e - mean) * (e - mean)).sum::<f64>() / k;
    Ok((bias_squared, variance))
}

/// Build the full summary for a repeat set.
pub fn summarize(
    records: &[RunRecord],
    reference: f64,
    n: usize,
) -> Result<MetricsSummary, HarnessError> {
    let estimates: Vec<f64> = records.iter().map(|r| r.estimate).collect();
    check_nonempty(&estimates, "summarize")?;
    let nmse = nmse(&estimates, reference, n)?;
    let rmse = rmse(&estimates, reference)?;
    let (bias_squared, variance) = if estimates.len() >= 2 {
        bias_variance(&estimates, reference)?
    } else {
        // A single estimate carries no spread; all error is bias.
        ((estimates[0] - reference).powi(2), 0.0)
    };
    let thresholds: Vec<f64> = records.iter().filter_map(|r| r.threshold_r).collect();
    let mean_threshold_r = if thresholds.is_empty() {
        None
    } else {
        Some(thresholds.iter().sum::<f64>() / thresholds.len() as f64)
    };
    Ok(MetricsSummary {
        nmse,
        rmse,
        bias_squared,
        variance,
        mean_threshold_r,
        repeats: estimates.len(),
        n,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_estimates_have_zero_error() {
        let ests = [2.5, 2.5, 2.5];
        assert_eq!(nmse(&ests, 2.5, 100).unwrap(), 0.0);
        assert_eq!(rmse(&ests, 2.5).unwrap(), 0.0);
        let (b, v) = bias_variance(&ests, 2.5).unwrap();
        assert_eq!((b, v), (0.0, 0.0));
    }

    #[test]
    fn hand_worked_values() {
        // [1.1, 0.9] against 1 at n = 100: (100/2) * 0.02 = 1.
        let ests = [1.1, 0.9];
        assert!((nmse(&ests, 1.0, 100).unwrap() - 1.0).abs() < 1e-12);

        // [3, 5] against 4: rmse = 1.
        assert!((rmse(&[3.0, 5.0], 4.0).unwrap() - 1.0).abs() < 1e-12);

        // Constant offset: all bias, no variance.
        let (b, v) = bias_variance(&[4.3, 4.3, 4.3, 4.3], 4.0).unwrap();
        assert!((b - 0.09).abs() < 1e-12);
        assert_eq!(v, 0.0);
    }

    #[test]
    fn decomposition_identities_hold() {
        let ests = [0.8, 1.3, 0.95, 1.1, 1.02, 0.7];
        let reference = 1.0;
        let n = 500;
        let nm = nmse(&ests, reference, n).unwrap();
        let rm = rmse(&ests, reference).unwrap();
        let (b, v) = bias_variance(&ests, reference).unwrap();
        assert!((rm * rm - (b + v)).abs() <= 1e-12 * rm * rm.max(1.0));
        assert!((nm - n as f64 * rm * rm).abs() <= 1e-12 * nm.max(1.0));
    }

    #[test]
    fn input_validation() {
        assert!(matches!(
            nmse(&[], 1.0, 10),
            Err(HarnessError::EmptyEstimates(_))
        ));
        assert!(matches!(
            rmse(&[], 1.0),
            Err(HarnessError::EmptyEstimates(_))
        ));
        assert!(matches!(
            bias_variance(&[1.0], 1.0),
            Err(HarnessError::TooFewEstimates { .. })
        ));
    }

    #[test]
    fn summary_single_repeat_is_pure_bias() {
        let records = vec![RunRecord {
            run_id: 0,
            seed: 0,
            estimate: 1.2,
            threshold_r: None,
            elapsed_ms: 0.0,
        }];
        let s = summarize(&records, 1.0, 50).unwrap();
        assert!((s.nmse - 50.0 * 0.04).abs() < 1e-12);
        assert_eq!(s.variance, 0.0);
        assert_eq!(s.mean_threshold_r, None);
    }
}
