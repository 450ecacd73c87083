//! Weight-bound selection from IS samples.
//!
//! The importance weights are split into groups of equal size; if the
//! truncated weight `W_r` has finite variance, the CLT makes the per-group
//! means approximately normal. The selected bound is the largest candidate
//! `r` whose group means pass the Anderson-Darling normality test at the
//! requested significance.
//!
//! Candidates are scanned on a fixed descending grid: 200 log-spaced values
//! between the empirical median weight and the maximum observed weight (the
//! maximum itself included). The first passing candidate wins. Passing is not
//! monotone in `r`, so the fixed grid plus descending scan is what makes the
//! "largest passing" answer deterministic and reproducible. When the maximum
//! passes, truncation is a no-op on the batch, which is the `r = infinity`
//! outcome. When nothing passes, the smallest candidate (the median weight)
//! is returned with `passed_any = false`: aggressive truncation bounds the
//! variance at the cost of bias, and the flag lets callers report it.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::estimators::truncate_weight;
use crate::stats::anderson_darling_test;

const CANDIDATE_GRID_SIZE: usize = 200;

/// How a weight batch is split into groups for the CLT statistic.
///
/// `group_size` is `round(sqrt(n)/C)` and `group_count` then uses as much of
/// the batch as whole groups allow, leaving fewer than one group of trailing
/// samples unused. With `C = 1` both come out at `sqrt(n)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GroupingPlan {
    pub n_total: usize,
    pub group_count: usize,
    pub group_size: usize,
    pub c_constant: f64,
}

/// Build a grouping plan for `n_total` samples with balance constant `C`.
/// Both the group count and the group size must come out at 8 or more.
pub fn make_grouping(n_total: usize, c_constant: f64) -> Result<GroupingPlan> {
    if !(c_constant > 0.0) || !c_constant.is_finite() {
        return Err(Error::InvalidGrouping(format!(
            "c_constant must be positive and finite, got {c_constant}"
        )));
    }
    if n_total < 64 {
        return Err(Error::InvalidGrouping(format!(
            "n_total must be at least 64, got {n_total}"
        )));
    }
    let sqrt_n = (n_total as f64).sqrt();
    let group_size = (sqrt_n / c_constant).round() as usize;
    if group_size < 8 {
        return Err(Error::InvalidGrouping(format!(
            "group_size {group_size} below the minimum of 8 (n_total {n_total}, C {c_constant})"
        )));
    }
    let group_count = n_total / group_size;
    if group_count < 8 {
        return Err(Error::InvalidGrouping(format!(
            "group_count {group_count} below the minimum of 8 (n_total {n_total}, C {c_constant})"
        )));
    }
    Ok(GroupingPlan {
        n_total,
        group_count,
        group_size,
        c_constant,
    })
}

/// Mean truncated weight per contiguous group: element `j` averages
/// `W_r` over the `j`-th block of `plan.group_size` weights.
pub fn group_means(weights: &[f64], plan: &GroupingPlan, r: f64) -> Result<Vec<f64>> {
    if !(r > 0.0) {
        return Err(Error::InvalidBound(r));
    }
    let needed = plan.group_count * plan.group_size;
    if weights.len() < needed {
        return Err(Error::InsufficientSamples {
            needed,
            got: weights.len(),
        });
    }
    let inv = 1.0 / plan.group_size as f64;
    Ok(weights[..needed]
        .chunks_exact(plan.group_size)
        .map(|block| block.iter().map(|&w| truncate_weight(w, r)).sum::<f64>() * inv)
        .collect())
}

/// Diagnostics for one candidate bound.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CandidateDiagnostic {
    pub candidate_r: f64,
    /// Corrected A^2 of the group means; infinite when the group means were
    /// degenerate (zero variance) and the candidate was recorded as failed.
    pub adjusted_statistic: f64,
    pub passed: bool,
}

/// Outcome of the threshold search.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ThresholdResult {
    /// Selected bound. Equal to the maximum observed weight when the top
    /// candidate passes, in which case truncation is a no-op on this batch.
    pub r: f64,
    /// Whether any candidate passed; when false, `r` is the smallest
    /// candidate (the median weight).
    pub passed_any: bool,
    /// Candidates evaluated by the descending scan, in scan order.
    pub candidates_evaluated: Vec<CandidateDiagnostic>,
    pub significance: f64,
}

/// Select the weight bound: scan the candidate grid from the largest value
/// down and return the first candidate whose group means pass the normality
/// test. Deterministic given weights, plan, and significance.
pub fn select_threshold(
    weights: &[f64],
    plan: &GroupingPlan,
    significance: f64,
) -> Result<ThresholdResult> {
    crate::stats::ad_critical_value(significance)?;
    let needed = plan.group_count * plan.group_size;
    if weights.len() < needed {
        return Err(Error::InsufficientSamples {
            needed,
            got: weights.len(),
        });
    }
    if weights.iter().any(|w| !w.is_finite() || *w < 0.0) {
        return Err(Error::NonFinite("weights"));
    }

    let grid = candidate_grid(weights)?;
    let mut candidates_evaluated = Vec::with_capacity(grid.len());
    let mut selected = None;
    for &candidate in &grid {
        let means = group_means(weights, plan, candidate)?;
        let diag = match anderson_darling_test(&means, significance) {
            Ok(res) => CandidateDiagnostic {
                candidate_r: candidate,
                adjusted_statistic: res.adjusted_statistic,
                passed: res.passed,
            },
            // Zero variance across groups: the candidate fails, it is not an
            // error of the search itself.
            Err(Error::DegenerateSample) => CandidateDiagnostic {
                candidate_r: candidate,
                adjusted_statistic: f64::INFINITY,
                passed: false,
            },
            Err(e) => return Err(e),
        };
        let passed = diag.passed;
        candidates_evaluated.push(diag);
        if passed {
            selected = Some(candidate);
            break;
        }
    }

    Ok(ThresholdResult {
        r: selected.unwrap_or_else(|| *grid.last().expect("grid is never empty")),
        passed_any: selected.is_some(),
        candidates_evaluated,
        significance,
    })
}

// Descending candidate grid: log-spaced from the median weight up to the
// maximum observed weight, deduplicated, largest first.
fn candidate_grid(weights: &[f64]) -> Result<Vec<f64>> {
    let max = weights.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if !(max > 0.0) {
        return Err(Error::ThresholdSelection(
            "all weights are zero; no positive candidate bound exists".into(),
        ));
    }
    let mut sorted = weights.to_vec();
    sorted.sort_unstable_by(f64::total_cmp);
    let median = {
        let n = sorted.len();
        if n % 2 == 1 {
            sorted[n / 2]
        } else {
            0.5 * (sorted[n / 2 - 1] + sorted[n / 2])
        }
    };
    // Log spacing needs a positive lower end; fall back to the smallest
    // positive weight when most of the batch carries zero weight.
    let lo = if median > 0.0 {
        median
    } else {
        sorted
            .iter()
            .copied()
            .find(|w| *w > 0.0)
            .expect("max > 0 implies a positive weight")
    };
    let lo = lo.min(max);

    let mut grid = Vec::with_capacity(CANDIDATE_GRID_SIZE);
    if lo == max {
        grid.push(max);
        return Ok(grid);
    }
    let log_lo = lo.ln();
    let log_hi = max.ln();
    let step = (log_hi - log_lo) / (CANDIDATE_GRID_SIZE - 1) as f64;
    for k in (0..CANDIDATE_GRID_SIZE).rev() {
        let r = if k == CANDIDATE_GRID_SIZE - 1 {
            max // keep the top candidate exact
        } else {
            (log_lo + step * k as f64).exp()
        };
        if grid.last().is_none_or(|&prev| r < prev) {
            grid.push(r);
        }
    }
    Ok(grid)
}
