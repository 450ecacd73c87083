//! Experiment execution: seeded repeats, problem orchestration, persistence.
//!
//! Every repeat owns RNG stream `k` (its repeat index) derived from the
//! master seed, so results are bit-identical whether repeats run serially or
//! on the rayon pool. Portfolio construction and the cross-entropy fit use
//! reserved stream ids and happen once per experiment; the fitted proposal is
//! shared across repeats.

use std::path::{Path, PathBuf};
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use wbis_core::credit::{
    build_portfolio, cross_entropy_fit, draw_is_batch, estimate_default_prob_detailed,
    CreditMethod, CreditPortfolio, CrossEntropyConfig, GaussianProposal,
};
use wbis_core::estimators::{
    dis_estimate, dis_mixture_density, dis_sample, is_estimate, mc_estimate, wbis_estimate,
    Method, WeightedSample,
};
use wbis_core::mixture::MixtureProblem;
use wbis_core::rng::{stream_rng, streams, ChaCha8Rng};
use wbis_core::threshold::{make_grouping, select_threshold, ThresholdResult};

use crate::config::{ExperimentConfig, Problem};
use crate::error::HarnessError;
use crate::metrics::{summarize, MetricsSummary};
use crate::records::{write_records_csv, RunRecord};

/// Grouping constant used when a config leaves `c_constant` to the harness.
/// Ten-ish groups at n = 10^4 reproduces the reported threshold scale; see
/// the README discussion of the C knob.
pub const DEFAULT_C_CONSTANT: f64 = 0.1;

/// Everything an experiment produced.
#[derive(Debug, Clone)]
pub struct ExperimentOutput {
    pub records: Vec<RunRecord>,
    /// Threshold diagnostics of repeat 0; WBIS only.
    pub threshold_diagnostics: Option<ThresholdResult>,
    /// The portfolio used; credit only.
    pub portfolio: Option<CreditPortfolio>,
    /// The fitted proposal; credit IS/DIS/WBIS only.
    pub proposal: Option<GaussianProposal>,
}

/// Run the configured experiment and return one record per repeat.
pub fn run_experiment(config: &ExperimentConfig) -> Result<Vec<RunRecord>, HarnessError> {
    execute_experiment(config).map(|out| out.records)
}

/// Run the configured experiment, keeping diagnostics and model snapshots.
pub fn execute_experiment(config: &ExperimentConfig) -> Result<ExperimentOutput, HarnessError> {
    config.validate()?;
    match config.problem {
        Problem::Mixture => execute_mixture(config),
        Problem::Credit => execute_credit(config),
    }
}

fn repeat_records<F>(config: &ExperimentConfig, run_one: F) -> Result<ExperimentOutput, HarnessError>
where
    F: Fn(&mut ChaCha8Rng) -> Result<(f64, Option<ThresholdResult>), wbis_core::Error> + Sync,
{
    let results: Result<Vec<_>, wbis_core::Error> = (0..config.repeats as u64)
        .into_par_iter()
        .map(|k| {
            let started = Instant::now();
            let mut rng = stream_rng(config.master_seed, k);
            let (estimate, threshold) = run_one(&mut rng)?;
            Ok((
                RunRecord {
                    run_id: k,
                    seed: k,
                    estimate,
                    threshold_r: threshold.as_ref().map(|t| t.r),
                    elapsed_ms: started.elapsed().as_secs_f64() * 1e3,
                },
                threshold,
            ))
        })
        .collect();
    let mut results = results?;
    let threshold_diagnostics = results.first_mut().and_then(|(_, t)| t.take());
    Ok(ExperimentOutput {
        records: results.into_iter().map(|(r, _)| r).collect(),
        threshold_diagnostics,
        portfolio: None,
        proposal: None,
    })
}

fn execute_mixture(config: &ExperimentConfig) -> Result<ExperimentOutput, HarnessError> {
    let problem = MixtureProblem::default();
    let n = config.n;
    let method = config.method;
    let alpha = config.alpha;
    let significance = config.significance;
    let c_constant = config.c_constant;

    repeat_records(config, move |rng| {
        match method {
            Method::Mc => {
                let f_values: Vec<f64> = (0..n)
                    .map(|_| problem.integrand(&problem.sample_nominal(rng)))
                    .collect();
                Ok((mc_estimate(&f_values)?.estimate, None))
            }
            Method::Is => {
                let samples = mixture_is_batch(&problem, n, rng)?;
                Ok((is_estimate(&samples)?.estimate, None))
            }
            Method::Dis => {
                let alpha = alpha.expect("validated");
                let samples: Vec<WeightedSample> = (0..n)
                    .map(|_| {
                        let x = dis_sample(
                            |r: &mut ChaCha8Rng| problem.sample_nominal(r),
                            |r: &mut ChaCha8Rng| problem.sample_proposal(r),
                            alpha,
                            rng,
                        )?;
                        let f = problem.integrand(&x);
                        let q_alpha = dis_mixture_density(
                            problem.nominal_pdf(&x),
                            problem.proposal_pdf(&x),
                            alpha,
                        )?;
                        WeightedSample::new(x, f, 1.0, q_alpha)
                    })
                    .collect::<Result<_, _>>()?;
                Ok((dis_estimate(&samples, alpha)?.estimate, None))
            }
            Method::Wbis => {
                let significance = significance.expect("validated");
                let c_constant = c_constant.expect("validated");
                let samples = mixture_is_batch(&problem, n, rng)?;
                let weights: Vec<f64> = samples.iter().map(|s| s.weight).collect();
                let plan = make_grouping(n, c_constant)?;
                let threshold = select_threshold(&weights, &plan, significance)?;
                let estimate = wbis_estimate(&samples, threshold.r)?.estimate;
                Ok((estimate, Some(threshold)))
            }
        }
    })
}

fn mixture_is_batch(
    problem: &MixtureProblem,
    n: usize,
    rng: &mut ChaCha8Rng,
) -> Result<Vec<WeightedSample>, wbis_core::Error> {
    (0..n)
        .map(|_| {
            let x = problem.sample_proposal(rng);
            let f = problem.integrand(&x);
            let q = problem.proposal_pdf(&x);
            WeightedSample::new(x, f, 1.0, q)
        })
        .collect()
}

fn execute_credit(config: &ExperimentConfig) -> Result<ExperimentOutput, HarnessError> {
    let portfolio = build_portfolio(config.portfolio_seed.expect("validated"));
    let proposal = if config.method == Method::Mc {
        None
    } else {
        let mut rng = stream_rng(config.master_seed, streams::CE_FIT);
        Some(cross_entropy_fit(
            &portfolio,
            &CrossEntropyConfig::default(),
            &mut rng,
        )?)
    };

    let method = match config.method {
        Method::Mc => CreditMethod::Mc,
        Method::Is => CreditMethod::Is,
        Method::Dis => CreditMethod::Dis {
            alpha: config.alpha.expect("validated"),
        },
        Method::Wbis => CreditMethod::Wbis {
            significance: config.significance.expect("validated"),
            c_constant: config.c_constant.expect("validated"),
        },
    };
    let n = config.n;
    let shared_proposal = proposal
        .clone()
        .unwrap_or_else(|| GaussianProposal::nominal(portfolio.factors()));
    let portfolio_ref = &portfolio;
    let proposal_ref = &shared_proposal;

    let mut out = repeat_records(config, move |rng| {
        let (output, threshold) =
            estimate_default_prob_detailed(portfolio_ref, proposal_ref, method, n, rng)?;
        Ok((output.estimate, threshold))
    })?;
    out.portfolio = Some(portfolio);
    out.proposal = proposal;
    Ok(out)
}

/// Reference-value computation for the credit problem: aggregate independent
/// IS runs with the fitted proposal and cross-check against weight-bounded
/// aggregates on the same batches. The IS aggregate becomes the reference
/// only when the two agree within 5% relative.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReferenceReport {
    pub portfolio_seed: u64,
    pub master_seed: u64,
    pub runs: usize,
    pub n_per_run: usize,
    pub is_aggregate: f64,
    pub wbis_aggregate: f64,
    /// |IS - WBIS| / IS.
    pub relative_gap: f64,
    /// The accepted reference value (the IS aggregate).
    pub reference: f64,
}

/// Compute the per-portfolio reference value. Cross-check significance is
/// 5% with the default grouping constant.
pub fn compute_credit_reference(
    portfolio_seed: u64,
    master_seed: u64,
    runs: usize,
    n_per_run: usize,
) -> Result<ReferenceReport, HarnessError> {
    let portfolio = build_portfolio(portfolio_seed);
    let mut rng = stream_rng(master_seed, streams::CE_FIT);
    let proposal = cross_entropy_fit(&portfolio, &CrossEntropyConfig::default(), &mut rng)?;
    let plan = make_grouping(n_per_run, DEFAULT_C_CONSTANT)?;

    let pairs: Result<Vec<(f64, f64)>, wbis_core::Error> = (0..runs as u64)
        .into_par_iter()
        .map(|j| {
            let mut rng = stream_rng(master_seed, streams::REFERENCE_BASE + j);
            let batch = draw_is_batch(&portfolio, &proposal, n_per_run, &mut rng)?;
            let is = is_estimate(&batch)?.estimate;
            let weights: Vec<f64> = batch.iter().map(|s| s.weight).collect();
            let threshold = select_threshold(&weights, &plan, 0.05)?;
            let wbis = wbis_estimate(&batch, threshold.r)?.estimate;
            Ok((is, wbis))
        })
        .collect();
    let pairs = pairs?;

    let is_aggregate = pairs.iter().map(|(a, _)| a).sum::<f64>() / runs as f64;
    let wbis_aggregate = pairs.iter().map(|(_, b)| b).sum::<f64>() / runs as f64;
    let relative_gap = if is_aggregate != 0.0 {
        ((is_aggregate - wbis_aggregate) / is_aggregate).abs()
    } else {
        f64::INFINITY
    };
    const LIMIT: f64 = 0.05;
    if !(relative_gap <= LIMIT) {
        return Err(HarnessError::ReferenceMismatch {
            is_aggregate,
            wbis_aggregate,
            relative_gap: relative_gap * 100.0,
            limit: LIMIT * 100.0,
        });
    }
    Ok(ReferenceReport {
        portfolio_seed,
        master_seed,
        runs,
        n_per_run,
        is_aggregate,
        wbis_aggregate,
        relative_gap,
        reference: is_aggregate,
    })
}

/// Summary file written next to the records CSV.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunReport {
    pub config: ExperimentConfig,
    pub reference: Option<f64>,
    pub metrics: Option<MetricsSummary>,
}

fn sibling(path: &Path, suffix: &str) -> PathBuf {
    let mut name = path.file_name().unwrap_or_default().to_os_string();
    name.push(suffix);
    path.with_file_name(name)
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<(), HarnessError> {
    let text = serde_json::to_string_pretty(value).map_err(|e| HarnessError::Json {
        path: path.to_path_buf(),
        source: e,
    })?;
    std::fs::write(path, text).map_err(|e| HarnessError::Io {
        path: path.to_path_buf(),
        source: e,
    })
}

/// Run an experiment and persist everything: records CSV at
/// `config.output_path`, a `.summary.json` sibling, threshold diagnostics
/// for WBIS, and portfolio/proposal snapshots for credit runs. The summary
/// is skipped (with `metrics: None`) when no reference value is available.
pub fn run_and_persist(config: &ExperimentConfig) -> Result<RunReport, HarnessError> {
    let output = execute_experiment(config)?;
    write_records_csv(&config.output_path, &output.records)?;

    let reference = config.effective_reference();
    let metrics = match reference {
        Some(r) => Some(summarize(&output.records, r, config.n)?),
        None => None,
    };
    let report = RunReport {
        config: config.clone(),
        reference,
        metrics,
    };
    write_json(&sibling(&config.output_path, ".summary.json"), &report)?;
    if let Some(diag) = &output.threshold_diagnostics {
        write_json(&sibling(&config.output_path, ".threshold.json"), diag)?;
    }
    if let Some(portfolio) = &output.portfolio {
        write_json(&sibling(&config.output_path, ".portfolio.json"), portfolio)?;
    }
    if let Some(proposal) = &output.proposal {
        write_json(&sibling(&config.output_path, ".proposal.json"), proposal)?;
    }
    Ok(report)
}
