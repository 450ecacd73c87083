//! `wbis`: run importance-sampling experiments, compute credit reference
//! values, and aggregate record files into summary tables.

use std::path::PathBuf;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use wbis_core::estimators::Method;
use wbis_harness::{
    compute_credit_reference, read_records_csv, run_and_persist, summarize, ExperimentConfig,
    MetricsSummary, Problem, DEFAULT_C_CONSTANT,
};

#[derive(Parser)]
#[command(name = "wbis", version, about = "Weight-bounded importance sampling experiments")]
struct Cli {
    /// Worker threads for parallel repeats (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Execute an experiment and write records, summary, and snapshots.
    Run(RunArgs),
    /// Compute or refresh the credit-problem reference value.
    Reference(ReferenceArgs),
    /// Aggregate a records CSV into a metrics summary.
    Report(ReportArgs),
}

#[derive(Args)]
struct RunArgs {
    /// TOML config file; flags below override its fields.
    #[arg(long)]
    config: Option<PathBuf>,

    #[arg(long)]
    problem: Option<Problem>,
    #[arg(long)]
    method: Option<Method>,
    /// Samples per estimate.
    #[arg(long)]
    n: Option<usize>,
    /// Number of independent estimates.
    #[arg(long)]
    repeats: Option<usize>,
    /// Defensive mixture weight (DIS).
    #[arg(long)]
    alpha: Option<f64>,
    /// Normality-test significance level (WBIS): 0.05 or 0.01.
    #[arg(long)]
    significance: Option<f64>,
    /// Grouping balance constant (WBIS).
    #[arg(long)]
    c_constant: Option<f64>,
    /// Master seed for all repeat streams.
    #[arg(long)]
    seed: Option<u64>,
    /// Portfolio build seed (credit).
    #[arg(long)]
    portfolio_seed: Option<u64>,
    /// Reference value for error metrics.
    #[arg(long)]
    reference: Option<f64>,
    /// Records CSV destination.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ReferenceArgs {
    #[arg(long)]
    portfolio_seed: u64,
    /// Master seed for the reference streams and the proposal fit.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Number of independent aggregation runs.
    #[arg(long, default_value_t = 50)]
    runs: usize,
    /// Samples per aggregation run.
    #[arg(long, default_value_t = 100_000)]
    n: usize,
    /// Where to write the reference report JSON.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ReportArgs {
    /// Records CSV produced by `run`.
    #[arg(long)]
    records: PathBuf,
    /// Reference value the estimates target.
    #[arg(long)]
    reference: f64,
    /// Samples per estimate (for the NMSE normalization).
    #[arg(long)]
    n: usize,
    /// Optional JSON destination for the summary.
    #[arg(long)]
    out: Option<PathBuf>,
}

fn main() -> Result<()> {
    let cli = Cli::parse();
    if let Some(threads) = cli.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()
            .context("failed to configure the thread pool")?;
    }
    match cli.command {
        Command::Run(args) => run(args),
        Command::Reference(args) => reference(args),
        Command::Report(args) => report(args),
    }
}

fn run(args: RunArgs) -> Result<()> {
    let config = build_config(args)?;
    config.validate()?;
    let report = run_and_persist(&config)?;
    println!(
        "wrote {} records to {}",
        report.config.repeats,
        report.config.output_path.display()
    );
    match &report.metrics {
        Some(metrics) => print_summary(metrics, report.reference.unwrap()),
        None => println!(
            "no reference value available; records written, summary metrics skipped \
             (compute one with `wbis reference`)"
        ),
    }
    Ok(())
}

fn build_config(args: RunArgs) -> Result<ExperimentConfig> {
    let base = match &args.config {
        Some(path) => Some(ExperimentConfig::from_toml_file(path)?),
        None => None,
    };
    let (problem, method) = match (&base, args.problem, args.method) {
        (Some(b), p, m) => (p.unwrap_or(b.problem), m.unwrap_or(b.method)),
        (None, Some(p), Some(m)) => (p, m),
        (None, _, _) => bail!("without --config, both --problem and --method are required"),
    };
    // WBIS gets table defaults when flags leave them open.
    let significance = args
        .significance
        .or(base.as_ref().and_then(|b| b.significance))
        .or((method == Method::Wbis).then_some(0.05));
    let c_constant = args
        .c_constant
        .or(base.as_ref().and_then(|b| b.c_constant))
        .or((method == Method::Wbis).then_some(DEFAULT_C_CONSTANT));
    Ok(ExperimentConfig {
        problem,
        method,
        n: args.n.or(base.as_ref().map(|b| b.n)).unwrap_or(10_000),
        repeats: args
            .repeats
            .or(base.as_ref().map(|b| b.repeats))
            .unwrap_or(100),
        alpha: args.alpha.or(base.as_ref().and_then(|b| b.alpha)),
        significance,
        c_constant,
        master_seed: args
            .seed
            .or(base.as_ref().map(|b| b.master_seed))
            .unwrap_or(0),
        portfolio_seed: args
            .portfolio_seed
            .or(base.as_ref().and_then(|b| b.portfolio_seed)),
        reference_value: args
            .reference
            .or(base.as_ref().and_then(|b| b.reference_value)),
        output_path: args
            .out
            .or(base.as_ref().map(|b| b.output_path.clone()))
            .unwrap_or_else(|| PathBuf::from("records.csv")),
    })
}

fn print_summary(metrics: &MetricsSummary, reference: f64) {
    println!("reference        {reference:.6e}");
    println!("repeats x n      {} x {}", metrics.repeats, metrics.n);
    println!("nmse             {:.6e}", metrics.nmse);
    println!("rmse             {:.6e}", metrics.rmse);
    println!("bias^2           {:.6e}", metrics.bias_squared);
    println!("variance         {:.6e}", metrics.variance);
    if let Some(r) = metrics.mean_threshold_r {
        println!("mean threshold r {r:.3}");
    }
}

fn reference(args: ReferenceArgs) -> Result<()> {
    let report = compute_credit_reference(args.portfolio_seed, args.seed, args.runs, args.n)?;
    println!(
        "reference {:.6e} (IS aggregate over {} runs of n = {})",
        report.reference, report.runs, report.n_per_run
    );
    println!(
        "cross-check: WBIS aggregate {:.6e}, relative gap {:.3}%",
        report.wbis_aggregate,
        report.relative_gap * 100.0
    );
    if let Some(path) = args.out {
        let text = serde_json::to_string_pretty(&report)?;
        std::fs::write(&path, text)
            .with_context(|| format!("failed to write {}", path.display()))?;
        println!("wrote {}", path.display());
    }
    Ok(())
}

fn report(args: ReportArgs) -> Result<()> {
    let records = read_records_csv(&args.records)?;
    let metrics = summarize(&records, args.reference, args.n)?;
    print_summary(&metrics, args.reference);
    if let Some(path) = args.out {
        let text = serde_json::to_string_pretty(&metrics)?;
        std::fs::write(&path, text)
            .with_context(|| format!("failed to write {}", path.display()))?;
        println!("wrote {}", path.display());
    }
    Ok(())
}
