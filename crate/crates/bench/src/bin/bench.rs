use std::fs::File;
use std::io::BufWriter;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Duration;

use anyhow::{bail, Context};
use clap::{Parser, ValueEnum};
use mst_patches_bench::experiments::{run_scaling, run_trace, write_scaling_csv, write_trace_csv};
use mst_patches_bench::timing::MonotonicClock;
use mst_patches_bench::{AlgorithmName, Experiment, ScalingConfig, StoreKind, TraceConfig};

#[derive(Clone, Copy, Debug, ValueEnum)]
enum ExperimentArg {
    OnemaxScaling,
    KnapsackBudget,
    KnapsackTrace,
}

/// Timing experiments for the minimum spanning tree of patches.
#[derive(Parser, Debug)]
#[command(version)]
struct Args {
    #[arg(long, value_enum)]
    experiment: ExperimentArg,
    /// Comma-separated subset of rls, opo, mpo2, mpo10.
    #[arg(long, value_delimiter = ',', default_value = "rls,opo,mpo2,mpo10")]
    algorithms: Vec<AlgorithmName>,
    /// Comma-separated subset of mst, naive.
    #[arg(long, value_delimiter = ',')]
    stores: Option<Vec<StoreKind>>,
    /// Smallest exponent k of n = 2^k.
    #[arg(long, default_value_t = 5)]
    k_min: u32,
    /// Largest exponent k of n = 2^k (at most 24).
    #[arg(long, default_value_t = 13)]
    k_max: u32,
    /// Evaluations per run (default 25000 for knapsack-budget, 100000 for the trace).
    #[arg(long)]
    budget: Option<u64>,
    /// Checkpoint spacing of the trace, in evaluations.
    #[arg(long, default_value_t = 10)]
    stride: u64,
    /// Problem size of the trace.
    #[arg(long, default_value_t = 10_000)]
    n: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Measured windows per cell.
    #[arg(long, default_value_t = 10)]
    windows: usize,
    /// Minimum length of one window, in seconds.
    #[arg(long, default_value_t = 1.0)]
    window_secs: f64,
    /// Where to write the CSV.
    #[arg(long)]
    out: PathBuf,
}

fn scaling(args: &Args, experiment: Experiment) -> anyhow::Result<()> {
    if !(args.window_secs.is_finite() && args.window_secs > 0.0) {
        bail!("--window-secs must be a positive number");
    }
    let budget = match experiment {
        Experiment::KnapsackBudget => Some(args.budget.unwrap_or(25_000)),
        _ if args.budget.is_some() => bail!("onemax-scaling runs to the optimum; drop --budget"),
        _ => None,
    };
    let config = ScalingConfig {
        experiment,
        algorithms: args.algorithms.clone(),
        stores: args.stores.clone().unwrap_or_else(|| StoreKind::ALL.to_vec()),
        k_min: args.k_min,
        k_max: args.k_max,
        budget,
        seed: args.seed,
        windows: args.windows,
        window: Duration::from_secs_f64(args.window_secs),
    };
    config.validate()?;
    let file = File::create(&args.out).with_context(|| format!("creating {}", args.out.display()))?;
    let rows = run_scaling(&MonotonicClock::default(), &config, |r| {
        eprintln!(
            "{:>5} {:>5} n={:<9} {:.3e} s/eval over {} windows",
            r.algorithm,
            r.store,
            r.n,
            r.timing.mean,
            r.timing.per_window.len()
        )
    })?;
    write_scaling_csv(&rows, BufWriter::new(file))?;
    Ok(())
}

fn trace(args: &Args) -> anyhow::Result<()> {
    if let Some(stores) = &args.stores {
        if stores.iter().any(|&s| s != StoreKind::Mst) {
            bail!("knapsack-trace reads the diversity off the tree store; only --stores mst is supported");
        }
    }
    let config = TraceConfig {
        n: args.n,
        budget: args.budget.unwrap_or(100_000),
        stride: args.stride,
        seed: args.seed,
    };
    config.validate()?;
    let file = File::create(&args.out).with_context(|| format!("creating {}", args.out.display()))?;
    let trace = run_trace(&config)?;
    write_trace_csv(&trace.rows, BufWriter::new(file))?;
    println!("pearson correlation of total patch size and operation time: {:.4}", trace.correlation);
    Ok(())
}

fn main() -> ExitCode {
    let args = Args::parse();
    let result = match args.experiment {
        ExperimentArg::OnemaxScaling => scaling(&args, Experiment::OnemaxScaling),
        ExperimentArg::KnapsackBudget => scaling(&args, Experiment::KnapsackBudget),
        ExperimentArg::KnapsackTrace => trace(&args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
