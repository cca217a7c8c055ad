//! The three experiments and their CSV output.

use std::io::Write;

use mst_patches::{
    Algorithm, Evaluator, FitnessValue, KnapsackInstance, NaiveStore, PopulationStore, PopulationTree,
    RunOptions, StopCondition,
};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::config::{cell_seed, instance_seed, AlgorithmName, Problem, ScalingConfig, StoreKind, TraceConfig};
use crate::error::Result;
use crate::stats::pearson;
use crate::timing::{timed_windows, Clock, TimingRecord};

pub const SCALING_HEADER: &str = "algorithm,store,n,mean_s,std_s,windows,seed";
pub const TRACE_HEADER: &str = "evals,avg_op_time_s,total_patch_size,min_patch,max_patch";

/// The problem instance every cell of size `n` works on.
pub fn evaluator(problem: Problem, n: usize, seed: u64) -> Evaluator {
    match problem {
        Problem::OneMax => Evaluator::OneMax,
        Problem::Knapsack => {
            let mut rng = ChaCha8Rng::seed_from_u64(instance_seed(seed, n));
            Evaluator::knapsack(KnapsackInstance::generate(n, &mut rng))
        }
    }
}

/// One complete run on a fresh store; returns the number of evaluations.
pub fn single_run(
    algorithm: Algorithm,
    store: StoreKind,
    n: usize,
    evaluator: &Evaluator,
    options: &RunOptions,
    rng: &mut ChaCha8Rng,
) -> Result<u64> {
    fn go<S: PopulationStore>(
        algorithm: Algorithm,
        n: usize,
        evaluator: &Evaluator,
        options: &RunOptions,
        rng: &mut ChaCha8Rng,
    ) -> Result<u64> {
        let (trace, _) = algorithm.run::<S, _>(n, evaluator.clone(), options, rng)?;
        Ok(trace.evaluations)
    }
    match store {
        StoreKind::Mst => go::<PopulationTree>(algorithm, n, evaluator, options, rng),
        StoreKind::Naive => go::<NaiveStore>(algorithm, n, evaluator, options, rng),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScalingRow {
    pub algorithm: AlgorithmName,
    pub store: StoreKind,
    pub n: usize,
    pub timing: TimingRecord,
    pub seed: u64,
}

/// Times repeated runs of one (algorithm, store, n) cell.
pub fn run_cell<C: Clock>(
    clock: &C,
    config: &ScalingConfig,
    algorithm: AlgorithmName,
    store: StoreKind,
    n: usize,
) -> Result<ScalingRow> {
    let evaluator = evaluator(config.experiment.problem(), n, config.seed);
    let stop = match config.budget {
        Some(b) => StopCondition::Budget(b),
        None => StopCondition::Target(FitnessValue::OneMax(n as u64)),
    };
    let options = RunOptions::new(stop);
    let alg = algorithm.algorithm(n);
    let mut rng = ChaCha8Rng::seed_from_u64(cell_seed(config.seed, algorithm, store, n));
    let timing = timed_windows(clock, config.window, config.windows, || {
        single_run(alg, store, n, &evaluator, &options, &mut rng)
    })?;
    Ok(ScalingRow {
        algorithm,
        store,
        n,
        timing,
        seed: config.seed,
    })
}

/// Runs every cell in order of size, then algorithm, then store; `progress`
/// sees each row as soon as it is done.
pub fn run_scaling<C: Clock>(
    clock: &C,
    config: &ScalingConfig,
    mut progress: impl FnMut(&ScalingRow),
) -> Result<Vec<ScalingRow>> {
    config.validate()?;
    let mut rows = Vec::new();
    for k in config.k_min..=config.k_max {
        for &algorithm in &config.algorithms {
            for &store in &config.stores {
                let row = run_cell(clock, config, algorithm, store, 1usize << k)?;
                progress(&row);
                rows.push(row);
            }
        }
    }
    Ok(rows)
}

pub fn write_scaling_csv<W: Write>(rows: &[ScalingRow], mut out: W) -> Result<()> {
    writeln!(out, "{SCALING_HEADER}")?;
    for r in rows {
        let std = match r.timing.std {
            Some(s) => format!("{s:e}"),
            None => "NA".to_string(),
        };
        writeln!(
            out,
            "{},{},{},{:e},{},{},{}",
            r.algorithm,
            r.store,
            r.n,
            r.timing.mean,
            std,
            r.timing.per_window.len(),
            r.seed
        )?;
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq)]
pub struct TraceRow {
    pub evals: u64,
    pub avg_op_time_s: f64,
    /// Mean total patch size over the evaluations since the previous row.
    pub total_patch_size: f64,
    pub min_patch: u64,
    pub max_patch: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trace {
    pub rows: Vec<TraceRow>,
    /// Pearson correlation of the mean total patch size with the average
    /// operation time across rows.
    pub correlation: f64,
}

/// One checkpointed (10+1) GA run on the tree store.
pub fn run_trace(config: &TraceConfig) -> Result<Trace> {
    config.validate()?;
    let n = config.n;
    let evaluator = evaluator(Problem::Knapsack, n, config.seed);
    let options = RunOptions::new(StopCondition::Budget(config.budget)).checkpoints(config.stride);
    let mut rng = ChaCha8Rng::seed_from_u64(cell_seed(config.seed, AlgorithmName::Mpo10, StoreKind::Mst, n));
    let (trace, _) = AlgorithmName::Mpo10
        .algorithm(n)
        .run::<PopulationTree, _>(n, evaluator, &options, &mut rng)?;
    let rows: Vec<TraceRow> = trace
        .checkpoints
        .iter()
        .map(|c| TraceRow {
            evals: c.evaluations,
            avg_op_time_s: c.elapsed.as_secs_f64() / config.stride as f64,
            total_patch_size: c.mean_patch_size,
            min_patch: c.min_patch_size,
            max_patch: c.max_patch_size,
        })
        .collect();
    let sizes: Vec<f64> = rows.iter().map(|r| r.total_patch_size).collect();
    let times: Vec<f64> = rows.iter().map(|r| r.avg_op_time_s).collect();
    let correlation = pearson(&sizes, &times)?;
    Ok(Trace { rows, correlation })
}

pub fn write_trace_csv<W: Write>(rows: &[TraceRow], mut out: W) -> Result<()> {
    writeln!(out, "{TRACE_HEADER}")?;
    for r in rows {
        writeln!(
            out,
            "{},{:e},{},{},{}",
            r.evals, r.avg_op_time_s, r.total_patch_size, r.min_patch, r.max_patch
        )?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use std::time::Duration;

    use super::*;
    use crate::config::Experiment;
    use crate::timing::MonotonicClock;

    #[test]
    fn scaling_rows_have_the_schema() {
        let config = ScalingConfig {
            experiment: Experiment::KnapsackBudget,
            algorithms: vec![AlgorithmName::Rls, AlgorithmName::Mpo2],
            stores: vec![StoreKind::Mst, StoreKind::Naive],
            k_min: 5,
            k_max: 6,
            budget: Some(500),
            seed: 3,
            windows: 2,
            window: Duration::from_millis(5),
        };
        let rows = run_scaling(&MonotonicClock::default(), &config, |_| {}).unwrap();
        assert_eq!(rows.len(), 8);
        let mut csv = Vec::new();
        write_scaling_csv(&rows, &mut csv).unwrap();
        let text = String::from_utf8(csv).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], SCALING_HEADER);
        assert!(lines[1].starts_with("rls,mst,32,"));
        assert!(lines[8].starts_with("mpo2,naive,64,"));
        for line in &lines[1..] {
            let f: Vec<&str> = line.split(',').collect();
            assert_eq!(f.len(), 7);
            assert!(f[3].parse::<f64>().unwrap() > 0.0);
            assert!(f[4].parse::<f64>().unwrap() >= 0.0);
            assert_eq!(f[5], "2");
            assert_eq!(f[6], "3");
        }
    }

    #[test]
    fn small_trace() {
        let config = TraceConfig {
            n: 300,
            budget: 2000,
            stride: 10,
            seed: 1,
        };
        let trace = run_trace(&config).unwrap();
        assert_eq!(trace.rows.len(), 200);
        for (i, r) in trace.rows.iter().enumerate() {
            assert_eq!(r.evals, 10 * (i as u64 + 1));
            assert!(r.min_patch as f64 <= r.total_patch_size && r.total_patch_size <= r.max_patch as f64);
        }
        assert!((-1.0..=1.0).contains(&trace.correlation));
    }
}
