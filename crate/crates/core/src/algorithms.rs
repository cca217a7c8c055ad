//! Randomized local search, the (1+1) EA and the (μ+1) GA, written against
//! [`PopulationStore`] so the same code drives either store.
//!
//! All randomness comes from the generator passed in, drawn in a fixed order
//! per iteration: branch choice, parent choice(s), operator counts and
//! positions, then the tie-break among the worst individuals.
//!
//! With [`Sampling::Scripted`] the flip positions are drawn here rather than
//! inside the store and handed over as explicit patches. Both stores then see
//! exactly the same operator inputs, which makes their fitness trajectories
//! directly comparable.

use std::cmp::Ordering;
use std::time::{Duration, Instant};

use rand::seq::index;
use rand::Rng;

use crate::error::{Error, Result};
use crate::fitness::{Evaluator, FitnessValue};
use crate::index_patch::Patch;
use crate::operators::{binomial, CrossoverSpec, MutationSpec, UniformCrossover};
use crate::store::{NodeId, PopulationStore};

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum StopCondition {
    /// Stop once an individual at least this good has been evaluated.
    Target(FitnessValue),
    /// Stop after this many fitness evaluations.
    Budget(u64),
}

/// Where flip positions are sampled.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Sampling {
    /// Inside the store, through its own operators.
    #[default]
    Native,
    /// By the algorithm, passed to the store as explicit patches.
    Scripted,
}

#[derive(Clone, Debug, PartialEq)]
pub struct RunOptions {
    pub stop: StopCondition,
    pub sampling: Sampling,
    /// Record a [`Checkpoint`] every this many evaluations.
    pub checkpoint_stride: Option<u64>,
    /// Keep the fitness of every evaluated individual.
    pub record_fitness: bool,
}

impl RunOptions {
    pub fn new(stop: StopCondition) -> Self {
        Self {
            stop,
            sampling: Sampling::Native,
            checkpoint_stride: None,
            record_fitness: false,
        }
    }

    pub fn sampling(mut self, sampling: Sampling) -> Self {
        self.sampling = sampling;
        self
    }

    pub fn checkpoints(mut self, stride: u64) -> Self {
        self.checkpoint_stride = Some(stride);
        self
    }

    pub fn record_fitness(mut self) -> Self {
        self.record_fitness = true;
        self
    }
}

/// Summary of the evaluations since the previous checkpoint.
#[derive(Clone, Debug, PartialEq)]
pub struct Checkpoint {
    pub evaluations: u64,
    /// Wall time since the previous checkpoint (or the start of the run).
    pub elapsed: Duration,
    pub mean_patch_size: f64,
    pub min_patch_size: u64,
    pub max_patch_size: u64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct RunTrace {
    pub evaluations: u64,
    pub best: FitnessValue,
    /// Fitness of each evaluated individual, when requested.
    pub fitness_log: Vec<FitnessValue>,
    pub checkpoints: Vec<Checkpoint>,
}

/// The optimizers.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Algorithm {
    Rls,
    OnePlusOne { mutation_rate: f64 },
    MuPlusOne {
        mu: usize,
        mutation_rate: f64,
        crossover_rate: f64,
    },
}

impl Algorithm {
    /// The (1+1) EA with rate `1/n`.
    pub fn one_plus_one(n: usize) -> Self {
        Algorithm::OnePlusOne {
            mutation_rate: 1.0 / n as f64,
        }
    }

    /// The (2+1) GA: rate `1.2/n`, crossover probability 0.9.
    pub fn two_plus_one(n: usize) -> Self {
        Algorithm::MuPlusOne {
            mu: 2,
            mutation_rate: 1.2 / n as f64,
            crossover_rate: 0.9,
        }
    }

    /// The (10+1) GA: rate `1.4/n`, crossover probability 0.9.
    pub fn ten_plus_one(n: usize) -> Self {
        Algorithm::MuPlusOne {
            mu: 10,
            mutation_rate: 1.4 / n as f64,
            crossover_rate: 0.9,
        }
    }

    /// Creates a fresh store and runs the algorithm on it.
    pub fn run<S: PopulationStore, R: Rng + ?Sized>(
        &self,
        n: usize,
        evaluator: Evaluator,
        options: &RunOptions,
        rng: &mut R,
    ) -> Result<(RunTrace, S)> {
        let (mut store, start) = S::create(n, evaluator, rng)?;
        let trace = self.run_on(&mut store, start, options, rng)?;
        Ok((trace, store))
    }

    /// Runs on a store holding the single individual `start`.
    pub fn run_on<S: PopulationStore, R: Rng + ?Sized>(
        &self,
        store: &mut S,
        start: NodeId,
        options: &RunOptions,
        rng: &mut R,
    ) -> Result<RunTrace> {
        match *self {
            Algorithm::Rls => run_rls(store, start, options, rng),
            Algorithm::OnePlusOne { mutation_rate } => {
                run_one_plus_one(store, start, mutation_rate, options, rng)
            }
            Algorithm::MuPlusOne {
                mu,
                mutation_rate,
                crossover_rate,
            } => run_mu_plus_one(store, start, mu, mutation_rate, crossover_rate, options, rng),
        }
    }
}

/// Bookkeeping shared by the optimizers.
struct Monitor<'a> {
    options: &'a RunOptions,
    evaluator: Evaluator,
    evaluations: u64,
    best: Option<FitnessValue>,
    fitness_log: Vec<FitnessValue>,
    checkpoints: Vec<Checkpoint>,
    window_start: Instant,
    patch_sum: u64,
    patch_min: u64,
    patch_max: u64,
}

impl<'a> Monitor<'a> {
    fn new(options: &'a RunOptions, evaluator: Evaluator) -> Result<Self> {
        match options.stop {
            StopCondition::Budget(0) => return Err(Error::EmptyBudget),
            StopCondition::Target(t) => {
                evaluator.compare(t, t)?;
            }
            StopCondition::Budget(_) => {}
        }
        Ok(Self {
            options,
            evaluator,
            evaluations: 0,
            best: None,
            fitness_log: Vec::new(),
            checkpoints: Vec::new(),
            window_start: Instant::now(),
            patch_sum: 0,
            patch_min: u64::MAX,
            patch_max: 0,
        })
    }

    fn better_or_equal(&self, a: FitnessValue, b: FitnessValue) -> bool {
        self.evaluator.compare(a, b).expect("same problem") != Ordering::Less
    }

    fn record<S: PopulationStore>(&mut self, fitness: FitnessValue, store: &S) {
        self.evaluations += 1;
        match self.best {
            Some(b) if !self.better_or_equal(fitness, b) => {}
            _ => self.best = Some(fitness),
        }
        if self.options.record_fitness {
            self.fitness_log.push(fitness);
        }
        if let Some(stride) = self.options.checkpoint_stride {
            let size = store.total_patch_size();
            self.patch_sum += size;
            self.patch_min = self.patch_min.min(size);
            self.patch_max = self.patch_max.max(size);
            if self.evaluations.is_multiple_of(stride) {
                let now = Instant::now();
                self.checkpoints.push(Checkpoint {
                    evaluations: self.evaluations,
                    elapsed: now - self.window_start,
                    mean_patch_size: self.patch_sum as f64 / stride as f64,
                    min_patch_size: self.patch_min,
                    max_patch_size: self.patch_max,
                });
                self.window_start = now;
                self.patch_sum = 0;
                self.patch_min = u64::MAX;
                self.patch_max = 0;
            }
        }
    }

    fn done(&self) -> bool {
        match self.options.stop {
            StopCondition::Budget(b) => self.evaluations >= b,
            StopCondition::Target(t) => self.best.is_some_and(|b| self.better_or_equal(b, t)),
        }
    }

    fn finish(self) -> RunTrace {
        RunTrace {
            evaluations: self.evaluations,
            best: self.best.expect("at least one evaluation"),
            fitness_log: self.fitness_log,
            checkpoints: self.checkpoints,
        }
    }
}

/// `flips` distinct positions of `0..n`, uniformly.
fn scripted_positions<R: Rng + ?Sized>(n: usize, flips: usize, rng: &mut R) -> Patch {
    let v = index::sample(rng, n, flips).into_iter().map(|i| i as u32).collect();
    Patch::from_unsorted(v).expect("distinct positions")
}

/// The flip set of an unbiased crossover, given the parents' difference.
fn scripted_crossover<C: CrossoverSpec, R: Rng + ?Sized>(
    n: usize,
    diff: &Patch,
    spec: &C,
    rng: &mut R,
) -> Result<Patch> {
    let d = diff.len();
    let (differing, same) = spec.sample(d, n, rng);
    if differing > d || same > n - d {
        return Err(Error::CrossoverOutOfRange {
            differing,
            same,
            distance: d,
            n,
        });
    }
    let mut out: Vec<u32> = index::sample(rng, d, differing)
        .into_iter()
        .map(|i| diff.as_slice()[i])
        .collect();
    // Ranks among the agreeing positions, mapped to positions by skipping
    // over the sorted difference.
    let mut ranks: Vec<usize> = index::sample(rng, n - d, same).into_vec();
    ranks.sort_unstable();
    let mut skipped = 0;
    for r in ranks {
        let mut pos = r + skipped;
        while skipped < d && diff.as_slice()[skipped] as usize <= pos {
            skipped += 1;
            pos = r + skipped;
        }
        out.push(pos as u32);
    }
    Patch::from_unsorted(out)
}

fn mutate<S: PopulationStore, R: Rng + ?Sized>(
    store: &mut S,
    parent: NodeId,
    flips: usize,
    sampling: Sampling,
    rng: &mut R,
) -> Result<NodeId> {
    match sampling {
        Sampling::Native => store.mutate(parent, flips, rng),
        Sampling::Scripted => {
            let patch = scripted_positions(store.bit_len(), flips, rng);
            store.mutate_explicit(parent, &patch)
        }
    }
}

fn crossover<S: PopulationStore, C: CrossoverSpec, R: Rng + ?Sized>(
    store: &mut S,
    first: NodeId,
    second: NodeId,
    spec: &C,
    sampling: Sampling,
    rng: &mut R,
) -> Result<NodeId> {
    match sampling {
        Sampling::Native => store.crossover(first, second, spec, rng),
        Sampling::Scripted => {
            let diff = store.difference(first, second)?;
            let flips = scripted_crossover(store.bit_len(), &diff, spec, rng)?;
            store.mutate_explicit(first, &flips)
        }
    }
}

/// Elitist single-parent loop shared by RLS and the (1+1) EA: the offspring
/// replaces the parent unless it is strictly worse.
fn run_elitist<S: PopulationStore, R: Rng + ?Sized>(
    store: &mut S,
    start: NodeId,
    mutation: MutationSpec,
    options: &RunOptions,
    rng: &mut R,
) -> Result<RunTrace> {
    let n = store.bit_len();
    mutation.validate(n)?;
    let mut monitor = Monitor::new(options, store.evaluator().clone())?;
    let mut parent = start;
    let mut parent_fitness = store.fitness(parent)?;
    monitor.record(parent_fitness, store);
    while !monitor.done() {
        let flips = mutation.sample(n, rng);
        let child = mutate(store, parent, flips, options.sampling, rng)?;
        let child_fitness = store.fitness(child)?;
        if monitor.better_or_equal(child_fitness, parent_fitness) {
            store.discard(parent)?;
            parent = child;
            parent_fitness = child_fitness;
        } else {
            store.discard(child)?;
        }
        monitor.record(child_fitness, store);
    }
    Ok(monitor.finish())
}

/// Randomized local search: flip one uniformly chosen bit, keep the
/// offspring if it is at least as good.
pub fn run_rls<S: PopulationStore, R: Rng + ?Sized>(
    store: &mut S,
    start: NodeId,
    options: &RunOptions,
    rng: &mut R,
) -> Result<RunTrace> {
    run_elitist(store, start, MutationSpec::Fixed(1), options, rng)
}

/// The (1+1) EA with standard bit mutation at `mutation_rate`.
pub fn run_one_plus_one<S: PopulationStore, R: Rng + ?Sized>(
    store: &mut S,
    start: NodeId,
    mutation_rate: f64,
    options: &RunOptions,
    rng: &mut R,
) -> Result<RunTrace> {
    run_elitist(store, start, MutationSpec::Binomial(mutation_rate), options, rng)
}

/// The steady-state (μ+1) GA.
///
/// The other μ-1 initial individuals are added uniformly at random. Each
/// iteration takes the crossover branch with probability `crossover_rate`:
/// two parents are drawn uniformly with replacement and uniform crossover
/// followed by mutation is applied as one unbiased crossover. Otherwise one
/// uniformly drawn parent is mutated. Then a worst member of the μ+1
/// individuals, ties broken uniformly, is discarded.
pub fn run_mu_plus_one<S: PopulationStore, R: Rng + ?Sized>(
    store: &mut S,
    start: NodeId,
    mu: usize,
    mutation_rate: f64,
    crossover_rate: f64,
    options: &RunOptions,
    rng: &mut R,
) -> Result<RunTrace> {
    if mu == 0 {
        return Err(Error::EmptyPopulation);
    }
    let n = store.bit_len();
    let mutation = MutationSpec::Binomial(mutation_rate);
    mutation.validate(n)?;
    if !(0.0..=1.0).contains(&crossover_rate) {
        return Err(Error::InvalidProbability(crossover_rate));
    }
    let spec = UniformCrossover::new(mutation_rate)?;
    let mut monitor = Monitor::new(options, store.evaluator().clone())?;

    let mut population = vec![(start, store.fitness(start)?)];
    monitor.record(population[0].1, store);
    while population.len() < mu && !monitor.done() {
        let id = match options.sampling {
            Sampling::Native => store.add_random(rng)?,
            Sampling::Scripted => {
                let flips = binomial(n, 0.5, rng);
                let last = population.last().unwrap().0;
                mutate(store, last, flips, Sampling::Scripted, rng)?
            }
        };
        let f = store.fitness(id)?;
        population.push((id, f));
        monitor.record(f, store);
    }

    let mut worst = Vec::with_capacity(mu + 1);
    while !monitor.done() {
        let child = if rng.random::<f64>() < crossover_rate {
            let a = population[rng.random_range(0..population.len())].0;
            let b = population[rng.random_range(0..population.len())].0;
            crossover(store, a, b, &spec, options.sampling, rng)?
        } else {
            let parent = population[rng.random_range(0..population.len())].0;
            let flips = mutation.sample(n, rng);
            mutate(store, parent, flips, options.sampling, rng)?
        };
        let child_fitness = store.fitness(child)?;
        population.push((child, child_fitness));

        worst.clear();
        let mut min = population[0].1;
        for (i, &(_, f)) in population.iter().enumerate() {
            match monitor.evaluator.compare(f, min)? {
                Ordering::Less => {
                    min = f;
                    worst.clear();
                    worst.push(i);
                }
                Ordering::Equal => worst.push(i),
                Ordering::Greater => {}
            }
        }
        let victim = worst[rng.random_range(0..worst.len())];
        let (id, _) = population.remove(victim);
        store.discard(id)?;
        monitor.record(child_fitness, store);
    }
    Ok(monitor.finish())
}
