//! Acceptance checks AC1 to AC9. Prints one PASS/FAIL line per criterion and
//! exits nonzero if any fails.

use std::collections::{BTreeSet, HashMap};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use mst_patches::operators::sample_binomial;
use mst_patches::{
    Algorithm, BitString, Evaluator, FitnessValue, IndexSet, KnapsackInstance, NaiveStore, NodeId, Patch,
    PopulationStore, PopulationTree, RunOptions, Sampling, StopCondition,
};
use mst_patches_bench::experiments::{evaluator, run_trace, single_run};
use mst_patches_bench::timing::{timed_windows, MonotonicClock};
use mst_patches_bench::{AlgorithmName, StoreKind, TraceConfig};
use mst_patches_bench::config::{cell_seed, Problem};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use statrs::distribution::{ChiSquared, ContinuousCDF};

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

// ---------- tree oracles, built only from dump() and complete() ----------

struct Rebuilt {
    /// id -> (bits, dumped fitness, alive)
    vertices: HashMap<NodeId, (BitString, String, bool)>,
    weight: u64,
}

fn rebuild(tree: &PopulationTree) -> Result<Rebuilt, String> {
    let mut fitness = HashMap::new();
    let mut edges: Vec<(NodeId, NodeId, Patch)> = Vec::new();
    for line in tree.dump().lines() {
        let w: Vec<&str> = line.split_whitespace().collect();
        match w[0] {
            "vertex" => {
                let id = NodeId(w[1].parse().unwrap());
                let f = w[2].strip_prefix("fitness=").unwrap().to_string();
                fitness.insert(id, (f, w[3] == "alive=1"));
            }
            "edge" => {
                let idx: Vec<u32> = w[4..].iter().map(|x| x.parse().unwrap()).collect();
                if idx.len() != w[3].parse::<usize>().unwrap() {
                    return Err(format!("bad edge line {line}"));
                }
                let p = Patch::new(idx).map_err(|e| e.to_string())?;
                edges.push((NodeId(w[1].parse().unwrap()), NodeId(w[2].parse().unwrap()), p));
            }
            _ => return Err(format!("bad dump line {line}")),
        }
    }
    let mut bits: HashMap<NodeId, BitString> = HashMap::new();
    bits.insert(tree.anchor(), tree.complete().clone());
    let mut stack = vec![tree.anchor()];
    while let Some(v) = stack.pop() {
        for (a, b, p) in &edges {
            let other = if *a == v { *b } else if *b == v { *a } else { continue };
            if !bits.contains_key(&other) {
                let mut x = bits[&v].clone();
                x.apply(p).map_err(|e| e.to_string())?;
                bits.insert(other, x);
                stack.push(other);
            }
        }
    }
    if bits.len() != fitness.len() || edges.len() + 1 != fitness.len() {
        return Err("dumped graph is not a spanning tree".into());
    }
    let weight = edges.iter().map(|e| e.2.len() as u64).sum();
    let vertices = bits
        .into_iter()
        .map(|(id, b)| {
            let (f, alive) = fitness[&id].clone();
            (id, (b, f, alive))
        })
        .collect();
    Ok(Rebuilt { vertices, weight })
}

fn prim(points: &[&BitString]) -> u64 {
    let k = points.len();
    let mut done = vec![false; k];
    let mut best = vec![usize::MAX; k];
    best[0] = 0;
    let mut total = 0;
    for _ in 0..k {
        let u = (0..k).filter(|&i| !done[i]).min_by_key(|&i| best[i]).unwrap();
        done[u] = true;
        total += best[u] as u64;
        for v in 0..k {
            if !done[v] {
                let h = points[u].iter().zip(points[v].iter()).filter(|(x, y)| x != y).count();
                best[v] = best[v].min(h);
            }
        }
    }
    total
}

/// Random operation sequences on one tree. Returns the number of checks
/// made, or the first mismatch.
fn fuzz_sequence(seed: u64, discards: bool, mut check: impl FnMut(&PopulationTree) -> Result<(), String>) -> Result<usize, String> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = rng.random_range(1..=64);
    let ev = if seed.is_multiple_of(2) {
        Evaluator::OneMax
    } else {
        Evaluator::knapsack(KnapsackInstance::generate(n, &mut rng))
    };
    let (mut tree, first) = PopulationTree::create(n, ev, &mut rng).map_err(|e| e.to_string())?;
    let mut alive = vec![first];
    check(&tree)?;
    let mut checks = 1;
    for _ in 0..rng.random_range(1..=48) {
        let pick = |rng: &mut ChaCha8Rng, alive: &[NodeId]| alive[rng.random_range(0..alive.len())];
        let r = rng.random_range(0..10);
        if discards && r >= 7 && alive.len() > 1 {
            let i = rng.random_range(0..alive.len());
            tree.discard(alive.swap_remove(i)).map_err(|e| e.to_string())?;
        } else {
            if alive.len() >= 32 {
                break;
            }
            let child = if r < 4 {
                let x = pick(&mut rng, &alive);
                let flips = rng.random_range(0..=n.min(8));
                tree.mutate(x, flips, &mut rng)
            } else {
                let (a, b) = (pick(&mut rng, &alive), pick(&mut rng, &alive));
                let spec = |d: usize, n: usize| (d / 2, (n - d).min(2));
                tree.crossover(a, b, &spec, &mut rng)
            }
            .map_err(|e| e.to_string())?;
            alive.push(child);
        }
        check(&tree)?;
        checks += 1;
    }
    Ok(checks)
}

fn ac1() -> Outcome {
    let mut checks = 0;
    for seed in 0..1000 {
        let result = fuzz_sequence(seed, false, |tree| {
            let r = rebuild(tree)?;
            let points: Vec<&BitString> = r.vertices.values().map(|v| &v.0).collect();
            let oracle = prim(&points);
            if r.weight != oracle || tree.total_patch_size() != oracle {
                return Err(format!("weight {} but Prim gives {oracle}", r.weight));
            }
            Ok(())
        });
        match result {
            Ok(c) => checks += c,
            Err(e) => return outcome(false, format!("sequence {seed}: {e}")),
        }
    }
    outcome(true, format!("1000 sequences, {checks} tree weights equal to Prim's"))
}

fn ac2() -> Outcome {
    let mut checks = 0;
    for seed in 0..2000 {
        let result = fuzz_sequence(seed, seed >= 1000, |tree| {
            let r = rebuild(tree)?;
            for (id, (bits, dumped, _)) in &r.vertices {
                let full = tree.evaluator().evaluate(bits).map_err(|e| e.to_string())?;
                if full.to_string() != *dumped {
                    return Err(format!("vertex {id} stores {dumped}, evaluates to {full}"));
                }
            }
            Ok(())
        });
        match result {
            Ok(c) => checks += c,
            Err(e) => return outcome(false, format!("sequence {seed}: {e}")),
        }
    }
    outcome(true, format!("2000 sequences (1000 with discards), {checks} snapshots consistent"))
}

fn ac3() -> Outcome {
    let n = 256;
    let budget = 10_000;
    let mut compared = 0;
    for seed in 0..2u64 {
        let knap = Evaluator::knapsack(KnapsackInstance::generate(n, &mut ChaCha8Rng::seed_from_u64(seed)));
        for ev in [Evaluator::OneMax, knap] {
            for name in AlgorithmName::ALL {
                let alg = name.algorithm(n);
                let options = RunOptions::new(StopCondition::Budget(budget))
                    .sampling(Sampling::Scripted)
                    .record_fitness();
                let mut r1 = ChaCha8Rng::seed_from_u64(seed);
                let mut r2 = ChaCha8Rng::seed_from_u64(seed);
                let (a, _) = alg.run::<PopulationTree, _>(n, ev.clone(), &options, &mut r1).unwrap();
                let (b, _) = alg.run::<NaiveStore, _>(n, ev.clone(), &options, &mut r2).unwrap();
                if a.fitness_log != b.fitness_log || a.fitness_log.len() != budget as usize {
                    return outcome(false, format!("{name} seed {seed} trajectories differ"));
                }
                compared += 1;
            }
        }
    }
    outcome(true, format!("{compared} runs of {budget} evaluations identical on both stores"))
}

fn op_time(name: AlgorithmName, store: StoreKind, n: usize, windows: usize) -> f64 {
    let ev = evaluator(Problem::OneMax, n, 0);
    let alg = name.algorithm(n);
    let options = RunOptions::new(StopCondition::Target(FitnessValue::OneMax(n as u64)));
    let mut rng = ChaCha8Rng::seed_from_u64(cell_seed(0, name, store, n));
    let started = Instant::now();
    let rec = timed_windows(&MonotonicClock::default(), Duration::from_secs(1), windows, || {
        single_run(alg, store, n, &ev, &options, &mut rng)
    })
    .unwrap();
    eprintln!(
        "  {name}/{store} n={n}: {:.3e} s/eval after {} warmup windows ({:.1} s)",
        rec.mean,
        rec.warmup_windows,
        started.elapsed().as_secs_f64()
    );
    rec.mean
}

fn ac4() -> Outcome {
    let mut pass = true;
    let mut parts = Vec::new();
    for store in [StoreKind::Mst, StoreKind::Naive] {
        for name in [AlgorithmName::Rls, AlgorithmName::Opo] {
            let small = op_time(name, store, 1 << 10, 5);
            let large = op_time(name, store, 1 << 16, 5);
            let ratio = large / small;
            let ok = match store {
                StoreKind::Mst => ratio <= 3.0,
                StoreKind::Naive => ratio >= 20.0,
            };
            pass &= ok;
            parts.push(format!("{store}/{name} {small:.2e}->{large:.2e} ratio {ratio:.2}"));
        }
    }
    outcome(pass, format!("{} (need mst <= 3, naive >= 20)", parts.join("; ")))
}

fn ac5() -> Outcome {
    let n = 1 << 12;
    let two = op_time(AlgorithmName::Mpo2, StoreKind::Mst, n, 5);
    let ten = op_time(AlgorithmName::Mpo10, StoreKind::Mst, n, 5);
    let ratio = ten / two;
    outcome(ratio >= 2.0, format!("(10+1) {ten:.2e} s, (2+1) {two:.2e} s, ratio {ratio:.2} (need >= 2)"))
}

fn ac6() -> Outcome {
    let mut pass = true;
    let mut parts = Vec::new();
    for seed in 0..3 {
        let started = Instant::now();
        let trace = run_trace(&TraceConfig {
            seed,
            ..TraceConfig::default()
        })
        .unwrap();
        let secs = started.elapsed().as_secs_f64();
        let diverse = trace.rows.iter().any(|r| r.evals > 1000 && r.total_patch_size > 30.0);
        let ok = trace.rows.len() == 10_000 && trace.correlation >= 0.8 && diverse && secs < 300.0;
        pass &= ok;
        parts.push(format!(
            "seed {seed}: r = {:.4}, patch size > 30 after 10^3: {diverse}, {secs:.1} s",
            trace.correlation
        ));
    }
    outcome(pass, format!("{} (need r >= 0.8)", parts.join("; ")))
}

fn binomial_pmf(n: usize, p: f64) -> Vec<f64> {
    let mut out = vec![(1.0 - p).powi(n as i32)];
    for k in 1..=n {
        let prev = out[k - 1];
        out.push(prev * (n - k + 1) as f64 / k as f64 * p / (1.0 - p));
    }
    out
}

fn ac7() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(77);
    let samples = 100_000u64;
    let mut pass = true;
    let mut parts = Vec::new();
    for (n, p) in [(10usize, 0.3), (100, 0.01), (7, 0.9)] {
        let mut counts = vec![0u64; n + 1];
        for _ in 0..samples {
            counts[sample_binomial(n, p, &mut rng).unwrap()] += 1;
        }
        // Pool adjacent cells until each expects at least 5 draws.
        let mut cells: Vec<(f64, f64)> = Vec::new();
        let mut acc = (0.0, 0.0);
        for (c, q) in counts.iter().zip(binomial_pmf(n, p)) {
            acc.0 += *c as f64;
            acc.1 += q * samples as f64;
            if acc.1 >= 5.0 {
                cells.push(acc);
                acc = (0.0, 0.0);
            }
        }
        let last = cells.last_mut().unwrap();
        last.0 += acc.0;
        last.1 += acc.1;
        let stat: f64 = cells.iter().map(|(o, e)| (o - e).powi(2) / e).sum();
        let critical = ChiSquared::new((cells.len() - 1) as f64).unwrap().inverse_cdf(0.999);
        pass &= stat < critical;
        parts.push(format!("Bin({n},{p}) chi2 {stat:.2} < {critical:.2}"));
    }
    outcome(pass, parts.join("; "))
}

fn ac8() -> Outcome {
    let n = 1024;
    let mut total = 0u64;
    for seed in 0..20 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let options = RunOptions::new(StopCondition::Target(FitnessValue::OneMax(n as u64)));
        let (trace, _) = Algorithm::one_plus_one(n)
            .run::<PopulationTree, _>(n, Evaluator::OneMax, &options, &mut rng)
            .unwrap();
        if trace.best != FitnessValue::OneMax(n as u64) {
            return outcome(false, format!("seed {seed} stopped at {}", trace.best));
        }
        total += trace.evaluations;
    }
    let mean = total as f64 / 20.0;
    let oracle = std::f64::consts::E * n as f64 * (n as f64).ln();
    let ratio = mean / oracle;
    outcome(
        (1.0 / 3.0..=3.0).contains(&ratio),
        format!("mean {mean:.0} evaluations vs e n ln n = {oracle:.0}, ratio {ratio:.3}"),
    )
}

fn ac9() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    for n in [1usize, 2, 17, 1024] {
        let mut set = IndexSet::new(n).unwrap();
        let mut model: BTreeSet<u32> = BTreeSet::new();
        for step in 0..100_000 {
            let ok = match rng.random_range(0..5) {
                0 => {
                    let e = rng.random_range(0..n);
                    set.toggle(e).unwrap();
                    if !model.remove(&(e as u32)) {
                        model.insert(e as u32);
                    }
                    true
                }
                1 => {
                    let e = rng.random_range(0..n);
                    set.contains(e).unwrap() == model.contains(&(e as u32))
                }
                2 => match set.add_random_absent(&mut rng) {
                    Ok(e) => model.insert(e as u32),
                    Err(_) => model.len() == n,
                },
                3 => {
                    let s = model.len();
                    let add = rng.random_range(0..=(n - s).min(5));
                    let remove = rng.random_range(0..=s.min(5));
                    set.flip_random(add, remove, &mut rng).unwrap();
                    let after: BTreeSet<u32> = set.snapshot().iter().map(|i| i as u32).collect();
                    let ok = after.difference(&model).count() == add
                        && model.difference(&after).count() == remove
                        && after.len() == s + add - remove;
                    model = after;
                    ok
                }
                _ => {
                    let snap = set.snapshot();
                    let mut copy = IndexSet::new(n).unwrap();
                    copy.merge(&snap).unwrap();
                    copy.snapshot() == snap
                }
            };
            let agree = ok
                && set.len() == model.len()
                && set.snapshot().iter().map(|i| i as u32).eq(model.iter().copied());
            if !agree {
                return outcome(false, format!("n = {n}, step {step}: disagreement with the reference set"));
            }
        }
    }
    outcome(true, "4 x 10^5 operations agree with a BTreeSet for n in {1, 2, 17, 1024}")
}

/// Name, runtime limit in seconds, check.
type Criterion = (&'static str, u64, fn() -> Outcome);

fn main() -> ExitCode {
    let only: Vec<String> = std::env::args().skip(1).filter(|a| a.starts_with("AC")).collect();
    let criteria: [Criterion; 9] = [
        ("AC1", 60, ac1),
        ("AC2", 60, ac2),
        ("AC3", 30, ac3),
        ("AC4", 900, ac4),
        ("AC5", 300, ac5),
        ("AC6", 900, ac6),
        ("AC7", 10, ac7),
        ("AC8", 120, ac8),
        ("AC9", 10, ac9),
    ];
    let mut failed = 0;
    for (name, limit, f) in criteria {
        if !only.is_empty() && !only.iter().any(|o| o == name) {
            continue;
        }
        let started = Instant::now();
        let result = f();
        let secs = started.elapsed().as_secs_f64();
        let pass = result.pass && secs < limit as f64;
        failed += !pass as usize;
        println!(
            "{name} {} {} [{secs:.1} s, limit {limit} s]",
            if pass { "PASS" } else { "FAIL" },
            result.detail
        );
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        println!("{failed} criteria failed");
        ExitCode::FAILURE
    }
}
