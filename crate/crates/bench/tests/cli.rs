use std::path::PathBuf;
use std::process::Command;

fn bench() -> Command {
    Command::new(env!("CARGO_BIN_EXE_bench"))
}

fn out_path(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("mst-patches-bench-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

/// Drops the timing columns.
fn structural(csv: &str, timing: &[usize]) -> Vec<String> {
    csv.lines()
        .map(|l| {
            l.split(',')
                .enumerate()
                .filter(|(i, _)| !timing.contains(i))
                .map(|(_, f)| f)
                .collect::<Vec<_>>()
                .join(",")
        })
        .collect()
}

#[test]
fn trace_csv_is_reproducible() {
    let mut outputs = Vec::new();
    for run in 0..2 {
        let out = out_path(&format!("trace{run}.csv"));
        let status = bench()
            .args(["--experiment", "knapsack-trace", "--n", "200", "--budget", "1000", "--stride", "10", "--seed", "4"])
            .arg("--out")
            .arg(&out)
            .output()
            .unwrap();
        assert!(status.status.success(), "{}", String::from_utf8_lossy(&status.stderr));
        assert!(String::from_utf8_lossy(&status.stdout).contains("pearson correlation"));
        outputs.push(std::fs::read_to_string(&out).unwrap());
    }
    let a = structural(&outputs[0], &[1]);
    assert_eq!(a[0], "evals,total_patch_size,min_patch,max_patch");
    assert_eq!(a.len(), 101);
    assert_eq!(a, structural(&outputs[1], &[1]));
}

#[test]
fn scaling_csv_is_reproducible() {
    let mut outputs = Vec::new();
    for run in 0..2 {
        let out = out_path(&format!("scaling{run}.csv"));
        let status = bench()
            .args([
                "--experiment", "onemax-scaling", "--algorithms", "rls,mpo10", "--stores", "mst",
                "--k-min", "5", "--k-max", "6", "--windows", "2", "--window-secs", "0.01", "--seed", "9",
            ])
            .arg("--out")
            .arg(&out)
            .output()
            .unwrap();
        assert!(status.status.success(), "{}", String::from_utf8_lossy(&status.stderr));
        outputs.push(std::fs::read_to_string(&out).unwrap());
    }
    let a = structural(&outputs[0], &[3, 4]);
    assert_eq!(
        a,
        ["algorithm,store,n,windows,seed", "rls,mst,32,2,9", "mpo10,mst,32,2,9", "rls,mst,64,2,9", "mpo10,mst,64,2,9"]
    );
    assert_eq!(a, structural(&outputs[1], &[3, 4]));
}

#[test]
fn invalid_configurations_fail_with_a_message() {
    let out = out_path("bad.csv");
    for args in [
        vec!["--experiment", "onemax-scaling", "--k-max", "25"],
        vec!["--experiment", "onemax-scaling", "--k-min", "9", "--k-max", "8"],
        vec!["--experiment", "onemax-scaling", "--algorithms", "ga"],
        vec!["--experiment", "onemax-scaling", "--window-secs", "0"],
        vec!["--experiment", "onemax-scaling", "--budget", "100"],
        vec!["--experiment", "knapsack-budget", "--windows", "0"],
        vec!["--experiment", "knapsack-trace", "--stores", "naive"],
        vec!["--experiment", "knapsack-trace", "--budget", "105"],
        vec!["--experiment", "sorting"],
    ] {
        let output = bench().args(&args).arg("--out").arg(&out).output().unwrap();
        assert!(!output.status.success(), "{args:?} succeeded");
        assert!(!output.stderr.is_empty());
    }
}
