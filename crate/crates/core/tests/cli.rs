//! End-to-end runs of the `copula` binary.

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn copula(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_copula"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn write_sample(dir: &Path) -> std::path::PathBuf {
    let input = dir.join("sample.csv");
    fs::write(&input, "x,y\n0.3,1.2\n-1.0,0.4\n2.5,3.1\n0.9,-0.2\n").unwrap();
    input
}

#[test]
fn estimate_writes_full_grid() {
    let dir = tempfile::tempdir().unwrap();
    let input = write_sample(dir.path());
    let out = dir.path().join("grid.csv");
    let res = copula(&[
        "estimate",
        "--input",
        path(&input),
        "--header",
        "--estimator",
        "bernstein",
        "--degrees",
        "2",
        "--grid",
        "5",
        "--out",
        path(&out),
    ]);
    assert!(res.status.success(), "{}", String::from_utf8_lossy(&res.stderr));
    let text = fs::read_to_string(&out).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "u_1,u_2,value");
    assert_eq!(lines.len(), 1 + 25);
    let last: Vec<f64> = lines[25].split(',').map(|v| v.parse().unwrap()).collect();
    assert_eq!(last, vec![1.0, 1.0, 1.0]);
}

#[test]
fn ties_are_rejected_unless_randomized() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("ties.csv");
    fs::write(&input, "1,2\n1,3\n2,1\n").unwrap();
    let out = dir.path().join("grid.csv");
    let base = [
        "estimate",
        "--input",
        path(&input),
        "--estimator",
        "beta",
        "--grid",
        "3",
        "--out",
        path(&out),
    ];
    let res = copula(&base);
    assert_eq!(res.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&res.stderr).starts_with("error:"));
    let mut args = base.to_vec();
    args.extend(["--ties", "random", "--tie-seed", "4"]);
    assert!(copula(&args).status.success());
}

#[test]
fn validate_reports_counterexample() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("coef.csv");
    let rows = [
        (0, 0, "0"),
        (0, 1, "0"),
        (0, 2, "0"),
        (1, 0, "0"),
        (1, 1, "1/8"),
        (1, 2, "1/3"),
        (2, 0, "0"),
        (2, 1, "1/2"),
        (2, 2, "2/3"),
        (3, 0, "0"),
        (3, 1, "1/2"),
        (3, 2, "1"),
    ];
    let text: String = rows.iter().map(|(i, j, v)| format!("{i},{j},{v}\n")).collect();
    fs::write(&input, text).unwrap();
    let res = copula(&["validate", "--input", path(&input), "--exact"]);
    assert_eq!(res.status.code(), Some(1));
    let stdout = String::from_utf8_lossy(&res.stdout);
    assert!(stdout.contains("-1/24"), "{stdout}");

    let good = dir.path().join("good.csv");
    let text: String = (0..=2)
        .flat_map(|i| (0..=2).map(move |j| format!("{i},{j},{}\n", (i * j) as f64 / 4.0)))
        .collect();
    fs::write(&good, text).unwrap();
    assert_eq!(copula(&["validate", "--input", path(&good)]).status.code(), Some(0));
}

#[test]
fn sample_is_seeded() {
    let dir = tempfile::tempdir().unwrap();
    let input = write_sample(dir.path());
    let run = |name: &str, seed: &str| {
        let out = dir.path().join(name);
        let res = copula(&[
            "sample",
            "--input",
            path(&input),
            "--header",
            "--count",
            "50",
            "--seed",
            seed,
            "--scheme",
            "orderstat",
            "--out",
            path(&out),
        ]);
        assert!(res.status.success(), "{}", String::from_utf8_lossy(&res.stderr));
        fs::read_to_string(out).unwrap()
    };
    let a = run("a.csv", "9");
    assert_eq!(a, run("b.csv", "9"));
    assert_ne!(a, run("c.csv", "10"));
    let rows = a.lines().filter(|l| l.split(',').count() == 2).count();
    assert!(rows >= 50);
}

#[test]
fn simulate_is_reproducible_and_honours_config() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("study.cfg");
    fs::write(
        &cfg,
        "model = fgm\ntheta = -1\nestimators = empirical,beta\nn = 10:20:10\nreps = 30\nseed = 3\n",
    )
    .unwrap();
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    for out in [&a, &b] {
        let res = copula(&["simulate", "--config", path(&cfg), "--reps", "25", "--out", path(out)]);
        assert!(res.status.success(), "{}", String::from_utf8_lossy(&res.stderr));
    }
    for name in [
        "fgm_theta-1_isb.csv",
        "fgm_theta-1_ivar.csv",
        "fgm_theta-1_imse.csv",
        "manifest.txt",
    ] {
        assert_eq!(
            fs::read(a.join(name)).unwrap(),
            fs::read(b.join(name)).unwrap(),
            "{name}"
        );
    }
    let manifest = fs::read_to_string(a.join("manifest.txt")).unwrap();
    assert!(manifest.contains("replications = 25"));
    assert!(manifest.contains("n = 10,20"));
    assert_eq!(
        fs::read_to_string(a.join("fgm_theta-1_imse.csv"))
            .unwrap()
            .lines()
            .count(),
        1 + 4
    );
}

#[test]
fn lre_requires_a_model() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("lre.csv");
    let res = copula(&["lre", "--n", "20", "--reps", "10", "--out", path(&out)]);
    assert_eq!(res.status.code(), Some(2));
    let res = copula(&[
        "lre",
        "--model",
        "indep",
        "--n",
        "20",
        "--cells",
        "4",
        "--reps",
        "20",
        "--out",
        path(&out),
    ]);
    assert!(res.status.success(), "{}", String::from_utf8_lossy(&res.stderr));
    assert_eq!(fs::read_to_string(&out).unwrap().lines().count(), 1 + 16);
}
