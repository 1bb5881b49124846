use std::path::Path;
use std::process::{Command, Output};

use tempfile::TempDir;

fn evofs(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_evofs"))
        .current_dir(dir)
        .args(args)
        .output()
        .expect("binary runs")
}

fn gen_oracle(dir: &Path) {
    let out = evofs(dir, &["gen-oracle", "--out", "oracle.csv", "--seed", "3"]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    assert!(dir.join("oracle.optimum").exists());
}

fn report(dir: &Path, sub: &str) -> String {
    std::fs::read_to_string(dir.join(sub).join("report.txt")).unwrap()
}

#[test]
fn run_with_config_file_and_overrides() {
    let dir = TempDir::new().unwrap();
    gen_oracle(dir.path());
    std::fs::write(
        dir.path().join("exp.cfg"),
        "dataset = oracle.csv\n\n[experiment]\noptimizer = abc\nrepeats = 4\niterations = 5\n\n[optimizer]\nlimit = 4\n",
    )
    .unwrap();
    let args = [
        "run",
        "--config",
        "exp.cfg",
        "--repeats",
        "2",
        "--set",
        "pop_size=10",
        "--out-dir",
        "a",
    ];
    let out = evofs(dir.path(), &args);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let text = report(dir.path(), "a");
    assert!(text.contains("optimizer = abc"));
    assert!(text.contains("repeats = 2"));
    assert!(text.contains("max_iterations = 5"));

    let mut again = args;
    again[8] = "b";
    assert!(evofs(dir.path(), &again).status.success());
    assert_eq!(text, report(dir.path(), "b"));
    for i in 0..2 {
        let name = format!("convergence_run_{i}.csv");
        assert_eq!(
            std::fs::read(dir.path().join("a").join(&name)).unwrap(),
            std::fs::read(dir.path().join("b").join(&name)).unwrap()
        );
    }
}

#[test]
fn bad_configuration_exits_with_usage_status() {
    let dir = TempDir::new().unwrap();
    gen_oracle(dir.path());
    let cases: [&[&str]; 4] = [
        &[
            "run",
            "--dataset",
            "oracle.csv",
            "--optimizer",
            "bat",
            "--out-dir",
            "x",
        ],
        &[
            "run",
            "--dataset",
            "oracle.csv",
            "--optimizer",
            "pso",
            "--set",
            "optimizer.nope=1",
            "--out-dir",
            "x",
        ],
        &[
            "run",
            "--dataset",
            "oracle.csv",
            "--optimizer",
            "ga-ssga",
            "--repeats",
            "0",
            "--out-dir",
            "x",
        ],
        &[
            "run",
            "--dataset",
            "oracle.csv",
            "--optimizer",
            "coa",
            "--pop-size",
            "3",
            "--out-dir",
            "x",
        ],
    ];
    for args in cases {
        let out = evofs(dir.path(), args);
        assert_ne!(out.status.code(), Some(0), "{args:?}");
        assert!(!out.stderr.is_empty());
        assert!(!dir.path().join("x").exists(), "{args:?}");
    }
    let out = evofs(dir.path(), cases[0]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn compare_writes_a_table() {
    let dir = TempDir::new().unwrap();
    gen_oracle(dir.path());
    let out = evofs(
        dir.path(),
        &[
            "compare",
            "--dataset",
            "oracle.csv",
            "--optimizer",
            "ga-gga,gwo,fsa",
            "--repeats",
            "2",
            "--iterations",
            "5",
            "--pop-size",
            "10",
            "--out-dir",
            "cmp",
        ],
    );
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let table = std::fs::read_to_string(dir.path().join("cmp/comparison.txt")).unwrap();
    for name in ["ga-gga", "gwo", "fsa"] {
        assert!(table.contains(name));
        assert!(dir
            .path()
            .join("cmp")
            .join(name)
            .join("report.txt")
            .exists());
    }
}

#[test]
fn reduction_verbs_write_outputs() {
    let dir = TempDir::new().unwrap();
    gen_oracle(dir.path());
    let out = evofs(
        dir.path(),
        &[
            "pca",
            "--dataset",
            "oracle.csv",
            "--components",
            "3",
            "--out-dir",
            "pca",
        ],
    );
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let projected = std::fs::read_to_string(dir.path().join("pca/projected.csv")).unwrap();
    assert!(projected.starts_with("pc0,pc1,pc2,"));
    assert!(dir.path().join("pca/pca_model.txt").exists());

    let out = evofs(
        dir.path(),
        &[
            "gp-gen",
            "--dataset",
            "oracle.csv",
            "--count",
            "2",
            "--generations",
            "3",
            "--out",
            "gp.csv",
        ],
    );
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let header = std::fs::read_to_string(dir.path().join("gp.csv")).unwrap();
    let header = header.lines().next().unwrap().to_string();
    assert!(header.contains("gp_0") && header.contains("gp_1"));
    assert!(header.starts_with("f0,"));
}
