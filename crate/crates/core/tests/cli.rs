//! End-to-end checks of the `cquant` binary: output determinism with a fixed
//! seed and the exit-status contract.

use std::fs;
use std::path::Path;
use std::process::Command;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_cquant"))
}

const SCENARIO: &str = "
[scenario]
name = cli-demo
seed = 11
r = 2
n_list = 2,4,8
n = 2

[measure]
kind = cantor
a = 0 0
b = 1 0
depth = 8

[constraint]
kind = segment
a = -1 1
b = 2 1

[analysis]
u3_s = auto
checks = u1,u3,box
";

fn write_scenario(dir: &Path) -> std::path::PathBuf {
    let path = dir.join("scene.cfg");
    fs::write(&path, SCENARIO).unwrap();
    path
}

#[test]
fn fixed_seed_runs_are_byte_identical() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_scenario(tmp.path());
    for sub in ["quantize", "curve", "dimension", "check", "project"] {
        let out1 = tmp.path().join(format!("{sub}-1"));
        let out2 = tmp.path().join(format!("{sub}-2"));
        for out in [&out1, &out2] {
            let status = bin()
                .args([sub, "--config"])
                .arg(&cfg)
                .args(["--seed", "11", "--out"])
                .arg(out)
                .status()
                .unwrap();
            assert!(status.success(), "{sub} failed");
        }
        let mut names: Vec<_> = fs::read_dir(&out1)
            .unwrap()
            .map(|e| e.unwrap().file_name())
            .collect();
        names.sort();
        assert!(!names.is_empty());
        for name in names {
            let a = fs::read(out1.join(&name)).unwrap();
            let b = fs::read(out2.join(&name)).unwrap();
            assert_eq!(a, b, "{sub}/{name:?} differs between identical runs");
        }
    }
}

#[test]
fn thread_count_does_not_change_outputs() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_scenario(tmp.path());
    let out1 = tmp.path().join("t1");
    let out2 = tmp.path().join("t2");
    for (out, threads) in [(&out1, "1"), (&out2, "2")] {
        let status = bin()
            .args(["curve", "--config"])
            .arg(&cfg)
            .args(["--threads", threads, "--out"])
            .arg(out)
            .status()
            .unwrap();
        assert!(status.success());
    }
    let a = fs::read(out1.join("curve.csv")).unwrap();
    let b = fs::read(out2.join("curve.csv")).unwrap();
    assert_eq!(
        a, b,
        "parallel and serial schedules must agree byte for byte"
    );
}

#[test]
fn reproduce_writes_the_full_bundle() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("bundle");
    let status = bin()
        .args(["reproduce", "dirac-circle", "--out"])
        .arg(&out)
        .status()
        .unwrap();
    assert!(status.success());
    for file in [
        "codebook.txt",
        "summary.csv",
        "curve.csv",
        "report.json",
        "checks.json",
    ] {
        assert!(out.join(file).exists(), "missing {file}");
    }
    let curve = fs::read_to_string(out.join("curve.csv")).unwrap();
    assert!(curve.starts_with("n,r,e,e_inf,e_hat,e_tilde,iters,restarts,best_seed,clamped"));
}

#[test]
fn exit_codes_distinguish_failure_classes() {
    let tmp = tempfile::tempdir().unwrap();

    // missing config: configuration error
    let status = bin()
        .args(["curve", "--out"])
        .arg(tmp.path().join("x"))
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(2));

    // malformed scenario: configuration error
    let bad = tmp.path().join("bad.cfg");
    fs::write(
        &bad,
        "[constraint]\nkind = ball\nradius = -1\n[measure]\nkind = dirac\n",
    )
    .unwrap();
    let status = bin()
        .args(["quantize", "--config"])
        .arg(&bad)
        .args(["--out"])
        .arg(tmp.path().join("y"))
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(2));

    // over-budget depth: resource error
    let deep = tmp.path().join("deep.cfg");
    fs::write(
        &deep,
        "[scenario]\nn_list = 2,4\n[measure]\nkind = cantor\ndepth = 25\n[constraint]\nkind = segment\na = -1 1\nb = 2 1\n",
    )
    .unwrap();
    let status = bin()
        .args(["quantize", "--config"])
        .arg(&deep)
        .args(["--out"])
        .arg(tmp.path().join("z"))
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(3));

    // unknown preset: configuration error
    let status = bin().args(["reproduce", "nope"]).status().unwrap();
    assert_eq!(status.code(), Some(2));
}
