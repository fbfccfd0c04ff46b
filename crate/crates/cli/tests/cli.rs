use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use tempfile::TempDir;

fn cli(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ansatz-rl")).args(args).output().expect("binary runs")
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_string()
}

fn json(path: &Path) -> serde_json::Value {
    serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap()
}

const TOY: &str = r#"
master_seed = 5
shots = 200
[problem]
kind = "max_cut"
topology = "cycle"
n = 4
[rl]
epochs = 2
steps_per_epoch = 12
workers = 1
[optimizer]
max_iterations = 60
"#;

#[test]
fn missing_config_exits_2() {
    let out = cli(&["train", "--config", "/nonexistent/run.toml"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("cannot read"));
}

#[test]
fn unknown_algorithm_exits_2() {
    let tmp = TempDir::new().unwrap();
    let cfg = write(tmp.path(), "c.toml", TOY);
    assert_eq!(cli(&["baseline", "--config", &cfg, "--algorithm", "qaoa7"]).status.code(), Some(2));
}

#[test]
fn invalid_values_exit_2() {
    let tmp = TempDir::new().unwrap();
    let big = write(tmp.path(), "big.toml", "[problem]\nn = 24\n");
    let out = tmp.path().join("o");
    assert_eq!(cli(&["brute-force", "--config", &big, "--out", out.to_str().unwrap()]).status.code(), Some(2));
    let toy = write(tmp.path(), "toy.toml", TOY);
    assert_eq!(cli(&["train", "--config", &toy, "--workers", "0"]).status.code(), Some(2));
}

#[test]
fn brute_force_triangle() {
    let tmp = TempDir::new().unwrap();
    let cfg = write(tmp.path(), "k3.toml", "[problem]\ntopology = \"cycle\"\nn = 3\n");
    let out = tmp.path().join("bf");
    assert!(cli(&["brute-force", "--config", &cfg, "--out", out.to_str().unwrap()]).status.success());
    let s = json(&out.join("spectrum.json"));
    assert_eq!(s["e_min"], -2.0);
    assert_eq!(s["e_max"], 0.0);
    assert_eq!(s["feasibility_threshold_ar"], 0.0);
    assert_eq!(s["degenerate"], false);

    let empty = write(tmp.path(), "empty.toml", "[problem]\ntopology = { erdos_renyi = 0.0 }\nn = 4\n");
    assert!(cli(&["brute-force", "--config", &empty, "--out", out.to_str().unwrap()]).status.success());
    assert_eq!(json(&out.join("spectrum.json"))["degenerate"], true);
}

#[test]
fn train_writes_reproducible_artifacts() {
    let tmp = TempDir::new().unwrap();
    let cfg = write(tmp.path(), "toy.toml", TOY);
    let a = tmp.path().join("a");
    let b = tmp.path().join("b");
    for dir in [&a, &b] {
        let out = cli(&["train", "--config", &cfg, "--out", dir.to_str().unwrap()]);
        assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    }
    for f in ["config.json", "steps.csv", "epochs.csv", "best_circuit.json", "report.json"] {
        assert!(a.join(f).is_file(), "{f}");
    }
    assert_eq!(fs::read(a.join("steps.csv")).unwrap(), fs::read(b.join("steps.csv")).unwrap());
    let epochs = fs::read_to_string(a.join("epochs.csv")).unwrap();
    assert_eq!(epochs.lines().count(), 3);
    assert_eq!(json(&a.join("config.json"))["version"], env!("CARGO_PKG_VERSION"));

    let ev = tmp.path().join("ev");
    let circuit = a.join("best_circuit.json");
    let out = cli(&["eval", "--config", &cfg, "--circuit", circuit.to_str().unwrap(), "--out", ev.to_str().unwrap()]);
    assert!(out.status.success());
    let e = json(&ev.join("eval.json"));
    let total: f64 = e["histogram"].as_array().unwrap().iter().map(|b| b["frequency"].as_f64().unwrap()).sum();
    assert!((total - 1.0).abs() < 1e-9);
}

#[test]
fn baselines_report_ten_runs() {
    let tmp = TempDir::new().unwrap();
    let cfg = write(tmp.path(), "star.toml", "[problem]\ntopology = \"star\"\nn = 8\n[optimizer]\nmax_iterations = 150\n");
    let lin = tmp.path().join("lin");
    assert!(cli(&["baseline", "--config", &cfg, "--algorithm", "linear", "--out", lin.to_str().unwrap()]).status.success());
    let r = json(&lin.join("report.json"));
    assert_eq!(r["per_run_ratios"].as_array().unwrap().len(), 10);
    assert_eq!(fs::read_to_string(lin.join("runs.csv")).unwrap().lines().count(), 11);

    let q2 = tmp.path().join("q2");
    assert!(cli(&["baseline", "--config", &cfg, "--algorithm", "qaoa2", "--out", q2.to_str().unwrap()]).status.success());
    assert_eq!(json(&q2.join("circuit.json"))["params"].as_array().unwrap().len(), 4);
}

#[test]
fn matrix_rows_and_resume() {
    let tmp = TempDir::new().unwrap();
    let m = write(
        tmp.path(),
        "m.toml",
        r#"
        problems = ["max_cut", "min_vertex_cover"]
        topologies = ["star", "cycle"]
        sizes = [4]
        algorithms = ["qaoa1", "linear"]
        [base]
        eval_runs = 2
        shots = 200
        [base.optimizer]
        max_iterations = 40
        "#,
    );
    let out = tmp.path().join("m");
    let o = out.to_str().unwrap();
    assert!(cli(&["matrix", "--config", &m, "--out", o]).status.success());
    let table = fs::read_to_string(out.join("table.csv")).unwrap();
    assert_eq!(table.lines().count(), 9);
    assert!(table.lines().next().unwrap().starts_with("problem,topology,n,algorithm,approx_ratio"));

    // a resumed run reads completed cells back instead of recomputing them
    let cell = out.join("max_cut_star_n4_linear").join("report.json");
    let mut r = json(&cell);
    r["approx_ratio"] = serde_json::json!(0.123);
    fs::write(&cell, serde_json::to_string(&r).unwrap()).unwrap();
    assert!(cli(&["matrix", "--config", &m, "--out", o, "--resume"]).status.success());
    assert!(fs::read_to_string(out.join("table.csv")).unwrap().contains(",0.123,"));

    let bad = write(tmp.path(), "bad.toml", "problems = []\n");
    assert_eq!(cli(&["matrix", "--config", &bad, "--out", o]).status.code(), Some(2));
}
