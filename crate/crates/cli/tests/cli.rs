use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use ltsim::config::RunConfig;
use ltsim::integrator::clamped_step_count;

const GAUSSIAN: &str = r#"
[hamiltonian]
catalog = "gaussian"
params = { a = 0.3 }

[simulation]
mode = "adaptive"
k = 2
epsilon = 1e-2
t0 = 0.9
dt = 0.2
"#;

const RANDOM: &str = r#"
[hamiltonian]
catalog = "random_sparse"
params = { qubits = 2, sparsity = 2 }

[simulation]
mode = "constant"
k = 1
epsilon = 1e-2
seed = 3
"#;

fn ltsim(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ltsim")).args(args).output().unwrap()
}

fn write_config(dir: &Path, text: &str) -> String {
    let path = dir.join("run.toml");
    fs::write(&path, text).unwrap();
    path.to_str().unwrap().to_owned()
}

fn golden(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/data").join(name)
}

fn column(csv: &str, name: &str) -> String {
    let mut lines = csv.lines();
    let header: Vec<&str> = lines.next().unwrap().split(',').collect();
    let row: Vec<&str> = lines.next().unwrap().split(',').collect();
    let i = header.iter().position(|h| *h == name).unwrap();
    row[i].to_owned()
}

/// Set `LTSIM_BLESS=1` to rewrite the golden files after an intended change.
#[test]
fn adaptive_plan_matches_golden_schedule() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), GAUSSIAN);
    let out = dir.path().join("out");
    let res = ltsim(&["--quiet", "plan", "--config", &cfg, "--out", out.to_str().unwrap()]);
    assert!(res.status.success(), "{}", String::from_utf8_lossy(&res.stderr));
    for name in ["schedule.txt", "cost.csv"] {
        let produced = fs::read_to_string(out.join(name)).unwrap();
        let path = golden(&format!("gaussian_adaptive_{name}"));
        if std::env::var_os("LTSIM_BLESS").is_some() {
            fs::write(&path, &produced).unwrap();
        }
        assert_eq!(produced, fs::read_to_string(path).unwrap(), "{name}");
    }
    assert!(out.join("plan.txt").exists());
}

#[test]
fn constant_mode_flag_uses_the_clamped_step_count() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), GAUSSIAN);
    let out = dir.path().join("out");
    let res = ltsim(&[
        "--quiet",
        "plan",
        "--config",
        &cfg,
        "--out",
        out.to_str().unwrap(),
        "--mode",
        "constant",
    ]);
    assert!(res.status.success());
    assert!(!out.join("schedule.txt").exists());
    let cost = fs::read_to_string(out.join("cost.csv")).unwrap();
    let config = RunConfig::parse(GAUSSIAN).unwrap();
    let ham = config.catalog.build().unwrap();
    let bounds = ltsim::hamiltonian::smoothness::declare_bounds(&ham, 4, ltsim::run::BOUND_SAMPLES);
    let r = clamped_step_count(2, 1, bounds.lambda, 0.2, 1e-2).unwrap();
    assert_eq!(column(&cost, "r"), r.to_string());
}

#[test]
fn missing_epsilon_is_a_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), &GAUSSIAN.replace("epsilon = 1e-2\n", ""));
    let res = ltsim(&["plan", "--config", &cfg, "--out", dir.path().to_str().unwrap()]);
    assert_eq!(res.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&res.stderr).contains("simulation.epsilon"));
}

#[test]
fn unknown_mode_is_a_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), GAUSSIAN);
    let res = ltsim(&[
        "plan",
        "--config",
        &cfg,
        "--out",
        dir.path().to_str().unwrap(),
        "--mode",
        "fast",
    ]);
    assert_eq!(res.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&res.stderr).contains("simulation.mode"));
}

#[test]
fn simulate_reports_error_within_tolerance() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), RANDOM);
    let res = ltsim(&[
        "--quiet",
        "simulate",
        "--config",
        &cfg,
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert!(res.status.success(), "{}", String::from_utf8_lossy(&res.stderr));
    let result = fs::read_to_string(dir.path().join("result.csv")).unwrap();
    assert!(result.ends_with('\n') && !result.contains('\r'));
    let error: f64 = column(&result, "error").parse().unwrap();
    assert!(error <= 1e-2);
    assert_eq!(column(&result, "epsilon"), "1.0000000000000000e-2");
    assert!(dir.path().join("timing.csv").exists());
}

#[test]
fn starved_precision_exits_with_violation() {
    let dir = tempfile::tempdir().unwrap();
    let text = format!("{RANDOM}\n[oracle]\nvalue_qubits_override = 4\n");
    let cfg = write_config(dir.path(), &text);
    let res = ltsim(&["simulate", "--config", &cfg, "--out", dir.path().to_str().unwrap()]);
    assert_eq!(res.status.code(), Some(3), "{}", String::from_utf8_lossy(&res.stderr));
    assert!(String::from_utf8_lossy(&res.stderr).contains("exceeds ε"));
}

#[test]
fn large_systems_are_refused_for_simulation() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), &RANDOM.replace("qubits = 2", "qubits = 7"));
    let res = ltsim(&["simulate", "--config", &cfg, "--out", dir.path().to_str().unwrap()]);
    assert_eq!(res.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&res.stderr).contains("plan-only"));
}

#[test]
fn sweep_output_is_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let run = |name: &str| {
        let out = dir.path().join(name);
        let res = ltsim(&[
            "--quiet",
            "sweep-gaussian",
            "--out",
            out.to_str().unwrap(),
            "--a",
            "0.2,0.5,1",
            "--epsilon",
            "1e-3",
        ]);
        assert!(res.status.success());
        fs::read(out.join("gaussian_sweep.csv")).unwrap()
    };
    let first = run("a");
    assert_eq!(first, run("b"));
    let text = String::from_utf8(first).unwrap();
    let rows: Vec<Vec<u64>> = text
        .lines()
        .skip(1)
        .map(|l| l.split(',').skip(1).map(|x| x.parse().unwrap()).collect())
        .collect();
    assert_eq!(text.lines().next().unwrap(), "a,N_exp_adaptive,N_exp_constant");
    assert_eq!(rows.len(), 3);
    // constant-step counts cannot grow with the width
    assert!(rows.windows(2).all(|w| w[0][1] >= w[1][1]));
}

#[test]
fn optimize_k_writes_curve_and_optimum() {
    let dir = tempfile::tempdir().unwrap();
    let res = ltsim(&[
        "--quiet",
        "optimize-k",
        "--out",
        dir.path().to_str().unwrap(),
        "--end",
        "1",
    ]);
    assert!(res.status.success(), "{}", String::from_utf8_lossy(&res.stderr));
    let text = fs::read_to_string(dir.path().join("optimize_k.csv")).unwrap();
    let last = text.lines().last().unwrap();
    assert!(last.starts_with("optimum,"));
    let best: u64 = last.split(',').nth(2).unwrap().parse().unwrap();
    for line in text.lines().filter(|l| l.starts_with("grid,")) {
        if let Some(c) = line.split(',').nth(2).filter(|c| !c.is_empty()) {
            assert!(best <= c.parse::<u64>().unwrap());
        }
    }
}
