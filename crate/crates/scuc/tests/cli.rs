mod common;

use std::process::{Command, Output};

fn scuc(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_scuc"))
        .args(args)
        .env_remove("SCUC_SOLVER")
        .output()
        .expect("run scuc")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

#[test]
fn run_writes_solution_and_report() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let res = scuc(&["run", "--case", "toy6", "--variant", "dc-st", "--beta", "0.3", "--out", out]);
    assert_eq!(code(&res), 0, "{}", String::from_utf8_lossy(&res.stderr));
    let solution = std::fs::read_to_string(dir.path().join("solution.csv")).unwrap();
    assert!(solution.starts_with("name,value,unit"));
    assert!(solution.lines().any(|l| l.ends_with(",MW")));
    let report = std::fs::read_to_string(dir.path().join("report.csv")).unwrap();
    assert_eq!(report.lines().count(), 2);
    assert!(dir.path().join("summary.txt").is_file());
}

#[test]
fn sweep_writes_the_study() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let res = scuc(&["sweep", "--case", "toy3", "--betas", "0.2,0.4", "--out", out]);
    assert_eq!(code(&res), 0, "{}", String::from_utf8_lossy(&res.stderr));
    let report = std::fs::read_to_string(dir.path().join("report.csv")).unwrap();
    assert_eq!(report.lines().count(), 1 + 2 + 3 * 2);
    for chart in ["savings.svg", "overloads.svg", "curtailment.svg"] {
        let svg = std::fs::read_to_string(dir.path().join(chart)).unwrap();
        assert!(svg.trim_end().ends_with("</svg>"), "{chart}");
    }
}

#[test]
fn export_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.mps");
    let b = dir.path().join("b.mps");
    for p in [&a, &b] {
        let res = scuc(&["export-mps", "--case", "toy6", "--variant", "dc-t", "--beta", "0.2", "--path", p.to_str().unwrap()]);
        assert_eq!(code(&res), 0, "{}", String::from_utf8_lossy(&res.stderr));
    }
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
    assert!(dir.path().join("a.mps.names").is_file());
}

#[test]
fn verify_passes_on_toy3() {
    let res = scuc(&["verify", "--case", "toy3", "--variants", "fixed-dc,dc-st", "--betas", "0.5"]);
    assert_eq!(code(&res), 0, "{}", String::from_utf8_lossy(&res.stderr));
    let stdout = String::from_utf8_lossy(&res.stdout);
    assert_eq!(stdout.lines().filter(|l| l.starts_with("PASS")).count(), 2, "{stdout}");
}

#[test]
fn config_errors_exit_one() {
    let bad_bus = common::fixture("unknown_bus.case.json");
    let res = scuc(&["validate", bad_bus.to_str().unwrap()]);
    assert_eq!(code(&res), 1);
    let err = String::from_utf8_lossy(&res.stderr);
    assert!(err.contains("branch 2") && err.contains("99"), "{err}");

    let island = common::fixture("islanding.case.json");
    let res = scuc(&["validate", island.to_str().unwrap()]);
    assert_eq!(code(&res), 1);
    assert!(String::from_utf8_lossy(&res.stderr).contains("branch 1"));

    assert_eq!(code(&scuc(&["run", "--case", "toy3", "--mip-gap", "2"])), 1);
    assert_eq!(code(&scuc(&["run", "--case", "toy3", "--variant", "dc-x"])), 1);
    assert_eq!(code(&scuc(&["run", "--case", "no-such-case"])), 1);

    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.toml");
    std::fs::write(&cfg, "mip_gapp = 0.01\n").unwrap();
    assert_eq!(code(&scuc(&["run", "--config", cfg.to_str().unwrap(), "--case", "toy3"])), 1);
}

#[test]
fn missing_solver_binary_exits_three() {
    let dir = tempfile::tempdir().unwrap();
    let res = scuc(&[
        "run",
        "--case",
        "toy3",
        "--solver",
        "cbc",
        "--solver-bin",
        "/nonexistent/cbc",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(code(&res), 3, "{}", String::from_utf8_lossy(&res.stderr));
}

#[test]
fn infeasible_case_exits_two() {
    // shedding keeps any load feasible, but the spinning-reserve requirement
    // is hard: without reserve ramp it cannot be met
    let dir = tempfile::tempdir().unwrap();
    let mut case: serde_json::Value = serde_json::from_str(scuc::case_file::bundled("toy3").unwrap()).unwrap();
    for g in case["generators"].as_array_mut().unwrap() {
        g["reserve_ramp_mw"] = serde_json::json!(0);
    }
    let path = dir.path().join("over.case.json");
    std::fs::write(&path, serde_json::to_string(&case).unwrap()).unwrap();
    let res = scuc(&["run", "--case", path.to_str().unwrap(), "--out", dir.path().to_str().unwrap()]);
    let stderr = String::from_utf8_lossy(&res.stderr);
    assert_eq!(code(&res), 2, "{stderr}");
}
