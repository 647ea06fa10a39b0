use std::path::Path;
use std::process::{Command, Output};

fn relgas(args: &[&str], cfg: Option<&str>, dir: &Path) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_relgas"));
    cmd.args(args).arg("--out").arg(dir.join("out"));
    if let Some(text) = cfg {
        let p = dir.join("run.cfg");
        std::fs::write(&p, text).unwrap();
        cmd.arg("--config").arg(p);
    }
    cmd.output().expect("binary runs")
}

fn read(dir: &Path, name: &str) -> String {
    std::fs::read_to_string(dir.join("out").join(name)).unwrap()
}

#[test]
fn unknown_key_is_rejected_by_name() {
    let dir = tempfile::tempdir().unwrap();
    let out = relgas(&["simulate"], Some("n = 50\ncfl_number = 0.3\n"), dir.path());
    assert_eq!(out.status.code(), Some(1));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("cfl_number"), "{err}");
    assert!(err.contains("line 2"), "{err}");
}

#[test]
fn bad_arguments_exit_1_and_help_exits_0() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(relgas(&["integrate"], None, dir.path()).status.code(), Some(1));
    assert_eq!(
        relgas(&["simulate", "--threads", "many"], None, dir.path())
            .status
            .code(),
        Some(1)
    );
    assert_eq!(relgas(&["--help"], None, dir.path()).status.code(), Some(0));
    let missing = relgas(&["simulate", "--config", "/nonexistent/run.cfg"], None, dir.path());
    assert_eq!(missing.status.code(), Some(1));
}

#[test]
fn zero_el_tolerance_fails_verification() {
    let dir = tempfile::tempdir().unwrap();
    let out = relgas(&["verify-el"], Some("el_tol = 0\nel_samples = 50\n"), dir.path());
    assert_eq!(out.status.code(), Some(3));
    let report: serde_json::Value = serde_json::from_str(&read(dir.path(), "el_report.json")).unwrap();
    assert_eq!(report["passed"], false);
    assert!(report["config_hash"].as_str().unwrap().len() == 16);
}

#[test]
fn superluminal_run_trips_the_guard() {
    let dir = tempfile::tempdir().unwrap();
    let out = relgas(
        &["simulate"],
        Some("ic_amplitude = 0.95\nn = 100\nt_end = 3\n"),
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(2));
    let summary: serde_json::Value = serde_json::from_str(&read(dir.path(), "summary.json")).unwrap();
    assert_eq!(summary["status"], "guard");
    assert!(summary["failure"].as_str().unwrap().contains("superluminal"));
    // the accepted part of the run is still written
    assert!(read(dir.path(), "snapshots.csv").lines().count() > 1);
}

#[test]
fn rest_run_keeps_every_charge_and_zero_velocity() {
    let dir = tempfile::tempdir().unwrap();
    let out = relgas(&["simulate"], Some("ic = rest\nn = 40\nt_end = 0.5\n"), dir.path());
    assert_eq!(out.status.code(), Some(0));
    let snaps = read(dir.path(), "snapshots.csv");
    let mut lines = snaps.lines();
    assert_eq!(lines.next().unwrap(), "t,xi,phi,phi_t,phi_xi,m,v");
    for l in lines {
        assert_eq!(l.rsplit(',').next().unwrap().parse::<f64>().unwrap(), 0.0);
    }
    let summary: serde_json::Value = serde_json::from_str(&read(dir.path(), "summary.json")).unwrap();
    for law in summary["laws"].as_array().unwrap() {
        let a = law["initial_charge"].as_f64().unwrap();
        let b = law["final_charge"].as_f64().unwrap();
        assert!((a - b).abs() <= 1e-12, "{law}");
    }
}

#[test]
fn diagnostics_has_one_row_per_snapshot_and_law() {
    let dir = tempfile::tempdir().unwrap();
    let out = relgas(
        &["simulate"],
        Some("n = 40\nt_end = 0.2\nsnapshot_stride = 2\n"),
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(0));
    let summary: serde_json::Value = serde_json::from_str(&read(dir.path(), "summary.json")).unwrap();
    let snapshots = summary["snapshots"].as_u64().unwrap() as usize;
    let laws = summary["laws"].as_array().unwrap().len();
    // constant entropy on a periodic grid: T1, T2, T3, T5
    assert_eq!(laws, 4);
    let diag = read(dir.path(), "diagnostics.csv");
    assert_eq!(
        diag.lines().next().unwrap(),
        "t,law,charge,balance_residual,max_div_residual"
    );
    assert_eq!(diag.lines().count() - 1, snapshots * laws);
}

#[test]
fn every_command_writes_its_reports() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = "entropy = exponential\nentropy_q = 0.5\nboundary = wall\nbase_stretch = hydrostatic\nn = 60\nt_end = 0.3\nnoether_samples = 200\nel_samples = 100\n";
    let cases: [(&str, &[&str]); 5] = [
        ("check-noether", &["noether.csv", "noether.json"]),
        ("classify-entropy", &["classification.json"]),
        ("diagnose", &["convergence.csv", "diagnose.json"]),
        ("to-euler", &["eulerian.csv", "euler_residuals.json"]),
        ("verify-el", &["el_report.json"]),
    ];
    for (cmd, files) in cases {
        let out = relgas(&[cmd, "--seed", "4"], Some(cfg), dir.path());
        assert_eq!(
            out.status.code(),
            Some(0),
            "{cmd}: {}",
            String::from_utf8_lossy(&out.stderr)
        );
        for f in files {
            let text = read(dir.path(), f);
            if f.ends_with(".json") {
                let v: serde_json::Value = serde_json::from_str(&text).unwrap();
                assert!(v["config_hash"].is_string(), "{cmd} {f}");
            } else {
                assert!(text.lines().next().unwrap().contains(','), "{cmd} {f}");
            }
        }
    }
    let class: serde_json::Value = serde_json::from_str(&read(dir.path(), "classification.json")).unwrap();
    assert_eq!(class["result"]["family"]["family"], "exponential");
    let euler = read(dir.path(), "eulerian.csv");
    assert!(
        euler.starts_with("t,x,v,m,n,S,T1_t,T1_x,T2_t,T2_x,T3_t,T3_x"),
        "{}",
        euler.lines().next().unwrap()
    );
}
