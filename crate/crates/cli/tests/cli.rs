use std::path::Path;
use std::process::{Command, Output};

fn lab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fdtd-lab")).args(args).output().expect("binary runs")
}

fn arg(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn csv_column(path: &Path, name: &str) -> Vec<f64> {
    let mut reader = csv::Reader::from_path(path).unwrap();
    let col = reader.headers().unwrap().iter().position(|h| h == name).unwrap();
    reader.records().map(|r| r.unwrap()[col].parse().unwrap()).collect()
}

#[test]
fn help_exits_zero_for_every_subcommand() {
    for sub in ["dispersion-map", "optimal-dt", "run-1d", "run-cavity2d", "run-cavity3d"] {
        let out = lab(&[sub, "--help"]);
        assert!(out.status.success(), "{sub}");
        assert!(!out.stdout.is_empty());
    }
    let out = lab(&["dispersion-map", "--help"]);
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("--freq-hz") && text.contains("Hz"));
}

#[test]
fn dispersion_map_writes_csv_and_manifest() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("map.csv");
    let status = lab(&[
        "dispersion-map", "--scheme", "fdtd22", "--freq-hz", "5e9", "--dx", "6e-3", "--dim", "3", "--s-list",
        "0.5,1.0", "--grid", "5x9", "--out", arg(&out),
    ]);
    assert!(status.status.success(), "{}", String::from_utf8_lossy(&status.stderr));
    let text = std::fs::read_to_string(&out).unwrap();
    assert_eq!(text.lines().next().unwrap(), "s,theta_rad,phi_rad,k_exact,k_num,vp_ratio,nde");
    assert_eq!(text.lines().count(), 1 + 2 * 45);
    let manifest: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("map.manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest["experiment"], "dispersion-map");
    assert_eq!(manifest["config"]["mesh"]["freq_hz"], 5e9);
}

#[test]
fn magic_step_map_has_zero_error() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("magic.csv");
    let status = lab(&[
        "dispersion-map", "--scheme", "fdtd22", "--freq-hz", "5e9", "--dx", "6e-3", "--dim", "1", "--s-list", "1.0",
        "--grid", "3x5", "--out", arg(&out),
    ]);
    assert!(status.status.success());
    assert!(csv_column(&out, "nde").iter().all(|&e| e < 1e-12));
}

#[test]
fn outputs_are_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let run = |name: &str| {
        let out = dir.path().join(name);
        let status = lab(&[
            "dispersion-map", "--scheme", "fdtd24", "--freq-hz", "5e9", "--dx", "6e-3", "--s-list", "0.1:0.5:0.2",
            "--theta-deg", "90", "--grid", "2x13", "--out", arg(&out),
        ]);
        assert!(status.status.success());
        std::fs::read(out).unwrap()
    };
    assert_eq!(run("a.csv"), run("b.csv"));
}

#[test]
fn usage_errors_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("x.csv");
    let missing = lab(&["dispersion-map", "--scheme", "fdtd22", "--dx", "6e-3", "--s-list", "0.5", "--out", arg(&out)]);
    assert_eq!(missing.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&missing.stderr).contains("--freq-hz"));
    let bad_s = lab(&[
        "dispersion-map", "--scheme", "fdtd22", "--freq-hz", "5e9", "--dx", "6e-3", "--s-list", "1.5", "--out",
        arg(&out),
    ]);
    assert_eq!(bad_s.status.code(), Some(2));
}

#[test]
fn optimal_dt_rejects_fdtd22() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("opt.csv");
    let res = lab(&["optimal-dt", "--scheme", "fdtd22", "--freq-hz", "5e9", "--dx", "6e-3", "--out", arg(&out)]);
    assert_eq!(res.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&res.stderr).contains("S = 1"));
}

#[test]
fn optimal_dt_finds_interior_optimum() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("opt.csv");
    let res = lab(&[
        "optimal-dt", "--freq-hz", "5e9", "--dx", "6e-3", "--grid", "9x17", "--search-tol", "1e-3", "--out", arg(&out),
    ]);
    assert!(res.status.success(), "{}", String::from_utf8_lossy(&res.stderr));
    let stdout = String::from_utf8(res.stdout).unwrap();
    let s_opt: f64 = stdout.lines().next().unwrap().trim_start_matches("s_opt = ").parse().unwrap();
    assert!(s_opt > 0.05 && s_opt < 0.95, "{s_opt}");
    let s = csv_column(&out, "s");
    assert!(s.len() > 5 && s.windows(2).all(|w| w[0] <= w[1]));
}

#[test]
fn run_1d_writes_one_waveform_per_s() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("run1d.csv");
    let res = lab(&["run-1d", "--scheme", "fdtd22", "--s-list", "0.5,0.7,1.0", "--out", arg(&out)]);
    assert!(res.status.success(), "{}", String::from_utf8_lossy(&res.stderr));
    for s in ["0.5", "0.7", "1"] {
        let wave = dir.path().join(format!("run1d_s{s}.csv"));
        assert!(csv_column(&wave, "t_seconds").len() > 100);
    }
    let l2 = csv_column(&out, "l2");
    assert!(l2[0] > l2[1] && l2[1] > l2[2]);
}

#[test]
fn unstable_runs_exit_4() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("c3.csv");
    let res = lab(&["run-cavity3d", "--scheme", "fdtd22", "--s-list", "1.1", "--periods", "20", "--out", arg(&out)]);
    assert_eq!(res.status.code(), Some(4));
    assert!(String::from_utf8_lossy(&res.stderr).contains("S = 1.1"));
}

#[test]
fn small_cavity2d_run() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("c2.csv");
    let res = lab(&[
        "run-cavity2d", "--scheme", "fdtd24", "--pol", "tm", "--s-list", "0.5,1.0", "--delta-m", "0.1", "--periods",
        "120", "--out", arg(&out),
    ]);
    assert!(res.status.success(), "{}", String::from_utf8_lossy(&res.stderr));
    let re = csv_column(&out, "rel_error");
    assert_eq!(re.len(), 6);
    assert!(re.iter().all(|&r| r < 0.02));
    let manifest: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("c2.manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest["seed"], 20_240_601);
    assert_eq!(manifest["config"]["setup"]["delta"], 0.1);
}
