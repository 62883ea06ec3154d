//! End-to-end tests of the binary: exit codes, config handling, output
//! shapes.

use std::path::PathBuf;
use std::process::Command;

fn bin() -> &'static str {
    env!("CARGO_BIN_EXE_triradical")
}

fn tmp_dir(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("triradical_cli_{}_{name}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

#[test]
fn unknown_config_key_exits_one() {
    let out = Command::new(bin())
        .args(["scan", "--set", "params.nope=1"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("unknown key"), "stderr: {stderr}");
}

#[test]
fn invalid_value_exits_one_naming_the_field() {
    let dir = tmp_dir("badcfg");
    let cfg = dir.join("run.cfg");
    std::fs::write(&cfg, "params.k = -3\n").unwrap();
    let out = Command::new(bin())
        .args(["scan", "--config", cfg.to_str().unwrap()])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("decay rate k"), "stderr: {stderr}");
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn malformed_line_exits_one_with_location() {
    let dir = tmp_dir("badline");
    let cfg = dir.join("run.cfg");
    std::fs::write(&cfg, "grid.n_theta = 8\nthis is not a key value pair\n").unwrap();
    let out = Command::new(bin())
        .args(["scan", "--config", cfg.to_str().unwrap()])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("run.cfg:2"), "stderr: {stderr}");
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn config_file_and_overrides_compose() {
    let dir = tmp_dir("compose");
    let cfg = dir.join("run.cfg");
    std::fs::write(
        &cfg,
        "# comment line\ngrid.n_theta = 4\ngrid.n_phi = 3\neps_tail = 1e-4\n",
    )
    .unwrap();
    let out = Command::new(bin())
        .args([
            "scan",
            "--config",
            cfg.to_str().unwrap(),
            "--set",
            "init.bloch_z=0.5",
            "--out",
            dir.to_str().unwrap(),
        ])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let csv = std::fs::read_to_string(dir.join("scan.csv")).unwrap();
    assert!(csv.starts_with("# config_hash="));
    // Header plus 12 grid rows.
    assert_eq!(csv.lines().count(), 2 + 12);
    let summary = std::fs::read_to_string(dir.join("scan_summary.csv")).unwrap();
    assert!(summary.lines().nth(1).unwrap().starts_with("delta"));
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn scan_flags_extremal_rows() {
    let dir = tmp_dir("flags");
    let out = Command::new(bin())
        .args([
            "scan",
            "--set",
            "grid.n_theta=4",
            "--set",
            "grid.n_phi=3",
            "--set",
            "eps_tail=1e-4",
            "--set",
            "init.bloch_z=0.9",
            "--out",
            dir.to_str().unwrap(),
        ])
        .output()
        .unwrap();
    assert!(out.status.success());
    let csv = std::fs::read_to_string(dir.join("scan.csv")).unwrap();
    assert_eq!(csv.matches(",max").count(), 1);
    assert_eq!(csv.matches(",min").count(), 1);
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn verify_small_run_passes_and_writes_summary() {
    let dir = tmp_dir("verify");
    let out = Command::new(bin())
        .args([
            "verify",
            "--set",
            "verify.samples=5",
            "--set",
            "verify.angles=12",
            "--out",
            dir.to_str().unwrap(),
        ])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let summary = std::fs::read_to_string(dir.join("verify_summary.txt")).unwrap();
    assert!(summary.contains("zeeman_commutant_family"));
    assert!(summary.contains("generator_commutant_nonmixed"));
    assert!(!summary.contains("FAIL"));
    // The angle override propagates into the reverse-direction sample count.
    assert!(summary.contains("generator_commutant_mixed 12"), "summary: {summary}");
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn yields_writes_observables_and_trajectory() {
    let dir = tmp_dir("yields");
    let out = Command::new(bin())
        .args([
            "yields",
            "--set",
            "eps_tail=1e-3",
            "--set",
            "n_sub=2",
            "--set",
            "trajectory=true",
            "--set",
            "init.bloch_z=0.6",
            "--out",
            dir.to_str().unwrap(),
        ])
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let yields = std::fs::read_to_string(dir.join("yields.csv")).unwrap();
    assert!(yields.contains("phi_singlet,"));
    assert!(yields.contains("phi_singlet_quadrature,"));
    assert!(yields.contains("c1star_yield,"));
    let traj = std::fs::read_to_string(dir.join("trajectory.csv")).unwrap();
    assert!(traj.lines().nth(1).unwrap().starts_with("t,trace,"));
    assert!(traj.lines().count() > 10);
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn serial_and_parallel_runs_are_byte_identical() {
    let dirs = [tmp_dir("t1"), tmp_dir("t2")];
    for (dir, threads) in dirs.iter().zip(["1", "2"]) {
        let out = Command::new(bin())
            .args([
                "scan",
                "--set",
                "grid.n_theta=4",
                "--set",
                "grid.n_phi=3",
                "--set",
                "eps_tail=1e-4",
                "--threads",
                threads,
                "--out",
                dir.to_str().unwrap(),
            ])
            .output()
            .unwrap();
        assert!(out.status.success());
    }
    let a = std::fs::read(dirs[0].join("scan.csv")).unwrap();
    let b = std::fs::read(dirs[1].join("scan.csv")).unwrap();
    assert_eq!(a, b, "thread count must not change the output bytes");
    for d in dirs.iter() {
        std::fs::remove_dir_all(d).ok();
    }
}

#[test]
fn sweep_reference_row_is_first() {
    let dir = tmp_dir("sweepref");
    let out = Command::new(bin())
        .args([
            "sweep",
            "--set",
            "sweep.n_states=2",
            "--set",
            "grid.n_theta=4",
            "--set",
            "grid.n_phi=3",
            "--set",
            "eps_tail=1e-4",
            "--set",
            "svg=false",
            "--out",
            dir.to_str().unwrap(),
        ])
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let csv = std::fs::read_to_string(dir.join("sweep.csv")).unwrap();
    let first_row = csv.lines().nth(2).unwrap();
    assert!(first_row.starts_with("0,reference,"));
    assert!(!dir.join("sweep.svg").exists());
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn sweep_svg_carries_provenance_header() {
    let dir = tmp_dir("sweepsvg");
    let out = Command::new(bin())
        .args([
            "sweep",
            "--set",
            "sweep.n_states=1",
            "--set",
            "grid.n_theta=4",
            "--set",
            "grid.n_phi=3",
            "--set",
            "eps_tail=1e-4",
            "--out",
            dir.to_str().unwrap(),
        ])
        .output()
        .unwrap();
    assert!(out.status.success());
    let svg = std::fs::read_to_string(dir.join("sweep.svg")).unwrap();
    assert!(svg.starts_with("<!-- config_hash="), "svg head: {}", &svg[..60]);
    std::fs::remove_dir_all(&dir).ok();
}
