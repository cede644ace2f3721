//! Acceptance checks that live on the CLI surface: the verify suite's
//! runtime budget and the shipped backflow fixture.

use std::path::{Path, PathBuf};
use std::process::Command;
use std::time::Instant;

fn toa() -> Command {
    Command::new(env!("CARGO_BIN_EXE_toa"))
}

fn tmpdir(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("toa_acc_{name}_{}", std::process::id()));
    let _ = std::fs::remove_dir_all(&dir);
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

fn repo_root() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).parent().unwrap().parent().unwrap().to_path_buf()
}

#[test]
fn acceptance_11_verify_runtime_budget() {
    let dir = tmpdir("verify_quick");
    let start = Instant::now();
    let out = toa().current_dir(&dir).args(["verify", "--level", "quick"]).output().unwrap();
    let quick = start.elapsed().as_secs_f64();
    let quick_ok = out.status.success() && quick < 60.0;
    println!(
        "ACCEPTANCE 11a verify-quick: {} (exit = {:?}, {quick:.1} s, budget 60 s)",
        if quick_ok { "PASS" } else { "FAIL" },
        out.status.code()
    );
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    assert!(quick < 60.0, "quick level took {quick:.1} s");

    let start = Instant::now();
    let out = toa().current_dir(&dir).args(["verify", "--level", "full"]).output().unwrap();
    let full = start.elapsed().as_secs_f64();
    let full_ok = out.status.success() && full < 600.0;
    println!(
        "ACCEPTANCE 11b verify-full: {} (exit = {:?}, {full:.1} s, budget 600 s)",
        if full_ok { "PASS" } else { "FAIL" },
        out.status.code()
    );
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    assert!(full < 600.0, "full level took {full:.1} s");
}

#[test]
fn acceptance_09_shipped_backflow_fixture() {
    // the fixture ships with the repository; run it end to end and check
    // the flux dips negative while the arrival density never does
    let fixture = repo_root().join("fixtures/backflow.json");
    let text = std::fs::read_to_string(&fixture).expect("fixtures/backflow.json is shipped");
    let dir = tmpdir("backflow");
    let cfg = dir.join("backflow.json");
    std::fs::write(&cfg, text.replace("out_backflow", "out")).unwrap();
    let out = toa().args(["run", cfg.to_str().unwrap()]).output().unwrap();
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));

    let csv = std::fs::read_to_string(dir.join("out/arrival_00.csv")).unwrap();
    let header = csv.lines().next().unwrap();
    assert_eq!(header, "t,P_total,P_plus,P_minus,flux");
    let mut min_flux = f64::INFINITY;
    let mut min_total = f64::INFINITY;
    let mut max_minus = 0.0f64;
    for line in csv.lines().skip(1) {
        let cols: Vec<f64> = line.split(',').map(|v| v.parse().unwrap()).collect();
        min_total = min_total.min(cols[1]);
        max_minus = max_minus.max(cols[3]);
        min_flux = min_flux.min(cols[4]);
    }
    let pass = min_flux < 0.0 && min_total >= 0.0 && max_minus == 0.0;
    println!(
        "ACCEPTANCE 09 shipped-backflow-fixture: {} (min flux = {min_flux:.3e}, min density = {min_total:.3e}, plus-only = {})",
        if pass { "PASS" } else { "FAIL" },
        max_minus == 0.0
    );
    assert!(min_flux < 0.0, "no backflow in the shipped fixture");
    assert!(min_total >= 0.0);
    assert_eq!(max_minus, 0.0, "fixture must be plus-only");
}
