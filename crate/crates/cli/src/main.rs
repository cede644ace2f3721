//! `toa`: relational time-of-arrival scenarios from the command line.
//!
//! Exit codes: 0 success, 1 verify-invariant failure, 2 config/schema or
//! usage error, 3 resolution-guard failure, 4 i/o failure.

// NaN-rejecting comparisons are spelled !(a < b) on purpose
#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod config;
mod run;

use std::path::Path;
use std::process::ExitCode;

use config::{demo_config, ScenarioConfig};
use run::{run_compare, run_toa, RunError};
use toa_core::verify::{run_verify, VerifyLevel};

const USAGE: &str = "usage:
  toa run <config.json>            compute arrival densities for a scenario
  toa verify [--level quick|full]  run the invariant suite (default: quick)
  toa compare <config.json>        pairwise distances between methods
  toa export-demo-config <path>    write the canonical demo scenario

environment:
  TOA_THREADS   cap on parallel jobs (0 or unset = auto)";

fn init_threads() {
    if let Ok(v) = std::env::var("TOA_THREADS") {
        if let Ok(n) = v.trim().parse::<usize>() {
            if n > 0 {
                // ignore failure: the global pool may already exist
                let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
            }
        }
    }
}

fn usage_error(msg: &str) -> ExitCode {
    eprintln!("error: {msg}\n\n{USAGE}");
    ExitCode::from(2)
}

fn main() -> ExitCode {
    init_threads();
    let args: Vec<String> = std::env::args().skip(1).collect();
    match args.first().map(String::as_str) {
        Some("run") => {
            let [_, path] = args.as_slice() else {
                return usage_error("run takes exactly one config path");
            };
            cmd_run(Path::new(path))
        }
        Some("verify") => {
            let level = match args.len() {
                1 => VerifyLevel::Quick,
                3 if args[1] == "--level" => match args[2].parse::<VerifyLevel>() {
                    Ok(l) => l,
                    Err(e) => return usage_error(&e.to_string()),
                },
                _ => return usage_error("verify takes an optional `--level quick|full`"),
            };
            cmd_verify(level)
        }
        Some("compare") => {
            let [_, path] = args.as_slice() else {
                return usage_error("compare takes exactly one config path");
            };
            cmd_compare(Path::new(path))
        }
        Some("export-demo-config") => {
            let [_, path] = args.as_slice() else {
                return usage_error("export-demo-config takes exactly one output path");
            };
            cmd_export_demo(Path::new(path))
        }
        Some(other) => usage_error(&format!("unknown command `{other}`")),
        None => usage_error("missing command"),
    }
}

fn load_config(path: &Path) -> Result<(ScenarioConfig, std::path::PathBuf), RunError> {
    let cfg = ScenarioConfig::load(path)?;
    let base = path.parent().unwrap_or(Path::new(".")).to_path_buf();
    Ok((cfg, base))
}

fn report(e: RunError) -> ExitCode {
    eprintln!("error: {e}");
    ExitCode::from(e.exit_code() as u8)
}

fn cmd_run(path: &Path) -> ExitCode {
    let (cfg, base) = match load_config(path) {
        Ok(v) => v,
        Err(e) => return report(e),
    };
    match run_toa(&cfg, &base) {
        Ok(out) => {
            for p in &out.csv_paths {
                println!("wrote {}", p.display());
            }
            println!("wrote {}", out.manifest_path.display());
            ExitCode::SUCCESS
        }
        Err(e) => report(e),
    }
}

fn cmd_verify(level: VerifyLevel) -> ExitCode {
    let report = match run_verify(level) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: verify suite failed to run: {e}");
            return ExitCode::from(2);
        }
    };
    println!("invariant suite: level {}, {} checks", report.level.label(), report.checks.len());
    for c in &report.checks {
        let rel = match c.comparison {
            toa_core::verify::Comparison::Below => "<",
            toa_core::verify::Comparison::AtLeast => ">=",
        };
        println!(
            "  [{}] {:45} measured {:>12.4e} {} {:>9.1e}  ({})",
            if c.passed { "pass" } else { "FAIL" },
            c.id,
            c.measured,
            rel,
            c.threshold,
            c.description
        );
    }
    println!("elapsed: {:.2} s", report.elapsed_seconds);

    // machine-readable companion
    let json = serde_json::json!({
        "level": report.level.label(),
        "elapsed_seconds": report.elapsed_seconds,
        "all_passed": report.all_passed(),
        "checks": report.checks.iter().map(|c| serde_json::json!({
            "id": c.id,
            "description": c.description,
            "measured": c.measured,
            "threshold": c.threshold,
            "comparison": match c.comparison {
                toa_core::verify::Comparison::Below => "below",
                toa_core::verify::Comparison::AtLeast => "at-least",
            },
            "passed": c.passed,
        })).collect::<Vec<_>>(),
    });
    let json_path = Path::new("toa_verify_report.json");
    match std::fs::write(json_path, serde_json::to_string_pretty(&json).unwrap()) {
        Ok(()) => println!("wrote {}", json_path.display()),
        Err(e) => {
            eprintln!("error: cannot write {}: {e}", json_path.display());
            return ExitCode::from(4);
        }
    }

    if report.all_passed() {
        ExitCode::SUCCESS
    } else {
        eprintln!("failed invariants: {}", report.failed_ids().join(", "));
        ExitCode::from(1)
    }
}

fn cmd_compare(path: &Path) -> ExitCode {
    let (cfg, base) = match load_config(path) {
        Ok(v) => v,
        Err(e) => return report(e),
    };
    match run_compare(&cfg, &base) {
        Ok(out) => {
            println!("wrote {}", out.display());
            ExitCode::SUCCESS
        }
        Err(e) => report(e),
    }
}

fn cmd_export_demo(path: &Path) -> ExitCode {
    let cfg = demo_config();
    let json = serde_json::to_string_pretty(&cfg).expect("demo config serializes");
    match std::fs::write(path, json + "\n") {
        Ok(()) => {
            println!("wrote {}", path.display());
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: cannot write {}: {e}", path.display());
            ExitCode::from(4)
        }
    }
}
