//! The twelve acceptance criteria at their pinned tolerances, one line each,
//! followed by the harness self-tests. Runs without libtest so the lines are
//! always printed.

use std::process::{Command, ExitCode};

use cpdq_lab::{criteria, run_suite, EXIT_CHECK};

fn tightening_fails_exactly_one_row() -> Result<(), String> {
    let out = Command::new(env!("CARGO_BIN_EXE_cpdq-lab"))
        .args(["suite", "--filter", "thermo", "--tighten", "C07/slow_delta_ln_pl"])
        .output()
        .map_err(|e| e.to_string())?;
    let stdout = String::from_utf8_lossy(&out.stdout);
    if out.status.code() != Some(EXIT_CHECK) {
        return Err(format!("exit {:?}, expected {EXIT_CHECK}", out.status.code()));
    }
    let fail_rows: Vec<&str> = stdout.lines().filter(|l| l.ends_with("FAIL")).collect();
    match fail_rows.as_slice() {
        [row] if row.starts_with("C07") && row.contains("slow_delta_ln_pl") => {}
        rows => return Err(format!("failing rows {rows:?}")),
    }
    if !stdout.contains("failing: C07/slow_delta_ln_pl") || !stdout.contains("C08 PASS") {
        return Err("summary does not identify the row".into());
    }
    Ok(())
}

fn quantum_filter() -> Result<(), String> {
    let s = run_suite(Some("quantum"), None, None).map_err(|e| e.to_string())?;
    let ids: Vec<&str> = s.rows.iter().map(|r| r.id.as_str()).collect();
    if ids != ["C03", "C04", "C05", "C06", "C11"] {
        return Err(format!("selected {ids:?}"));
    }
    if !s.passed {
        return Err("quantum criteria failed".into());
    }
    Ok(())
}

fn main() -> ExitCode {
    let mut ok = true;
    let summary = match run_suite(None, None, None) {
        Ok(s) => s,
        Err(e) => {
            println!("suite did not run: {e}");
            return ExitCode::FAILURE;
        }
    };
    println!("acceptance: {} criteria", summary.rows.len());
    for row in &summary.rows {
        println!("{}", row.line());
    }
    if summary.rows.len() != criteria().len() || !summary.passed {
        ok = false;
        print!("{}", summary.table());
    }

    for (name, f) in [
        (
            "self-test tighten one tolerance",
            tightening_fails_exactly_one_row as fn() -> Result<(), String>,
        ),
        ("self-test filter quantum", quantum_filter),
    ] {
        match f() {
            Ok(()) => println!("PASS {name}"),
            Err(e) => {
                ok = false;
                println!("FAIL {name}: {e}");
            }
        }
    }
    if ok {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
