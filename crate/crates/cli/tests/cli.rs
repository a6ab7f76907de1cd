//! Exit codes, artifacts and determinism of the `cpdq-lab` binary.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use cpdq_lab::{EXIT_CHECK, EXIT_COMPUTE, EXIT_CONFIG, EXIT_OK};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_cpdq-lab"))
}

fn scenario(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../scenarios").join(name)
}

fn out_dir(tag: &str) -> PathBuf {
    let d = std::env::temp_dir().join(format!("cpdq-lab-it-{}-{tag}", std::process::id()));
    let _ = std::fs::remove_dir_all(&d);
    d
}

fn run(config: &Path, out: &Path) -> Output {
    bin().arg("run").arg(config).arg("--out").arg(out).output().unwrap()
}

fn write_config(tag: &str, text: &str) -> PathBuf {
    let dir = out_dir(&format!("{tag}-cfg"));
    std::fs::create_dir_all(&dir).unwrap();
    let p = dir.join("config.json");
    std::fs::write(&p, text).unwrap();
    p
}

#[test]
fn harmonic_pzie_passes() {
    let out = out_dir("pzie");
    let o = run(&scenario("harmonic_pzie.json"), &out);
    assert_eq!(o.status.code(), Some(EXIT_OK), "{}", String::from_utf8_lossy(&o.stdout));
    let report: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(out.join("report.json")).unwrap()).unwrap();
    let pzie = report["checks"]
        .as_array()
        .unwrap()
        .iter()
        .find(|c| c["name"] == "pzie_abs_bits")
        .unwrap();
    assert_eq!(pzie["passed"], true);
    assert_eq!(report["passed"], true);
    for f in ["trajectory.csv", "ledger.csv", "timing.json"] {
        assert!(out.join(f).exists(), "{f}");
    }
}

#[test]
fn bad_schema_names_the_key() {
    let o = run(&scenario("bad_schema.json"), &out_dir("bad"));
    assert_eq!(o.status.code(), Some(EXIT_CONFIG));
    assert!(String::from_utf8_lossy(&o.stderr).contains("timestep"));
}

#[test]
fn syntax_error_and_missing_file_exit_2() {
    let p = write_config("syntax", "{\"kind\": \"bounds\",");
    assert_eq!(run(&p, &out_dir("syntax")).status.code(), Some(EXIT_CONFIG));
    let o = run(Path::new("/nonexistent/config.json"), &out_dir("missing"));
    assert_eq!(o.status.code(), Some(EXIT_CONFIG));
}

#[test]
fn computation_error_exits_1() {
    // wall faster than the particle
    let p = write_config(
        "compute",
        r#"{"kind": "piston", "params": {"l0": 1, "l_end": 2, "ratio": 1.5, "v0": 1}}"#,
    );
    let o = run(&p, &out_dir("compute"));
    assert_eq!(
        o.status.code(),
        Some(EXIT_COMPUTE),
        "{}",
        String::from_utf8_lossy(&o.stderr)
    );
}

#[test]
fn failed_check_exits_3() {
    let p = write_config(
        "check",
        r#"{"kind": "regime", "params": {"metrics": {"mean_abs_d_i": 0.5, "max_step_d_i_q": 0.01, "max_step_d_i_p": 0.01},
            "expect": "quantum_mechanics"}}"#,
    );
    let out = out_dir("check");
    assert_eq!(run(&p, &out).status.code(), Some(EXIT_CHECK));
    assert!(out.join("report.json").exists());
}

#[test]
fn piston_scan_writes_monotone_csv() {
    let out = out_dir("scan");
    let o = run(&scenario("piston_scan.json"), &out);
    assert_eq!(o.status.code(), Some(EXIT_OK), "{}", String::from_utf8_lossy(&o.stdout));
    let csv = std::fs::read_to_string(out.join("scan.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("ratio,delta_ln_pL,delta_S_over_k"));
    let rows: Vec<Vec<f64>> = lines
        .map(|l| l.split(',').map(|v| v.parse().unwrap()).collect())
        .collect();
    assert_eq!(rows.len(), 14);
    for w in rows.windows(2) {
        assert!(w[1][0] > w[0][0]);
        assert!(w[1][1].abs() >= w[0][1].abs());
    }
    assert!(String::from_utf8_lossy(&o.stdout).contains("scan_monotone"));
}

#[test]
fn reports_are_byte_identical() {
    let (a, b) = (out_dir("det-a"), out_dir("det-b"));
    for name in ["piston_scan.json", "harmonic_levels.json"] {
        run(&scenario(name), &a);
        run(&scenario(name), &b);
        let ra = std::fs::read(a.join("report.json")).unwrap();
        assert_eq!(ra, std::fs::read(b.join("report.json")).unwrap(), "{name}");
        for csv in ["scan.csv", "state_0.csv"] {
            if a.join(csv).exists() {
                assert_eq!(std::fs::read(a.join(csv)).unwrap(), std::fs::read(b.join(csv)).unwrap());
            }
        }
    }
}

#[test]
fn every_bundled_scenario_behaves() {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../scenarios");
    let mut names: Vec<_> = std::fs::read_dir(&dir).unwrap().map(|e| e.unwrap().path()).collect();
    names.sort();
    assert!(names.len() >= 10);
    for p in names {
        let expect = if p.ends_with("bad_schema.json") {
            EXIT_CONFIG
        } else {
            EXIT_OK
        };
        let o = run(&p, &out_dir("all").join(p.file_stem().unwrap()));
        assert_eq!(
            o.status.code(),
            Some(expect),
            "{}: {}",
            p.display(),
            String::from_utf8_lossy(&o.stdout)
        );
    }
}

#[test]
fn schema_lists_kinds() {
    let o = bin().arg("schema").output().unwrap();
    assert_eq!(o.status.code(), Some(EXIT_OK));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    let text = v.to_string();
    assert!(text.contains("additionalProperties") && text.contains("n_steps") && text.contains("sudden_jump"));
}

#[test]
fn thread_cap_is_honoured_and_validated() {
    let o = bin()
        .args(["suite", "--filter", "C10"])
        .env("CPDQ_LAB_THREADS", "1")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(EXIT_OK));
    let o = bin()
        .args(["suite", "--filter", "C10"])
        .env("CPDQ_LAB_THREADS", "zero")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(EXIT_CONFIG));
}

#[test]
fn suite_writes_summary() {
    let out = out_dir("suite");
    let o = bin()
        .args(["suite", "--filter", "info", "--out"])
        .arg(&out)
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(EXIT_OK));
    let stdout = String::from_utf8_lossy(&o.stdout);
    assert_eq!(stdout.lines().filter(|l| l.contains(" PASS ")).count(), 3);
    assert!(out.join("suite.json").exists() && out.join("suite.txt").exists());
}
