use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use shiftlab::families::fig2::build_fig2_family;
use shiftlab::{AtomicMeasure1D, LatticeWindow, WeightDiagram};
use tempfile::TempDir;

fn shiftlab(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_shiftlab")).current_dir(dir).args(args).output().unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

fn report(dir: &Path, name: &str) -> Value {
    serde_json::from_str(&std::fs::read_to_string(dir.join(name)).unwrap()).unwrap()
}

fn built(dir: &TempDir, name: &str, args: &[&str]) -> PathBuf {
    let mut all = vec!["build", "--out", name];
    all.extend_from_slice(args);
    let o = shiftlab(dir.path(), &all);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    dir.path().join(name)
}

#[test]
fn build_round_trip_is_exact() {
    let dir = TempDir::new().unwrap();
    let path = built(&dir, "d.json", &["--family", "fig2", "--x0", "0.9", "--a", "0.5", "--xi", "0.5@1,0.5@2"]);
    let parsed: WeightDiagram = serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap();
    let direct = build_fig2_family(0.9, 0.5, &"0.5@1,0.5@2".parse::<AtomicMeasure1D>().unwrap()).unwrap();
    let w = LatticeWindow::new(9, 9);
    assert_eq!(parsed.window_values(w), direct.window_values(w));
    assert_eq!(parsed, direct);
}

#[test]
fn build_reports_and_errors() {
    let dir = TempDir::new().unwrap();
    let o = shiftlab(dir.path(), &["build", "--family", "da", "--out", "da.json", "--report", "r.json"]);
    assert_eq!(code(&o), 0);
    let r = report(dir.path(), "r.json");
    assert_eq!(r["command"], "build");
    for key in ["inputs", "verdicts", "diagnostics"] {
        assert!(r.get(key).is_some(), "{key}");
    }
    assert_eq!(code(&shiftlab(dir.path(), &["build", "--family", "fig2", "--x0", "0.9"])), 1);
    assert_eq!(code(&shiftlab(dir.path(), &["build", "--family", "tensor", "--sigma", "0,1", "--tau", "1"])), 1);
    assert_eq!(code(&shiftlab(dir.path(), &["build", "--family", "nope"])), 1);
}

#[test]
fn check_flat_is_certifying() {
    let dir = TempDir::new().unwrap();
    built(&dir, "flat.json", &["--family", "tensor", "--sigma", "1", "--tau", "1"]);
    let o = shiftlab(dir.path(), &["check", "--k", "1", "--in", "flat.json", "--window", "4x4", "--report", "r.json"]);
    assert_eq!(code(&o), 0);
    let r = report(dir.path(), "r.json");
    let v = r["verdicts"].as_array().unwrap().iter().find(|v| v["name"] == "1-hyponormal").unwrap();
    assert_eq!(v["detail"]["status"], "certifying");
    assert_eq!(v["detail"]["per_u"].as_array().unwrap().len(), 16);
}

#[test]
fn transformed_da_is_not_hyponormal() {
    let dir = TempDir::new().unwrap();
    built(&dir, "da.json", &["--family", "da"]);
    for kind in ["toral", "spherical"] {
        let out = format!("{kind}.json");
        let t = shiftlab(dir.path(), &["transform", "--kind", kind, "--in", "da.json", "--out", &out, "--window", "5x5"]);
        assert_eq!(code(&t), 0, "{}", String::from_utf8_lossy(&t.stdout));
        let c = shiftlab(dir.path(), &["check", "--k", "1", "--in", &out, "--window", "5x5"]);
        assert_eq!(code(&c), 2, "{kind}");
        let r: Value = serde_json::from_slice(&c.stdout).unwrap();
        let v = r["verdicts"].as_array().unwrap().iter().find(|v| v["name"] == "1-hyponormal").unwrap();
        assert_eq!(v["detail"]["status"], "window-limited");
    }
}

#[test]
fn malformed_json_names_the_path() {
    let dir = TempDir::new().unwrap();
    let bad = r#"{"kind":"tensor","params":{"sigma":{"head":[],"tail":{"constant":"x"}},"tau":1}}"#;
    std::fs::write(dir.path().join("bad.json"), bad).unwrap();
    let o = shiftlab(dir.path(), &["check", "--in", "bad.json"]);
    assert_eq!(code(&o), 1);
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("params.sigma.tail.constant"), "{err}");
    assert_eq!(code(&shiftlab(dir.path(), &["check", "--in", "missing.json"])), 1);
    assert_eq!(code(&shiftlab(dir.path(), &["spectra", "--in", "bad.json"])), 1);
    assert_eq!(code(&shiftlab(dir.path(), &["probe", "--in", "bad.json"])), 1);
    assert_eq!(code(&shiftlab(dir.path(), &["transform", "--kind", "toral", "--in", "bad.json"])), 1);
}

#[test]
fn region_csv_rows() {
    let dir = TempDir::new().unwrap();
    let o = shiftlab(dir.path(), &["region", "--curve", "example46", "--ygrid", "0:1:0.01", "--csv", "out.csv"]);
    assert_eq!(code(&o), 0);
    let csv = std::fs::read_to_string(dir.path().join("out.csv")).unwrap();
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines[0], "y,s,h,CA,PA");
    assert_eq!(lines.len(), 101);
    assert!(lines[100].starts_with("0.99"));
    let o = shiftlab(dir.path(), &["region", "--curve", "example46", "--ygrid", "0:1:0.001", "--csv", "fine.csv"]);
    assert_eq!(code(&o), 0);
    assert_eq!(std::fs::read_to_string(dir.path().join("fine.csv")).unwrap().lines().count(), 1001);
    assert_eq!(code(&shiftlab(dir.path(), &["region", "--curve", "example46", "--ygrid", "0:2:0.5"])), 1);
    assert_eq!(code(&shiftlab(dir.path(), &["region", "--curve", "example46", "--ygrid", "1:0:0.1"])), 1);
}

#[test]
fn da_verify_flags_the_spherical_formula() {
    let dir = TempDir::new().unwrap();
    let o = shiftlab(dir.path(), &["da-verify", "--nmax", "20", "--report", "da.json"]);
    assert_eq!(code(&o), 2);
    let r = report(dir.path(), "da.json");
    let failing: Vec<&str> = r["verdicts"]
        .as_array()
        .unwrap()
        .iter()
        .filter(|v| v["holds"] == false)
        .map(|v| v["name"].as_str().unwrap())
        .collect();
    assert_eq!(failing, ["spherical gap formula"]);
    assert_eq!(code(&shiftlab(dir.path(), &["da-verify", "--nmax", "0"])), 1);
}

#[test]
fn spectra_exit_codes() {
    let dir = TempDir::new().unwrap();
    built(&dir, "t.json", &["--family", "tensor", "--sigma", "0.6,0.8", "--tau", "0.3,0.5,0.9,1.2"]);
    let o = shiftlab(dir.path(), &["spectra", "--in", "t.json"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stdout));
    let r: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(r["verdicts"][0]["detail"]["original"]["r1"], 0.8);
    built(&dir, "da.json", &["--family", "da"]);
    assert_eq!(code(&shiftlab(dir.path(), &["spectra", "--in", "da.json"])), 1);
}

#[test]
fn quasinormal_exit_codes() {
    let dir = TempDir::new().unwrap();
    let o = shiftlab(dir.path(), &["quasinormal", "--row", "0.3,0.6", "--out", "q.json", "--report", "r.json"]);
    assert_eq!(code(&o), 0);
    let r = report(dir.path(), "r.json");
    assert!(r["verdicts"].as_array().unwrap().iter().all(|v| v["holds"] == true));
    // not a subnormal row: the weights stay in range on the validated window
    // but the moment matrices are not PSD
    let o = shiftlab(dir.path(), &["quasinormal", "--row", "0.1,0.75,0.9", "--out", "q2.json", "--report", "r2.json"]);
    assert_eq!(code(&o), 2);
    // weights leave (0, C): no diagram
    assert_eq!(code(&shiftlab(dir.path(), &["quasinormal", "--row", "0.6,0.3"])), 1);
    assert_eq!(code(&shiftlab(dir.path(), &["quasinormal", "--row", "0.3,1.2"])), 1);
}

#[test]
fn probe_echoes_seed_and_is_deterministic() {
    let dir = TempDir::new().unwrap();
    built(&dir, "da.json", &["--family", "da"]);
    let run = || shiftlab(dir.path(), &["probe", "--in", "da.json", "--seed", "17", "--eps", "0.1,0.01,0.001"]);
    let (a, b) = (run(), run());
    assert_eq!(code(&a), 0);
    assert_eq!(a.stdout, b.stdout);
    let r: Value = serde_json::from_slice(&a.stdout).unwrap();
    assert_eq!(r["inputs"]["seed"], 17);
    assert_eq!(code(&shiftlab(dir.path(), &["probe", "--in", "da.json", "--eps", "1.5"])), 1);
    // increasing sizes make the gaps grow
    let o = shiftlab(dir.path(), &["probe", "--in", "da.json", "--eps", "0.001,0.1"]);
    assert_eq!(code(&o), 2);
}

#[test]
fn usage_errors_exit_one() {
    let dir = TempDir::new().unwrap();
    assert_eq!(code(&shiftlab(dir.path(), &[])), 1);
    assert_eq!(code(&shiftlab(dir.path(), &["frobnicate"])), 1);
    assert_eq!(code(&shiftlab(dir.path(), &["check", "--bogus"])), 1);
    assert_eq!(code(&shiftlab(dir.path(), &["--help"])), 0);
}
