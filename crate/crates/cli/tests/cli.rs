use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn pwlab(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_pwlab")).args(args).current_dir(dir).output().expect("run pwlab")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn write(dir: &Path, name: &str, body: &str) -> String {
    fs::write(dir.join(name), body).unwrap();
    name.to_string()
}

#[test]
fn two_time_happy_path() {
    let d = tempfile::tempdir().unwrap();
    let cfg = write(d.path(), "c.json", r#"{"kind":"two-time","ensemble":{"n":20000}}"#);
    let o = pwlab(&["two-time", "--config", &cfg, "--seed", "7", "--out", "out", "--format", "json,csv,svg", "-q"], d.path());
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    assert!(o.stdout.is_empty());
    let out = d.path().join("out");
    for f in ["result.json", "manifest.json", "two_time_joint.csv", "two_time_alice.csv", "two_time_joint.svg"] {
        assert!(out.join(f).exists(), "{f}");
    }
    let csv = fs::read_to_string(out.join("two_time_joint.csv")).unwrap();
    let rows: Vec<&str> = csv.lines().skip(1).collect();
    assert_eq!(rows.len(), 8);
    let total: f64 = rows.iter().map(|r| r.split(',').nth(3).unwrap().parse::<f64>().unwrap()).sum();
    assert!((total - 1.0).abs() < 1e-12);

    let m: serde_json::Value = serde_json::from_str(&fs::read_to_string(out.join("manifest.json")).unwrap()).unwrap();
    assert_eq!(m["seed"], 7);
    assert_eq!(m["command"], "two-time");
    assert_eq!(m["all_pass"], true);
    assert_eq!(m["config_hash"].as_str().unwrap().len(), 64);
}

#[test]
fn reruns_are_byte_identical() {
    let d = tempfile::tempdir().unwrap();
    let args = |o: &'static str| vec!["bell", "--seed", "11", "--out", o, "--format", "json,csv,svg", "-q"];
    assert_eq!(code(&pwlab(&args("a"), d.path())), 0);
    assert_eq!(code(&pwlab(&args("b"), d.path())), 0);
    for f in ["result.json", "bell_tables.csv", "bell_tables.svg"] {
        let a = fs::read(d.path().join("a").join(f)).unwrap();
        let b = fs::read(d.path().join("b").join(f)).unwrap();
        assert_eq!(a, b, "{f}");
    }
    let c = pwlab(&["bell", "--seed", "12", "--out", "c", "-q"], d.path());
    assert_eq!(code(&c), 0);
    assert_ne!(fs::read(d.path().join("a/result.json")).unwrap(), fs::read(d.path().join("c/result.json")).unwrap());
}

#[test]
fn minimal_config_is_filled_in() {
    let d = tempfile::tempdir().unwrap();
    let cfg = write(d.path(), "c.json", r#"{"kind":"bell"}"#);
    assert_eq!(code(&pwlab(&["bell", "--config", &cfg, "--out", "o", "-q"], d.path())), 0);
    let v: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(d.path().join("o/result.json")).unwrap()).unwrap();
    let c = &v["config"];
    assert_eq!(c["ensemble"]["n"], 100000);
    assert_eq!(c["ensemble"]["seed"], 1);
    for k in ["x", "xp", "y", "yp"] {
        assert!(c["phases"][k].is_number(), "{k}");
    }
}

#[test]
fn duplicate_and_unknown_keys_are_usage_errors() {
    let d = tempfile::tempdir().unwrap();
    let dup = write(d.path(), "dup.json", r#"{"kind":"bell","ensemble":{"n":10,"n":20}}"#);
    let o = pwlab(&["bell", "--config", &dup], d.path());
    assert_eq!(code(&o), 2);
    assert!(String::from_utf8_lossy(&o.stderr).contains("duplicate"));
    let unk = write(d.path(), "unk.json", r#"{"kind":"bell","phases":{"z":1}}"#);
    assert_eq!(code(&pwlab(&["bell", "--config", &unk], d.path())), 2);
    assert_eq!(code(&pwlab(&["bell", "--config", "missing.json"], d.path())), 2);
    let other = write(d.path(), "semi.json", r#"{"kind":"semi"}"#);
    assert_eq!(code(&pwlab(&["bell", "--config", &other], d.path())), 2);
    assert_eq!(code(&pwlab(&["bell", "--format", "png"], d.path())), 2);
}

#[test]
fn narrow_packet_is_a_physics_error() {
    let d = tempfile::tempdir().unwrap();
    let cfg = write(
        d.path(),
        "c.json",
        r#"{"kind":"semi","grid":{"points":2048,"extent":400},
            "packets":[{"center":-8,"momentum":4,"sigma":0.15},{"center":8,"momentum":-4,"sigma":0.15}]}"#,
    );
    let o = pwlab(&["semi", "--config", &cfg], d.path());
    assert_eq!(code(&o), 3);
    assert!(String::from_utf8_lossy(&o.stderr).contains("too narrow"));
}

#[test]
fn unknown_subcommand_prints_usage() {
    let d = tempfile::tempdir().unwrap();
    let o = pwlab(&["teleport"], d.path());
    assert_eq!(code(&o), 2);
    assert!(String::from_utf8_lossy(&o.stderr).contains("Usage"));
}

#[test]
fn broken_tolerance_fails_the_check() {
    let d = tempfile::tempdir().unwrap();
    let o = pwlab(&["check", "--tol-scale", "0", "--samples", "300", "--out", "chk"], d.path());
    assert_eq!(code(&o), 4, "{}", String::from_utf8_lossy(&o.stdout));
    assert!(String::from_utf8_lossy(&o.stdout).contains("FAIL"));
    let m: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(d.path().join("chk/manifest.json")).unwrap()).unwrap();
    assert_eq!(m["all_pass"], false);
}

#[test]
fn thread_count_from_environment() {
    let d = tempfile::tempdir().unwrap();
    let o = Command::new(env!("CARGO_BIN_EXE_pwlab"))
        .args(["two-time", "--out", "o", "-q"])
        .env("PWLAB_THREADS", "2")
        .current_dir(d.path())
        .output()
        .unwrap();
    assert_eq!(code(&o), 0);
    let o = pwlab(&["two-time", "--threads", "many"], d.path());
    assert_eq!(code(&o), 2);
}
