use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output, Stdio};

use ratchet_core::output::read_current_csv;

const CLASSICAL: &str = r#"
engine = "classical"
experiment = "current"
output = "tiny"
[params]
kick_strength = 7.0
asymmetry = 0.7
phase = 1.5707963267948966
gamma = 0.75
seed = 5
[protocol]
steps = 20
count = 3000
temperatures = [0.0, 0.1]
"#;

fn quantum(n_max: usize, steps: usize) -> String {
    format!(
        r#"
engine = "quantum"
experiment = "current"
output = "q"
[params]
kick_strength = 7.0
asymmetry = 0.7
phase = 1.5707963267948966
gamma = 0.75
[quantum]
hbar_eff = [1.0]
n_max = [{n_max}]
checkpoint_every = 7
[protocol]
steps = {steps}
"#
    )
}

fn ratchet(args: &[&str], out: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ratchet"))
        .args(args)
        .arg("--quiet")
        .arg("--out")
        .arg(out)
        .output()
        .expect("binary runs")
}

fn write_config(dir: &Path, name: &str, text: &str) -> PathBuf {
    let path = dir.join(name);
    fs::write(&path, text).unwrap();
    path
}

fn csv_files(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut files: Vec<_> = fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|e| e == "csv"))
        .map(|p| (p.file_name().unwrap().to_string_lossy().into_owned(), fs::read(&p).unwrap()))
        .collect();
    files.sort();
    files
}

fn manifest(dir: &Path) -> serde_json::Value {
    serde_json::from_str(&fs::read_to_string(dir.join("manifest.json")).unwrap()).unwrap()
}

#[test]
fn reruns_are_byte_identical() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), "tiny.toml", CLASSICAL);
    let cfg = cfg.to_str().unwrap();
    let (a, b) = (tmp.path().join("a"), tmp.path().join("b"));
    assert!(ratchet(&["run", cfg], &a).status.success());
    assert!(ratchet(&["--workers", "2", "run", cfg], &b).status.success());
    let (fa, fb) = (csv_files(&a.join("tiny")), csv_files(&b.join("tiny")));
    assert_eq!(fa.len(), 2);
    assert_eq!(fa, fb);
    let m = manifest(&a.join("tiny"));
    assert_eq!(m["complete"], true);
    assert_eq!(m["seed"], 5);
    assert_eq!(m["config"]["protocol"]["count"], 3000);

    let c = tmp.path().join("c");
    assert!(ratchet(&["--seed", "6", "run", cfg], &c).status.success());
    assert_ne!(csv_files(&c.join("tiny")), fa);
    assert_eq!(manifest(&c.join("tiny"))["seed"], 6);
}

#[test]
fn resumed_run_matches_uninterrupted() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), "q.toml", &quantum(60, 40));
    let cfg = cfg.to_str().unwrap();
    let (whole, split) = (tmp.path().join("whole"), tmp.path().join("split"));
    assert!(ratchet(&["run", cfg], &whole).status.success());

    let paused = ratchet(&["--period-budget", "20", "run", cfg], &split);
    assert!(paused.status.success());
    assert!(String::from_utf8_lossy(&paused.stdout).starts_with("incomplete"));
    let dir = split.join("q");
    assert_eq!(manifest(&dir)["complete"], false);
    assert!(!dir.join("current_quantum_h1_T0.csv").exists());
    let ckpt = dir.join("checkpoints/quantum_h1_T0.ckpt");
    let ckpt = ckpt.to_str().unwrap();

    assert!(ratchet(&["resume", ckpt, cfg], &split).status.success());
    assert_eq!(manifest(&dir)["complete"], true);
    let read = |d: &Path| read_current_csv(&fs::read(d.join("current_quantum_h1_T0.csv")).unwrap()[..]).unwrap();
    let (a, b) = (read(&whole.join("q")), read(&dir));
    assert_eq!(a.len(), 41);
    for (x, y) in a.entries().iter().zip(b.entries()) {
        assert_eq!(x.t, y.t);
        assert!((x.current - y.current).abs() < 1e-12);
    }

    let again = ratchet(&["resume", ckpt, cfg], &split);
    assert!(again.status.success());
    assert!(String::from_utf8_lossy(&again.stdout).starts_with("already complete"));
}

#[test]
fn checkpoint_of_another_basis_is_refused() {
    let tmp = tempfile::tempdir().unwrap();
    let small = write_config(tmp.path(), "small.toml", &quantum(60, 3));
    let large = write_config(tmp.path(), "large.toml", &quantum(64, 3));
    assert!(ratchet(&["run", small.to_str().unwrap()], tmp.path()).status.success());
    let ckpt = tmp.path().join("q/checkpoints/quantum_h1_T0.ckpt");
    let out = ratchet(&["resume", ckpt.to_str().unwrap(), large.to_str().unwrap()], tmp.path());
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("dimension 121"));
}

#[test]
fn empty_config_is_a_validation_error() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), "empty.toml", "");
    let out = ratchet(&["run", cfg.to_str().unwrap()], tmp.path());
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("missing field `engine`"));
    assert!(!tmp.path().join("tiny").exists());
}

#[test]
fn husimi_needs_the_quantum_engine() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), "h.toml", &CLASSICAL.replace("\"current\"", "\"husimi\""));
    let out = ratchet(&["validate", cfg.to_str().unwrap()], tmp.path());
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("engine: husimi"));
}

#[test]
fn basis_overflow_exits_with_numerical_failure() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), "q.toml", &quantum(4, 10));
    let out = ratchet(&["run", cfg.to_str().unwrap()], tmp.path());
    assert_eq!(out.status.code(), Some(2), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(String::from_utf8_lossy(&out.stderr).contains("basis edge"));
    assert_eq!(manifest(&tmp.path().join("q"))["complete"], false);
}

#[test]
fn output_root_falls_back_to_environment() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), "tiny.toml", &CLASSICAL.replace("count = 3000", "count = 10"));
    let status = Command::new(env!("CARGO_BIN_EXE_ratchet"))
        .args(["--quiet", "run", cfg.to_str().unwrap()])
        .env(ratchet_cli::OUT_ENV, tmp.path().join("env"))
        .stdout(Stdio::null())
        .status()
        .unwrap();
    assert!(status.success());
    assert!(tmp.path().join("env/tiny/current_classical_T0.csv").exists());
}

#[test]
fn presets_validate_from_the_command_line() {
    let tmp = tempfile::tempdir().unwrap();
    let out = ratchet(&["list-presets"], tmp.path());
    let listing = String::from_utf8_lossy(&out.stdout).into_owned();
    for name in listing.lines().map(|l| l.split_whitespace().next().unwrap()) {
        assert!(ratchet(&["validate", name], tmp.path()).status.success(), "{name}");
    }
    assert!(listing.contains("fig2-g090"));
}
