use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn poppe(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_poppe")).args(args).output().unwrap()
}

fn out_dir(name: &str) -> PathBuf {
    let dir = Path::new(env!("CARGO_TARGET_TMPDIR")).join("cli").join(name);
    let _ = fs::remove_dir_all(&dir);
    dir
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn violations(o: &Output) -> Vec<String> {
    stderr(o).lines().skip(1).map(|l| l.trim().to_string()).collect()
}

#[test]
fn presets_validate_cleanly() {
    for eq in ["kdv", "nls", "spde"] {
        let o = poppe(&["validate", eq, "--preset", "paper"]);
        assert!(o.status.success(), "{eq}: {}", stderr(&o));
    }
    for eq in ["smol-const", "smol-general", "prelaplace", "burgers", "quotient", "elliptic"] {
        assert!(poppe(&["validate", eq]).status.success(), "{eq}");
    }
}

#[test]
fn single_precondition_violations() {
    let o = poppe(&["validate", "kdv", "--grid-n", "200"]);
    assert_eq!(o.status.code(), Some(1));
    let v = violations(&o);
    assert_eq!(v.len(), 1);
    assert!(v[0].contains("power of two"), "{v:?}");
    let o = poppe(&["validate", "nls", "--dt", "-0.01"]);
    assert_eq!(o.status.code(), Some(1));
    assert_eq!(violations(&o).len(), 1);
    let o = poppe(&["run", "spde", "--grid-n", "24", "--out", out_dir("bad").to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(!out_dir("bad").exists());
}

#[test]
fn every_violation_is_listed() {
    let o = poppe(&["validate", "kdv", "--grid-n", "100", "--dt", "-1", "--quadrature", "simpson", "--profile", "box"]);
    assert_eq!(violations(&o).len(), 4, "{}", stderr(&o));
    let o = poppe(&["validate", "burgers", "--preset", "paper"]);
    assert!(stderr(&o).contains("preset"));
}

#[test]
fn linear_burgers_table_and_sidecar() {
    let dir = out_dir("burgers");
    let o = poppe(&["run", "burgers", "--profile", "linear", "--t-final", "1", "--out", dir.to_str().unwrap()]);
    assert!(o.status.success(), "{}", stderr(&o));
    let text = fs::read_to_string(dir.join("burgers_field.csv")).unwrap();
    let mut lines = text.lines();
    let hash = lines.next().unwrap().strip_prefix("# config_hash=").unwrap().to_string();
    assert_eq!(hash.len(), 64);
    assert_eq!(lines.next(), Some("x,t,value,flagged"));
    for line in lines {
        let v: Vec<f64> = line.split(',').map(|s| s.parse().unwrap()).collect();
        assert!((v[2] - v[0] / (1.0 + v[1])).abs() < 1e-13);
    }
    let meta = fs::read_to_string(dir.join("burgers.meta")).unwrap();
    assert!(meta.contains(&format!("config_hash={hash}")));
    assert!(meta.contains("version=v") && meta.contains("seed=0") && meta.contains("profile=linear"));
    let diff = fs::read_to_string(dir.join("burgers_difference.csv")).unwrap();
    assert!(diff.starts_with(&format!("# config_hash={hash}\n")));
}

#[test]
fn config_file_and_flag_precedence() {
    let dir = out_dir("config");
    fs::create_dir_all(&dir).unwrap();
    let file = dir.join("run.cfg");
    fs::write(&file, "# elliptic run\nprofile = tanh\ngrid-n = 64\n").unwrap();
    let from_file = poppe(&["validate", "elliptic", "--config", file.to_str().unwrap()]);
    let flags = poppe(&["validate", "elliptic", "--profile", "tanh", "--grid-n", "64"]);
    assert!(from_file.status.success());
    assert_eq!(from_file.stdout, flags.stdout);
    let overridden = poppe(&["validate", "elliptic", "--config", file.to_str().unwrap(), "--grid-n", "1024"]);
    assert_ne!(overridden.stdout, flags.stdout);
    fs::write(&file, "grid-points = 64\n").unwrap();
    let o = poppe(&["validate", "elliptic", "--config", file.to_str().unwrap()]);
    assert!(stderr(&o).contains("unknown key"));
}

#[test]
fn breakdown_exits_with_report() {
    let dir = out_dir("shock");
    let o = poppe(&["run", "burgers", "--profile", "neg-tanh", "--t-final", "1.2", "--out", dir.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    let err = stderr(&o);
    assert!(err.contains("breakdown") && err.contains("t=") && err.contains("det="), "{err}");
    assert!(fs::read_to_string(dir.join("burgers.meta")).unwrap().contains("breakdown.0="));
}

#[test]
fn numerical_failure_exits_nonzero() {
    let dir = out_dir("overflow");
    let o = poppe(&["run", "prelaplace", "--nu", "100", "--t-final", "50", "--out", dir.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2), "{}", stderr(&o));
}
