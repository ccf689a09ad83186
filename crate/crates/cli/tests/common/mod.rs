#![allow(dead_code)]

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

pub fn configs_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../configs")
}

pub fn config_path(name: &str) -> PathBuf {
    configs_dir().join(name)
}

pub fn espm<I, S>(args: I) -> Output
where
    I: IntoIterator<Item = S>,
    S: AsRef<std::ffi::OsStr>,
{
    Command::new(env!("CARGO_BIN_EXE_espm"))
        .args(args)
        .env("ESPM_LOG", "warn")
        .output()
        .expect("binary runs")
}

pub fn code(out: &Output) -> i32 {
    out.status.code().expect("exited normally")
}

pub fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

/// A shipped config as JSON with OCP paths made absolute, so the copy can
/// live in any directory.
pub fn config_json(name: &str) -> serde_json::Value {
    let text = std::fs::read_to_string(config_path(name)).unwrap();
    let mut v: serde_json::Value = serde_json::from_str(&text).unwrap();
    for side in ["positive", "negative"] {
        let rel = v["ocp"][side].as_str().unwrap().to_string();
        let abs = configs_dir().join(rel).canonicalize().unwrap();
        v["ocp"][side] = serde_json::json!(abs);
    }
    v
}

pub fn write_json(path: &Path, value: &serde_json::Value) {
    std::fs::write(path, serde_json::to_string_pretty(value).unwrap()).unwrap();
}

pub fn read_json(path: &Path) -> serde_json::Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

pub fn s(p: &Path) -> String {
    p.to_str().unwrap().to_string()
}
