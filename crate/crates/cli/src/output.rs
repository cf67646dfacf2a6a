//! CSV tables and the `.meta` sidecar.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use crate::config::RunConfig;

#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub name: &'static str,
    pub header: Vec<&'static str>,
    pub rows: Vec<Vec<f64>>,
}

impl Table {
    pub fn new(name: &'static str, header: &[&'static str]) -> Self {
        Self { name, header: header.to_vec(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<f64>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn render(&self, hash: &str) -> String {
        let mut s = format!("# config_hash={hash}\n{}\n", self.header.join(","));
        for row in &self.rows {
            let mut first = true;
            for v in row {
                if !first {
                    s.push(',');
                }
                first = false;
                let _ = write!(s, "{v:.16e}");
            }
            s.push('\n');
        }
        s
    }
}

/// Output of one run: tables plus scalar summaries echoed into the sidecar.
#[derive(Debug, Default)]
pub struct RunOutput {
    pub tables: Vec<Table>,
    pub summary: Vec<(String, f64)>,
    pub breakdowns: Vec<String>,
}

impl RunOutput {
    pub fn summarise(&mut self, key: &str, value: f64) {
        self.summary.push((key.to_string(), value));
    }
}

pub fn version() -> &'static str {
    option_env!("POPPE_GIT_DESCRIBE").unwrap_or(concat!("v", env!("CARGO_PKG_VERSION")))
}

pub fn write_run(cfg: &RunConfig, out: &RunOutput) -> std::io::Result<Vec<PathBuf>> {
    let dir = cfg.out_dir();
    fs::create_dir_all(&dir)?;
    let hash = cfg.hash();
    let eq = cfg.equation.name();
    let mut written = Vec::new();
    for t in &out.tables {
        let path = dir.join(format!("{eq}_{}.csv", t.name));
        fs::write(&path, t.render(&hash))?;
        written.push(path);
    }
    let meta = dir.join(format!("{eq}.meta"));
    fs::write(&meta, render_meta(cfg, out, &hash, &written))?;
    written.push(meta);
    Ok(written)
}

fn render_meta(cfg: &RunConfig, out: &RunOutput, hash: &str, files: &[PathBuf]) -> String {
    let mut s = format!("config_hash={hash}\nversion={}\nseed={}\n", version(), cfg.str("seed"));
    s.push_str(&cfg.canonical());
    let names: Vec<String> = files.iter().filter_map(|p| file_name(p)).collect();
    let _ = writeln!(s, "files={}", names.join(","));
    for (k, v) in &out.summary {
        let _ = writeln!(s, "summary.{k}={v:.16e}");
    }
    for (i, b) in out.breakdowns.iter().enumerate() {
        let _ = writeln!(s, "breakdown.{i}={b}");
    }
    s
}

fn file_name(p: &Path) -> Option<String> {
    p.file_name().map(|n| n.to_string_lossy().into_owned())
}
