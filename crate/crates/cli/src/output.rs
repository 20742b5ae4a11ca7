//! Artifact writing. Everything that lands in an artifact is a function of
//! the resolved config, so reruns are byte-identical; the wall-clock time
//! goes to a separate `<command>.timing.json` and to stderr.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Duration;

use anyhow::{Context, Result};
use serde::Serialize;
use serde_json::json;
use sha2::{Digest, Sha256};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Clone, Serialize)]
pub struct Meta {
    pub tool: &'static str,
    pub version: &'static str,
    pub command: &'static str,
    pub config_hash: String,
    pub seed: u64,
    pub replicas: u64,
}

impl Meta {
    /// `config` is the resolved, result-determining configuration.
    pub fn new(command: &'static str, config: &impl Serialize, seed: u64, replicas: u64) -> Result<Self> {
        let canonical = serde_json::to_vec(&json!({ "command": command, "seed": seed, "config": config }))?;
        let digest = Sha256::digest(&canonical);
        let config_hash = digest.iter().map(|b| format!("{b:02x}")).collect();
        Ok(Self { tool: "sharp", version: VERSION, command, config_hash, seed, replicas })
    }

    fn csv_preamble(&self) -> String {
        format!(
            "# tool: {} {}\n# command: {}\n# config_hash: {}\n# seed: {}\n# replicas: {}\n",
            self.tool, self.version, self.command, self.config_hash, self.seed, self.replicas
        )
    }
}

/// One check whose failure makes the process exit with status 1.
#[derive(Debug, Clone, Serialize)]
pub struct Assertion {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl Assertion {
    pub fn new(name: impl Into<String>, passed: bool, detail: impl Into<String>) -> Self {
        Self { name: name.into(), passed, detail: detail.into() }
    }
}

pub struct Artifacts {
    dir: Option<PathBuf>,
    meta: Meta,
}

impl Artifacts {
    pub fn new(dir: Option<&Path>, meta: Meta) -> Result<Self> {
        if let Some(d) = dir {
            fs::create_dir_all(d).with_context(|| format!("creating output directory {}", d.display()))?;
        }
        Ok(Self { dir: dir.map(Path::to_path_buf), meta })
    }

    fn path(&self, suffix: &str) -> Option<PathBuf> {
        self.dir.as_ref().map(|d| d.join(format!("{}{suffix}", self.meta.command)))
    }

    /// Writes `<command>.csv`: metadata comment lines, then `body`.
    pub fn csv(&self, body: &[u8]) -> Result<()> {
        if let Some(path) = self.path(".csv") {
            let mut bytes = self.meta.csv_preamble().into_bytes();
            bytes.extend_from_slice(body);
            fs::write(&path, bytes).with_context(|| format!("writing {}", path.display()))?;
        }
        Ok(())
    }

    /// Prints the report on stdout and writes `<command>.json`.
    pub fn report(&self, report: &impl Serialize, assertions: &[Assertion]) -> Result<()> {
        let doc = json!({ "meta": self.meta, "report": report, "assertions": assertions });
        let mut text = serde_json::to_string_pretty(&doc)?;
        text.push('\n');
        if let Some(path) = self.path(".json") {
            fs::write(&path, &text).with_context(|| format!("writing {}", path.display()))?;
        }
        match std::io::stdout().lock().write_all(text.as_bytes()) {
            Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => Err(e).context("writing the report to stdout"),
            _ => Ok(()),
        }
    }
}

/// Reports the wall-clock time on stderr and in `<command>.timing.json`.
pub fn timing(dir: Option<&Path>, command: &str, elapsed: Duration) -> Result<()> {
    let secs = elapsed.as_secs_f64();
    eprintln!("{command}: wall-clock {secs:.3} s");
    if let Some(d) = dir {
        let path = d.join(format!("{command}.timing.json"));
        let doc = json!({ "command": command, "version": VERSION, "wall_clock_seconds": secs });
        fs::write(&path, serde_json::to_string_pretty(&doc)? + "\n").with_context(|| format!("writing {}", path.display()))?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hash_depends_on_config_only() {
        let a = Meta::new("theta", &json!({"x": 1}), 5, 10).unwrap();
        let b = Meta::new("theta", &json!({"x": 1}), 5, 10).unwrap();
        let c = Meta::new("theta", &json!({"x": 2}), 5, 10).unwrap();
        assert_eq!(a.config_hash, b.config_hash);
        assert_ne!(a.config_hash, c.config_hash);
        assert_eq!(a.config_hash.len(), 64);
        assert!(a.csv_preamble().starts_with("# tool: sharp"));
    }
}
