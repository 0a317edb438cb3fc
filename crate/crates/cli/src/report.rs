//! Run reports and plot-data emission.
//!
//! The `--out` artifact is a deterministic JSON document (float fields as
//! decimal strings with 17 significant digits) suitable for byte-for-byte
//! comparison across runs; the stdout report additionally carries wall
//! time. CSV files use a header row, LF line endings, and the same
//! decimal-string convention.

use serde::{Deserialize, Serialize};
use serde_json::Value;
use std::collections::BTreeMap;
use std::io::Write;
use std::path::Path;
use zeta_resonance::{fmt_g17, Error, Result};

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct CheckLine {
    pub name: String,
    pub pass: bool,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct RunReport {
    pub command: String,
    pub version: String,
    /// Echo of the fully merged configuration.
    pub config: Value,
    /// Wall time; excluded from the deterministic `--out` artifact.
    pub wall_ms: u64,
    pub checks: Vec<CheckLine>,
    /// Numeric outputs as decimal strings (17 significant digits).
    pub outputs: BTreeMap<String, String>,
    /// Regime flags raised during the run (e.g. R clamped to 1).
    pub flags: Vec<String>,
    /// Command-specific payload (already decimal-stringified).
    pub payload: Value,
}

impl RunReport {
    pub fn new(command: &str, config: Value) -> RunReport {
        RunReport {
            command: command.to_string(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            config,
            wall_ms: 0,
            checks: Vec::new(),
            outputs: BTreeMap::new(),
            flags: Vec::new(),
            payload: Value::Null,
        }
    }

    pub fn check(&mut self, name: &str, pass: bool) {
        self.checks.push(CheckLine {
            name: name.to_string(),
            pass,
        });
    }

    pub fn output(&mut self, name: &str, value: f64) {
        self.outputs.insert(name.to_string(), fmt_g17(value));
    }

    pub fn output_str(&mut self, name: &str, value: impl Into<String>) {
        self.outputs.insert(name.to_string(), value.into());
    }

    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    /// Deterministic artifact: the report without wall time.
    pub fn artifact(&self) -> Value {
        serde_json::json!({
            "command": self.command,
            "version": self.version,
            "config": self.config,
            "checks": self.checks,
            "outputs": self.outputs,
            "flags": self.flags,
            "payload": self.payload,
        })
    }

    pub fn write_artifact(&self, path: &Path) -> Result<()> {
        let text = serde_json::to_string_pretty(&self.artifact())
            .map_err(|e| Error::invalid(format!("serialization failed: {e}")))?;
        std::fs::write(path, text + "\n")
            .map_err(|e| Error::invalid(format!("cannot write {}: {e}", path.display())))
    }

    pub fn print_summary(&self) {
        println!("command: {} (v{})", self.command, self.version);
        for c in &self.checks {
            println!("check {}: {}", c.name, if c.pass { "PASS" } else { "FAIL" });
        }
        for (k, v) in &self.outputs {
            println!("{k} = {v}");
        }
        for f in &self.flags {
            println!("flag: {f}");
        }
        println!("wall_ms: {}", self.wall_ms);
    }
}

/// Write grid-valued rows as CSV: header, LF endings, decimal strings.
pub fn emit_plot_data(path: &Path, header: &[&str], rows: &[Vec<String>]) -> Result<()> {
    for row in rows {
        if row.len() != header.len() {
            return Err(Error::invalid("CSV row width does not match the header"));
        }
    }
    let mut buf = String::new();
    buf.push_str(&header.join(","));
    buf.push('\n');
    for row in rows {
        buf.push_str(&row.join(","));
        buf.push('\n');
    }
    let mut file = std::fs::File::create(path)
        .map_err(|e| Error::invalid(format!("cannot create {}: {e}", path.display())))?;
    file.write_all(buf.as_bytes())
        .map_err(|e| Error::invalid(format!("cannot write {}: {e}", path.display())))
}

pub fn csv_cell(x: f64) -> String {
    fmt_g17(x)
}
