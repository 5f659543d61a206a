//! Run-report and tabular output writers.
//!
//! CSV files use RFC 4180 CRLF line endings and a header row; numbers are
//! printed in the shortest representation that round-trips, so identical
//! configs produce byte-identical files. Plot-data files hold two-column
//! whitespace-separated blocks, one block per curve, separated by blank
//! lines.

use serde::Serialize;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use crate::config::RunConfig;
use crate::CliError;

#[derive(Debug, Serialize)]
pub struct ToolInfo {
    pub name: &'static str,
    pub version: &'static str,
}

#[derive(Debug, Serialize)]
pub struct Timings {
    pub total_ms: u128,
}

/// The JSON run report: inputs echoed, outputs, timings, tool version, and
/// the artifact files written.
#[derive(Debug, Serialize)]
pub struct RunReport {
    pub tool: ToolInfo,
    pub config: RunConfig,
    pub outputs: serde_json::Value,
    pub timings: Timings,
    pub files: Vec<String>,
}

impl RunReport {
    pub fn new(config: RunConfig, outputs: serde_json::Value, total_ms: u128) -> Self {
        Self {
            tool: ToolInfo {
                name: "cbvp",
                version: env!("CARGO_PKG_VERSION"),
            },
            config,
            outputs,
            timings: Timings { total_ms },
            files: Vec::new(),
        }
    }
}

/// Shortest round-trip decimal representation of a double.
pub fn fmt_f64(x: f64) -> String {
    format!("{x}")
}

pub struct OutDir {
    dir: PathBuf,
    files: Vec<String>,
}

impl OutDir {
    pub fn create(dir: &Path) -> Result<Self, CliError> {
        fs::create_dir_all(dir).map_err(|e| {
            CliError::Validation(format!(
                "output directory {} is not writable: {e}",
                dir.display()
            ))
        })?;
        Ok(Self {
            dir: dir.to_path_buf(),
            files: Vec::new(),
        })
    }

    /// Writes a CSV file (CRLF line endings, header first).
    pub fn write_csv(
        &mut self,
        name: &str,
        header: &str,
        rows: impl IntoIterator<Item = String>,
    ) -> Result<(), CliError> {
        let mut buf = String::new();
        buf.push_str(header);
        buf.push_str("\r\n");
        for row in rows {
            buf.push_str(&row);
            buf.push_str("\r\n");
        }
        self.write_bytes(name, buf.as_bytes())
    }

    /// Writes blank-line-separated two-column blocks, one per curve.
    pub fn write_plot_blocks(
        &mut self,
        name: &str,
        blocks: &[Vec<(f64, f64)>],
    ) -> Result<(), CliError> {
        let mut buf = String::new();
        for (i, block) in blocks.iter().enumerate() {
            if i > 0 {
                buf.push('\n');
            }
            for &(x, y) in block {
                buf.push_str(&fmt_f64(x));
                buf.push(' ');
                buf.push_str(&fmt_f64(y));
                buf.push('\n');
            }
        }
        self.write_bytes(name, buf.as_bytes())
    }

    pub fn write_report(&mut self, mut report: RunReport) -> Result<(), CliError> {
        report.files = self.files.clone();
        report.files.push("report.json".into());
        let json = serde_json::to_string_pretty(&report)
            .map_err(|e| CliError::Validation(format!("report serialization failed: {e}")))?;
        self.write_bytes("report.json", json.as_bytes())
    }

    fn write_bytes(&mut self, name: &str, bytes: &[u8]) -> Result<(), CliError> {
        let path = self.dir.join(name);
        let mut file = fs::File::create(&path)
            .map_err(|e| CliError::Validation(format!("cannot write {}: {e}", path.display())))?;
        file.write_all(bytes)
            .map_err(|e| CliError::Validation(format!("cannot write {}: {e}", path.display())))?;
        if !self.files.iter().any(|f| f == name) {
            self.files.push(name.to_string());
        }
        Ok(())
    }
}
