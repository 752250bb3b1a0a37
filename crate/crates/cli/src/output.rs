//! Output files and their provenance block.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use fracdrift::report::CheckReport;
use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::config::RunConfig;
use crate::CliError;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Identifies the code version and the resolved configuration of a run.
#[derive(Debug, Clone, Serialize)]
pub struct RunStamp {
    pub program: String,
    pub version: String,
    /// SHA-256 of the version string and the resolved configuration.
    pub hash: String,
    pub command: String,
    pub config: RunConfig,
}

impl RunStamp {
    pub fn new(command: &str, config: &RunConfig) -> Self {
        let mut h = Sha256::new();
        h.update(format!("fracdrift {VERSION}\n").as_bytes());
        h.update(config.to_toml().as_bytes());
        let hash = h.finalize().iter().map(|b| format!("{b:02x}")).collect();
        Self { program: "fracdrift".into(), version: VERSION.into(), hash, command: command.into(), config: config.clone() }
    }

    /// Text form for CSV and snapshot headers, one entry per line.
    pub fn lines(&self) -> Vec<String> {
        vec![
            format!("{} {}", self.program, self.version),
            format!("hash {}", self.hash),
            format!("command {}", self.command),
            "config".into(),
            self.config.to_toml(),
        ]
    }
}

#[derive(Serialize)]
struct ReportFile<'a> {
    run: &'a RunStamp,
    #[serde(flatten)]
    report: &'a CheckReport,
}

/// Writes files under one directory and remembers what it wrote.
pub struct Sink {
    pub dir: PathBuf,
    pub stamp: RunStamp,
    pub written: Vec<PathBuf>,
}

impl Sink {
    pub fn new(dir: &Path, stamp: RunStamp) -> Result<Self, CliError> {
        fs::create_dir_all(dir).map_err(|e| CliError::Io(format!("{}: {e}", dir.display())))?;
        Ok(Self { dir: dir.to_path_buf(), stamp, written: Vec::new() })
    }

    pub fn bytes(&mut self, name: &str, data: &[u8]) -> Result<(), CliError> {
        let path = self.dir.join(name);
        fs::write(&path, data).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
        self.written.push(path);
        Ok(())
    }

    /// `body` writes the whole file, starting with the provenance lines it is
    /// handed.
    pub fn text(
        &mut self,
        name: &str,
        body: impl FnOnce(&mut dyn Write, &[String]) -> fracdrift::Result<()>,
    ) -> Result<(), CliError> {
        let mut buf = Vec::new();
        body(&mut buf, &self.stamp.lines())?;
        self.bytes(name, &buf)
    }

    pub fn report(&mut self, report: &CheckReport) -> Result<(), CliError> {
        let file = ReportFile { run: &self.stamp, report };
        let mut data = serde_json::to_vec_pretty(&file).map_err(|e| CliError::Io(e.to_string()))?;
        data.push(b'\n');
        let name = format!("{}.json", report.name);
        self.bytes(&name, &data)
    }

    pub fn json<T: Serialize>(&mut self, name: &str, value: &T) -> Result<(), CliError> {
        #[derive(Serialize)]
        struct Wrapped<'a, T> {
            run: &'a RunStamp,
            content: &'a T,
        }
        let mut data = serde_json::to_vec_pretty(&Wrapped { run: &self.stamp, content: value }).map_err(|e| CliError::Io(e.to_string()))?;
        data.push(b'\n');
        self.bytes(name, &data)
    }
}

/// CSV with a provenance block and a header row.
pub fn write_table(w: &mut dyn Write, provenance: &[String], header: &str, rows: &[Vec<f64>]) -> fracdrift::Result<()> {
    fracdrift::io::write_provenance(w, provenance)?;
    writeln!(w, "{header}")?;
    for r in rows {
        let cells: Vec<String> = r.iter().map(|v| format!("{v:?}")).collect();
        writeln!(w, "{}", cells.join(","))?;
    }
    Ok(())
}
