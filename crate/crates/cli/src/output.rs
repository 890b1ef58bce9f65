use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};

use plaseries::{Certificate, Clause};
use serde_json::{json, Value};

use crate::config::Config;

/// Exit 2 for unreadable input, exit 1 for a contract that does not hold.
#[derive(Debug)]
pub enum CliError {
    Input(String),
    Contract(String),
}

impl CliError {
    pub fn code(&self) -> u8 {
        match self {
            CliError::Input(_) => 2,
            CliError::Contract(_) => 1,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Input(m) => write!(f, "input error: {m}"),
            CliError::Contract(m) => write!(f, "contract failure: {m}"),
        }
    }
}

impl From<plaseries::Error> for CliError {
    fn from(e: plaseries::Error) -> Self {
        match e {
            plaseries::Error::Parse(m) => CliError::Input(m),
            other => CliError::Contract(other.to_string()),
        }
    }
}

pub fn io_err(path: &Path, e: std::io::Error) -> CliError {
    CliError::Input(format!("{}: {e}", path.display()))
}

pub fn read(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|e| io_err(path, e))
}

/// Result of a job: the certificate written to disk and, if the job stopped
/// early, the reason.
pub struct Outcome {
    pub certificate: Certificate,
    pub failure: Option<String>,
}

impl Outcome {
    pub fn finish(self, strict: bool) -> Result<(), CliError> {
        if let Some(f) = self.failure {
            return Err(CliError::Contract(f));
        }
        if let Some(c) = self.certificate.first_failure() {
            return Err(CliError::Contract(describe(c)));
        }
        if strict {
            if let Some(c) = self.certificate.strict_failures().first() {
                return Err(CliError::Contract(format!("{} (strict)", describe(c))));
            }
        }
        Ok(())
    }
}

pub fn describe(c: &Clause) -> String {
    let rel = if c.strict { "<" } else { "<=" };
    format!("clause {} failed: measured {:e}, required {rel} {:e}", c.name, c.measured, c.bound)
}

pub fn certificate_json(c: &Certificate) -> Value {
    let clauses: Vec<Value> = c
        .clauses
        .iter()
        .map(|k| {
            json!({
                "name": k.name,
                "relation": if k.strict { "<" } else { "<=" },
                "bound": k.bound,
                "measured": k.measured,
                "pass": k.pass,
            })
        })
        .collect();
    json!({
        "grid_size": c.grid_size,
        "slack": c.slack,
        "passed": c.passed(),
        "clauses": clauses,
    })
}

/// Writes files under one artifact directory; each file is written to a
/// temporary name first and renamed into place.
pub struct Artifacts {
    root: PathBuf,
}

impl Artifacts {
    pub fn new(root: &Path) -> Result<Self, CliError> {
        fs::create_dir_all(root).map_err(|e| io_err(root, e))?;
        Ok(Artifacts { root: root.to_path_buf() })
    }

    pub fn write(&self, name: &str, contents: &str) -> Result<(), CliError> {
        let path = self.root.join(name);
        if let Some(parent) = path.parent() {
            fs::create_dir_all(parent).map_err(|e| io_err(parent, e))?;
        }
        let tmp = path.with_extension("partial");
        fs::write(&tmp, contents).map_err(|e| io_err(&tmp, e))?;
        fs::rename(&tmp, &path).map_err(|e| io_err(&path, e))
    }

    /// `report.json` plus `certificate.txt`.
    pub fn report(
        &self,
        kind: &str,
        cfg: &Config,
        cert: &Certificate,
        failure: Option<&str>,
        summary: Value,
    ) -> Result<(), CliError> {
        let report = json!({
            "kind": kind,
            "config": cfg,
            "passed": failure.is_none() && cert.passed(),
            "failure": failure,
            "certificate": certificate_json(cert),
            "summary": summary,
        });
        self.write("report.json", &format!("{}\n", serde_json::to_string_pretty(&report).unwrap()))?;
        self.write("certificate.txt", &cert.to_string())
    }
}
