use std::fmt::Write as _;

use serde::Serialize;
use serde_json::Value;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    Exploratory,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Severity {
    Error,
    Warning,
    Info,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Finding {
    pub severity: Severity,
    pub location: String,
    pub message: String,
    #[serde(skip_serializing_if = "Value::is_null")]
    pub witness: Value,
}

impl Finding {
    pub fn new(severity: Severity, location: impl Into<String>, message: impl Into<String>) -> Self {
        Self { severity, location: location.into(), message: message.into(), witness: Value::Null }
    }

    pub fn error(location: impl Into<String>, message: impl Into<String>) -> Self {
        Self::new(Severity::Error, location, message)
    }

    pub fn warning(location: impl Into<String>, message: impl Into<String>) -> Self {
        Self::new(Severity::Warning, location, message)
    }

    pub fn info(location: impl Into<String>, message: impl Into<String>) -> Self {
        Self::new(Severity::Info, location, message)
    }

    pub fn with_witness(mut self, witness: Value) -> Self {
        self.witness = witness;
        self
    }
}

/// Field order is the serialization order.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Report {
    pub command: String,
    pub status: Status,
    pub findings: Vec<Finding>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub derived: Option<Value>,
}

impl Report {
    /// `fail` exactly when some finding is an error; otherwise `exploratory`
    /// if requested, else `pass`.
    pub fn new(command: &str, findings: Vec<Finding>, derived: Option<Value>, exploratory: bool) -> Self {
        let status = if findings.iter().any(|f| f.severity == Severity::Error) {
            Status::Fail
        } else if exploratory {
            Status::Exploratory
        } else {
            Status::Pass
        };
        Self { command: command.to_string(), status, findings, derived }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("reports serialize");
        s.push('\n');
        s
    }

    pub fn to_human(&self) -> String {
        let status = match self.status {
            Status::Pass => "pass",
            Status::Fail => "fail",
            Status::Exploratory => "exploratory",
        };
        let mut out = format!("{}: {status}\n", self.command);
        for f in &self.findings {
            let sev = match f.severity {
                Severity::Error => "error",
                Severity::Warning => "warning",
                Severity::Info => "info",
            };
            let _ = write!(out, "  [{sev}] {}: {}", f.location, f.message);
            if !f.witness.is_null() {
                let _ = write!(out, " (witness: {})", f.witness);
            }
            out.push('\n');
        }
        if let Some(d) = &self.derived {
            let _ = writeln!(out, "derived: {}", serde_json::to_string(d).expect("values serialize"));
        }
        out
    }
}
