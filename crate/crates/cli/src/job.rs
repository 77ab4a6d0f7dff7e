//! Job descriptions and the error classes behind the exit codes.

use std::fmt;
use std::path::PathBuf;

use clap::ValueEnum;
use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Command {
    Generate,
    Certify,
    Verify,
    Zeros,
    Dfinite,
    Bautin,
    Abel,
    Suite,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Generate => "generate",
            Command::Certify => "certify",
            Command::Verify => "verify",
            Command::Zeros => "zeros",
            Command::Dfinite => "dfinite",
            Command::Bautin => "bautin",
            Command::Abel => "abel",
            Command::Suite => "suite",
        }
    }

    /// Whether the command reads an input document.
    pub fn needs_document(self) -> bool {
        self != Command::Suite
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    #[default]
    Exact,
    Float,
}

/// Everything needed to rerun a command. Serialization is canonical (object
/// keys of the embedded document are sorted), so a saved job re-serializes
/// byte for byte.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct JobSpec {
    pub command: Command,
    /// Path the document was read from, for the record.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub input: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub document: Option<serde_json::Value>,
    /// Machine report.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub out: Option<PathBuf>,
    /// Sequence CSV.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub csv: Option<PathBuf>,
    #[serde(default)]
    pub mode: Mode,
    /// Significant bits. Float mode uses `f64` up to 53 bits and
    /// [`taydom_core::Dyadic`] above; the Abel oracle uses it as its bit count.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub precision: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub horizon: Option<usize>,
    #[serde(default)]
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub method: Option<String>,
    /// Criteria run by `suite`; empty means all.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub only: Vec<u8>,
    /// Case-count multiplier for `suite`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scale: Option<f64>,
}

impl JobSpec {
    pub fn new(command: Command) -> Self {
        JobSpec {
            command,
            input: None,
            document: None,
            out: None,
            csv: None,
            mode: Mode::Exact,
            precision: None,
            horizon: None,
            seed: 0,
            method: None,
            only: Vec::new(),
            scale: None,
        }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("job serializes");
        s.push('\n');
        s
    }

    pub fn from_json(s: &str) -> Result<Self, CliError> {
        serde_json::from_str(s).map_err(|e| CliError::Schema(format!("job: {e}")))
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum CliError {
    /// Malformed or invalid input.
    Schema(String),
    /// A certificate, identity or cross-check failed.
    Verification(String),
    /// A numeric result could not be trusted.
    Numeric(String),
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Schema(_) | CliError::Io(_) => 2,
            CliError::Verification(_) => 3,
            CliError::Numeric(_) => 4,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            CliError::Schema(_) => "schema",
            CliError::Verification(_) => "verification",
            CliError::Numeric(_) => "numeric",
            CliError::Io(_) => "io",
        }
    }

    pub fn message(&self) -> &str {
        match self {
            CliError::Schema(m) | CliError::Verification(m) | CliError::Numeric(m) | CliError::Io(m) => m,
        }
    }

    /// Machine-readable diagnostic.
    pub fn to_json(&self) -> String {
        let v = serde_json::json!({
            "error": { "kind": self.kind(), "message": self.message(), "exit_code": self.exit_code() }
        });
        let mut s = serde_json::to_string_pretty(&v).expect("diagnostic serializes");
        s.push('\n');
        s
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} error: {}", self.kind(), self.message())
    }
}

impl std::error::Error for CliError {}

impl From<taydom_core::Error> for CliError {
    fn from(e: taydom_core::Error) -> Self {
        use taydom_core::Error as E;
        let m = e.to_string();
        match e {
            E::Parse(_) | E::Invalid(_) | E::TooShort { .. } | E::ZeroPolynomial | E::SizeCap(_) => CliError::Schema(m),
            E::NonFinite(_) | E::RootsNotConverged(_) | E::NearContour { .. } => CliError::Numeric(m),
            _ => CliError::Verification(m),
        }
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError::Schema(e.to_string())
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn job_round_trips_byte_identically() {
        let mut job = JobSpec::new(Command::Certify);
        job.document = Some(serde_json::json!({"spec": {"constant_part": ["1", "1"]}, "init": ["0", "1"]}));
        job.method = Some("turan".into());
        job.horizon = Some(200);
        job.seed = 7;
        job.scale = Some(0.1);
        let s = job.to_json();
        let back = JobSpec::from_json(&s).unwrap();
        assert_eq!(back, job);
        assert_eq!(back.to_json(), s);
    }

    #[test]
    fn exit_codes() {
        assert_eq!(CliError::Schema(String::new()).exit_code(), 2);
        assert_eq!(CliError::Verification(String::new()).exit_code(), 3);
        assert_eq!(CliError::Numeric(String::new()).exit_code(), 4);
        let e: CliError = taydom_core::Error::NearContour { radius: 1.0, distance: 0.0 }.into();
        assert_eq!(e.exit_code(), 4);
        assert!(JobSpec::from_json("{\"command\": \"nope\"}").is_err());
    }
}
