//! Report envelope and error type shared by every subcommand.
//!
//! Each check produces one [`Report`] serialized as
//! `{"check", "params", "result", "pass", "residuals", "provenance"}`.
//! Checks that never reach a verdict carry an `"error"` object with a
//! machine-readable code instead of `"result"`. Serialization goes through
//! `serde_json` with sorted keys, so identical inputs always produce
//! byte-identical output.

use cylmp::Error;
use serde_json::{json, Map, Value};

/// Every check ran and passed.
pub const EXIT_OK: i32 = 0;
/// Every check ran, at least one reported a failing verdict.
pub const EXIT_CHECK_FAILED: i32 = 1;
/// Malformed input: unreadable files, parse errors, or a library
/// rejection before any verdict was reached.
pub const EXIT_MALFORMED: i32 = 2;

/// Anything that stops a check before it produces a verdict.
#[derive(Debug)]
pub enum CliError {
    Lib(Error),
    Io { path: String, message: String },
    Json { path: String, message: String },
    Usage(String),
}

impl CliError {
    pub fn code(&self) -> &'static str {
        match self {
            CliError::Lib(e) => e.code(),
            CliError::Io { .. } => "io",
            CliError::Json { .. } => "invalid_json",
            CliError::Usage(_) => "usage",
        }
    }

    pub fn message(&self) -> String {
        match self {
            CliError::Lib(e) => e.to_string(),
            CliError::Io { path, message } | CliError::Json { path, message } => {
                format!("{path}: {message}")
            }
            CliError::Usage(message) => message.clone(),
        }
    }

    pub fn to_json(&self) -> Value {
        json!({"code": self.code(), "message": self.message()})
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Lib(e)
    }
}

/// Outcome of one check: a verdict, or the error that prevented one.
#[derive(Debug)]
pub enum Body {
    Done {
        result: Value,
        pass: bool,
        residuals: Vec<f64>,
    },
    Error(CliError),
}

/// One entry of the report stream.
#[derive(Debug)]
pub struct Report {
    pub check: String,
    pub params: Value,
    pub seed: u64,
    pub body: Body,
}

impl Report {
    pub fn done(
        check: &str,
        params: Value,
        seed: u64,
        result: Value,
        pass: bool,
        residuals: Vec<f64>,
    ) -> Self {
        Report {
            check: check.to_string(),
            params,
            seed,
            body: Body::Done {
                result,
                pass,
                residuals,
            },
        }
    }

    pub fn error(check: &str, params: Value, seed: u64, error: CliError) -> Self {
        Report {
            check: check.to_string(),
            params,
            seed,
            body: Body::Error(error),
        }
    }

    pub fn pass(&self) -> bool {
        matches!(&self.body, Body::Done { pass: true, .. })
    }

    pub fn is_error(&self) -> bool {
        matches!(&self.body, Body::Error(_))
    }

    pub fn to_json(&self) -> Value {
        let mut map = Map::new();
        map.insert("check".into(), json!(self.check));
        map.insert("params".into(), self.params.clone());
        match &self.body {
            Body::Done {
                result,
                pass,
                residuals,
            } => {
                map.insert("result".into(), result.clone());
                map.insert("pass".into(), json!(pass));
                map.insert("residuals".into(), json!(residuals));
            }
            Body::Error(e) => {
                map.insert("error".into(), e.to_json());
                map.insert("pass".into(), json!(false));
                map.insert("residuals".into(), json!([] as [f64; 0]));
            }
        }
        map.insert("provenance".into(), json!({"seed": self.seed}));
        Value::Object(map)
    }
}

/// Process exit status for a finished report stream: errors dominate
/// failing verdicts, which dominate success.
pub fn exit_code(reports: &[Report]) -> i32 {
    if reports.iter().any(Report::is_error) {
        EXIT_MALFORMED
    } else if reports.iter().any(|r| !r.pass()) {
        EXIT_CHECK_FAILED
    } else {
        EXIT_OK
    }
}
