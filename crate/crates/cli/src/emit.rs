use std::fmt;
use std::path::PathBuf;

use fraclap::output::{to_json_pretty, SCHEMA_VERSION};
use fraclap::RadialFunction;
use serde::Serialize;
use serde_json::{Map, Value};

use crate::args::{Format, Global};

pub const EXIT_VALIDATION: u8 = 2;
pub const EXIT_NO_CONVERGENCE: u8 = 3;
pub const EXIT_UNKNOWN_SUBCOMMAND: u8 = 64;

#[derive(Debug)]
pub enum CliError {
    Library(fraclap::Error),
    BadFlag(String),
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Library(e) => write!(f, "{e}"),
            CliError::BadFlag(msg) => f.write_str(msg),
        }
    }
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Library(fraclap::Error::NoConvergence { .. }) => EXIT_NO_CONVERGENCE,
            CliError::Library(fraclap::Error::Io(_)) => 1,
            _ => EXIT_VALIDATION,
        }
    }
}

impl CliError {
    /// A non-convergence error still produces its estimate as output.
    pub fn write_best_effort(&self, global: &Global) -> CliResult<()> {
        if let CliError::Library(fraclap::Error::NoConvergence { estimate, error_bound }) = self {
            let body = serde_json::json!({ "estimate": estimate, "error_bound": error_bound });
            Output::json(&body, false)?.write(global)?;
        }
        Ok(())
    }
}

impl From<fraclap::Error> for CliError {
    fn from(e: fraclap::Error) -> Self {
        CliError::Library(e)
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError::Library(e.into())
    }
}

pub type CliResult<T> = Result<T, CliError>;

pub enum Body {
    Json(Value),
    /// CSV text, already carrying its header comment.
    Csv(String),
    /// A radial profile: CSV plus a JSON sidecar when written to a file.
    Profile(RadialFunction, Value),
}

pub struct Output {
    pub body: Body,
    pub converged: bool,
}

/// `value` as a JSON object with `schema` and `converged` fields added.
pub fn json_object<T: Serialize>(value: &T, converged: bool) -> CliResult<Value> {
    let mut map = match serde_json::to_value(value)? {
        Value::Object(m) => m,
        other => {
            let mut m = Map::new();
            m.insert("value".into(), other);
            m
        }
    };
    map.insert("schema".into(), Value::from(SCHEMA_VERSION));
    map.insert("converged".into(), Value::from(converged));
    Ok(Value::Object(map))
}

impl Output {
    pub fn json<T: Serialize>(value: &T, converged: bool) -> CliResult<Self> {
        Ok(Self {
            body: Body::Json(json_object(value, converged)?),
            converged,
        })
    }

    /// A JSON report or a CSV table, picked by `--format` (CSV by default).
    pub fn table<T: Serialize>(value: &T, csv: String, converged: bool, global: &Global) -> CliResult<Self> {
        match global.format {
            Some(Format::Json) => Self::json(value, converged),
            _ => Ok(Self {
                body: Body::Csv(csv),
                converged,
            }),
        }
    }

    pub fn profile<T: Serialize>(u: RadialFunction, meta: &T, converged: bool, global: &Global) -> CliResult<Self> {
        let mut meta = json_object(meta, converged)?;
        if let Some(Format::Json) = global.format {
            if let Value::Object(m) = &mut meta {
                m.insert("grid".into(), serde_json::to_value(u.grid())?);
                m.insert("values".into(), serde_json::to_value(u.values())?);
                m.insert("extensions".into(), serde_json::to_value(u.sidecar())?);
            }
            return Ok(Self {
                body: Body::Json(meta),
                converged,
            });
        }
        Ok(Self {
            body: Body::Profile(u, meta),
            converged,
        })
    }

    /// Write to `--out` or stdout; returns whether the numerics converged.
    pub fn write(self, global: &Global) -> CliResult<bool> {
        let text = match &self.body {
            Body::Json(v) => to_json_pretty(v)? + "\n",
            Body::Csv(s) => s.clone(),
            Body::Profile(u, _) => u.to_csv_string(),
        };
        match &global.out {
            None => print!("{text}"),
            Some(path) => {
                if let Body::Profile(u, meta) = &self.body {
                    let side = u.write(path)?;
                    let report = meta_path(path);
                    std::fs::write(&report, to_json_pretty(meta)? + "\n").map_err(fraclap::Error::from)?;
                    eprintln!("wrote {}, {} and {}", path.display(), side.display(), report.display());
                } else {
                    std::fs::write(path, text).map_err(fraclap::Error::from)?;
                }
            }
        }
        Ok(self.converged)
    }
}

/// Run metadata written next to a profile: `u.csv` gets `u.report.json`.
pub fn meta_path(csv: &std::path::Path) -> PathBuf {
    csv.with_extension("report.json")
}
