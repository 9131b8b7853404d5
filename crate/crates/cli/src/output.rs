use std::fmt;
use std::fs;
use std::path::Path;

use epskit::EpsError;

use crate::{Format, Global, LogBase};

/// Errors surfaced to the user, with their exit status.
#[derive(Debug)]
pub enum CliError {
    Io(String, std::io::Error),
    /// Bad input or parameters.
    Usage(EpsError),
    /// The input was well-formed but a required property failed.
    Check(EpsError),
    Json(serde_json::Error),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Check(_) => 1,
            _ => 2,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Io(path, e) => write!(f, "{path}: {e}"),
            CliError::Usage(e) | CliError::Check(e) => write!(f, "{e}"),
            CliError::Json(e) => write!(f, "json: {e}"),
        }
    }
}

impl From<EpsError> for CliError {
    fn from(e: EpsError) -> Self {
        match e {
            EpsError::NotEps(_) | EpsError::RegimePrecondition(_) | EpsError::KeyTooSmall(_) => {
                CliError::Check(e)
            }
            other => CliError::Usage(other),
        }
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError::Json(e)
    }
}

pub type CliResult<T> = Result<T, CliError>;

pub fn read(path: &Path) -> CliResult<String> {
    fs::read_to_string(path).map_err(|e| CliError::Io(path.display().to_string(), e))
}

/// Sends `text` to `--out` when given, else stdout.
pub fn emit(g: &Global, text: &str) -> CliResult<()> {
    match &g.out {
        Some(p) => fs::write(p, text).map_err(|e| CliError::Io(p.display().to_string(), e)),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

pub fn unit(g: &Global) -> &'static str {
    match g.base {
        LogBase::Two => "bits",
        LogBase::E => "nats",
    }
}

/// An information quantity given in bits, converted to the chosen base.
pub fn info(g: &Global, bits: f64) -> String {
    let v = match g.base {
        LogBase::Two => bits,
        LogBase::E => bits * std::f64::consts::LN_2,
    };
    num(g, v)
}

pub fn num(g: &Global, v: f64) -> String {
    // Avoid printing "-0.0000" for values that round to zero.
    let s = format!("{v:.p$}", p = g.precision);
    if s.starts_with('-') && s[1..].chars().all(|c| c == '0' || c == '.') {
        s[1..].to_string()
    } else {
        s
    }
}

/// Ordered key/value report rendered according to `--format`.
#[derive(Default)]
pub struct Kv {
    pub rows: Vec<(String, String)>,
}

impl Kv {
    pub fn push(&mut self, k: impl Into<String>, v: impl Into<String>) {
        self.rows.push((k.into(), v.into()));
    }

    pub fn render(&self, format: Format) -> String {
        let mut out = String::new();
        match format {
            Format::Table => {
                out.push_str("quantity\tvalue\n");
                for (k, v) in &self.rows {
                    out.push_str(&format!("{k}\t{v}\n"));
                }
            }
            _ => {
                let w = self.rows.iter().map(|r| r.0.chars().count()).max().unwrap_or(0);
                for (k, v) in &self.rows {
                    let pad = w - k.chars().count();
                    out.push_str(&format!("{k}{} : {v}\n", " ".repeat(pad)));
                }
            }
        }
        out
    }

    /// Lines prefixed with `# `, for appending to a data file.
    pub fn render_comment(&self) -> String {
        self.rows.iter().map(|(k, v)| format!("# {k}: {v}\n")).collect()
    }
}
