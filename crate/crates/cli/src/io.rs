//! JSON input/output helpers shared by all subcommands.

use std::fs;
use std::io::Write;
use std::path::Path;

use nct_morita::dirac::DiracData;
use nct_morita::linalg::{IntMatrix, SkewMatrix};
use nct_morita::sonn::Generator;
use serde::de::DeserializeOwned;
use serde::Serialize;
use serde_json::ser::{Formatter, Serializer};

/// Input problems; these map to exit code 2.
#[derive(Debug, thiserror::Error)]
pub enum InputError {
    #[error("cannot read {path}: {source}")]
    Read { path: String, source: std::io::Error },
    #[error("invalid JSON in {what}: {source}")]
    Json { what: String, source: serde_json::Error },
}

impl InputError {
    pub fn kind(&self) -> &'static str {
        match self {
            InputError::Read { .. } => "Io",
            InputError::Json { .. } => "Schema",
        }
    }
}

/// Writes floats with 17 significant digits so output is byte-stable.
struct FixedFloats;

impl Formatter for FixedFloats {
    fn write_f64<W: ?Sized + Write>(&mut self, writer: &mut W, value: f64) -> std::io::Result<()> {
        write!(writer, "{value:.16e}")
    }

    fn write_f32<W: ?Sized + Write>(&mut self, writer: &mut W, value: f32) -> std::io::Result<()> {
        self.write_f64(writer, value as f64)
    }
}

pub fn to_json<T: Serialize>(value: &T) -> String {
    let mut buf = Vec::new();
    let mut ser = Serializer::with_formatter(&mut buf, FixedFloats);
    value.serialize(&mut ser).expect("serializing to memory");
    String::from_utf8(buf).expect("JSON is UTF-8")
}

/// Prints one document; a closed stdout is not an error worth reporting.
pub fn print_json<T: Serialize>(value: &T) {
    let _ = writeln!(std::io::stdout().lock(), "{}", to_json(value));
}

#[derive(Serialize)]
struct ErrorBody<'a> {
    kind: &'a str,
    message: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    step: Option<usize>,
}

#[derive(Serialize)]
struct ErrorDoc<'a> {
    error: ErrorBody<'a>,
}

pub fn print_error(kind: &str, message: impl Into<String>, step: Option<usize>) {
    print_json(&ErrorDoc { error: ErrorBody { kind, message: message.into(), step } });
}

fn read_file(path: &Path) -> Result<String, InputError> {
    fs::read_to_string(path).map_err(|source| InputError::Read { path: path.display().to_string(), source })
}

fn parse<T: DeserializeOwned>(text: &str, what: &str) -> Result<T, InputError> {
    serde_json::from_str(text).map_err(|source| InputError::Json { what: what.to_string(), source })
}

/// Reads either the bare value or an object holding it under `key`
/// (other fields ignored), so emitted reports read back in.
fn read_wrapped<T: DeserializeOwned>(path: &Path, key: &str) -> Result<T, InputError> {
    let what = path.display().to_string();
    let mut value: serde_json::Value = parse(&read_file(path)?, &what)?;
    if let Some(inner) = value.as_object_mut().and_then(|m| m.remove(key)) {
        value = inner;
    }
    serde_json::from_value(value).map_err(|source| InputError::Json { what, source })
}

/// `{"theta": [[rational-string]]}` or a bare matrix.
pub fn read_theta(path: &Path) -> Result<SkewMatrix, InputError> {
    read_wrapped(path, "theta")
}

/// `{"matrix": [[int]]}` or a bare integer matrix.
pub fn read_int_matrix(path: &Path) -> Result<IntMatrix, InputError> {
    read_wrapped(path, "matrix")
}

/// Dirac data, bare or under `"dirac"`.
pub fn read_dirac(path: &Path) -> Result<DiracData, InputError> {
    read_wrapped(path, "dirac")
}

/// A JSON generator list given inline or as `@path`.
pub fn read_word(arg: &str) -> Result<Vec<Generator>, InputError> {
    match arg.strip_prefix('@') {
        Some(path) => parse(&read_file(Path::new(path))?, path),
        None => parse(arg, "--word"),
    }
}
