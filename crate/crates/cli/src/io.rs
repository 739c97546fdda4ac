//! Input parsing, run manifests and output routing.

use std::fmt;
use std::fs;
use std::io::{self, Read, Write};
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use serde::Serialize;
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

/// Failure classes, mapped one-to-one onto exit codes.
#[derive(Debug)]
pub enum CliError {
    /// Bad flags, unreadable or malformed input, invalid parameters.
    Input(String),
    /// A numerical result fell outside its certified accuracy.
    Accuracy(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Input(_) => 1,
            CliError::Accuracy(_) => 2,
        }
    }

    pub fn record(&self) -> String {
        let (kind, message) = match self {
            CliError::Input(m) => ("input", m),
            CliError::Accuracy(m) => ("accuracy", m),
        };
        json!({ "error": { "kind": kind, "message": message, "exit_code": self.exit_code() } })
            .to_string()
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Input(m) | CliError::Accuracy(m) => f.write_str(m),
        }
    }
}

impl From<stablefit::Error> for CliError {
    fn from(e: stablefit::Error) -> Self {
        if e.is_input_error() {
            CliError::Input(e.to_string())
        } else {
            CliError::Accuracy(e.to_string())
        }
    }
}

impl From<io::Error> for CliError {
    fn from(e: io::Error) -> Self {
        CliError::Input(format!("i/o error: {e}"))
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        CliError::Input(format!("malformed CSV: {e}"))
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError::Input(format!("malformed JSON: {e}"))
    }
}

pub type CliResult<T> = Result<T, CliError>;

fn unix_ms() -> u128 {
    SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_millis())
        .unwrap_or(0)
}

#[derive(Debug, Clone, Serialize)]
pub struct InputDigest {
    pub path: String,
    pub sha256: String,
}

/// Provenance attached to every report.
#[derive(Debug, Clone, Serialize)]
pub struct RunManifest {
    pub subcommand: String,
    pub config: Value,
    pub tool_version: String,
    pub seed: Option<u64>,
    pub input_digests: Vec<InputDigest>,
    pub started_unix_ms: u128,
    pub finished_unix_ms: u128,
}

impl RunManifest {
    pub fn start(subcommand: &str, config: Value, seed: Option<u64>) -> Self {
        RunManifest {
            subcommand: subcommand.into(),
            config,
            tool_version: env!("CARGO_PKG_VERSION").into(),
            seed,
            input_digests: Vec::new(),
            started_unix_ms: unix_ms(),
            finished_unix_ms: 0,
        }
    }

    pub fn finish(&mut self) {
        self.finished_unix_ms = unix_ms();
    }
}

/// Read a whole input file (`-` for stdin) and record its digest.
pub fn read_input(path: &Path, manifest: &mut RunManifest) -> CliResult<String> {
    let mut text = String::new();
    if path == Path::new("-") {
        io::stdin().read_to_string(&mut text)?;
    } else {
        text = fs::read_to_string(path)
            .map_err(|e| CliError::Input(format!("cannot read {}: {e}", path.display())))?;
    }
    manifest.input_digests.push(InputDigest {
        path: path.display().to_string(),
        sha256: hex::encode(Sha256::digest(text.as_bytes())),
    });
    Ok(text)
}

/// A parsed numeric table: column names plus rows.
pub struct Table {
    pub headers: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl Table {
    pub fn column_index(&self, spec: &str) -> CliResult<usize> {
        if let Some(i) = self.headers.iter().position(|h| h == spec) {
            return Ok(i);
        }
        match spec.parse::<usize>() {
            Ok(i) if i < self.headers.len() => Ok(i),
            _ => Err(CliError::Input(format!(
                "no column '{spec}' (have: {})",
                self.headers.join(", ")
            ))),
        }
    }

    pub fn column(&self, i: usize) -> Vec<f64> {
        self.rows.iter().map(|r| r[i]).collect()
    }
}

/// Parse CSV text: `#` comment lines, a header row, numeric fields.
///
/// `header_optional` accepts a bare column of numbers (such as `simulate`
/// output), naming the columns by position.
pub fn parse_table(text: &str, header_optional: bool) -> CliResult<Table> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let mut records = reader.records();
    let first = match records.next() {
        Some(r) => r?,
        None => return Err(CliError::Input("input has no rows".into())),
    };
    let first_numeric: Option<Vec<f64>> = first.iter().map(|f| f.parse().ok()).collect();
    let (headers, mut rows) = match first_numeric {
        Some(values) if header_optional => {
            ((0..values.len()).map(|i| i.to_string()).collect(), vec![values])
        }
        Some(_) => {
            return Err(CliError::Input(
                "CSV header row required (first row is numeric)".into(),
            ))
        }
        None => (first.iter().map(str::to_string).collect::<Vec<_>>(), Vec::new()),
    };
    for (line, rec) in records.enumerate() {
        let rec = rec?;
        if rec.len() != headers.len() {
            return Err(CliError::Input(format!(
                "data row {} has {} fields, expected {}",
                line + 1,
                rec.len(),
                headers.len()
            )));
        }
        let row = rec
            .iter()
            .map(|f| {
                f.parse::<f64>()
                    .map_err(|_| CliError::Input(format!("data row {}: '{f}' is not a number", line + 1)))
            })
            .collect::<CliResult<Vec<f64>>>()?;
        rows.push(row);
    }
    Ok(Table { headers, rows })
}

/// Which of the two artifacts goes to stdout when no file is named.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Primary {
    Json,
    Csv,
}

pub struct Outputs<'a> {
    pub out: Option<&'a PathBuf>,
    pub out_csv: Option<&'a PathBuf>,
}

fn write_to(path: Option<&PathBuf>, text: &str) -> CliResult<()> {
    match path {
        Some(p) => fs::write(p, text)
            .map_err(|e| CliError::Input(format!("cannot write {}: {e}", p.display()))),
        None => {
            let mut out = io::stdout().lock();
            out.write_all(text.as_bytes())?;
            out.flush()?;
            Ok(())
        }
    }
}

/// Route the JSON report and optional CSV table. Both embed `manifest`; the
/// CSV carries it as a leading `#` comment line.
pub fn emit(
    outputs: &Outputs,
    manifest: &RunManifest,
    report: Value,
    csv_body: Option<String>,
    primary: Primary,
) -> CliResult<()> {
    let manifest_json = serde_json::to_value(manifest)?;
    let json_text = serde_json::to_string_pretty(&json!({
        "manifest": manifest_json,
        "report": report,
    }))? + "\n";
    let csv_text = csv_body.map(|body| format!("# manifest {}\n{body}", manifest_json));

    match primary {
        Primary::Json => {
            write_to(outputs.out, &json_text)?;
            if let (Some(p), Some(c)) = (outputs.out_csv, csv_text) {
                write_to(Some(p), &c)?;
            }
        }
        Primary::Csv => {
            if let Some(c) = csv_text {
                write_to(outputs.out_csv, &c)?;
            }
            if let Some(p) = outputs.out {
                write_to(Some(p), &json_text)?;
            }
        }
    }
    Ok(())
}

/// Render rows of serializable records as CSV with a header.
pub fn to_csv<T: Serialize>(rows: &[T]) -> CliResult<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in rows {
        w.serialize(r)?;
    }
    let bytes = w
        .into_inner()
        .map_err(|e| CliError::Input(format!("csv buffer: {e}")))?;
    String::from_utf8(bytes).map_err(|e| CliError::Input(e.to_string()))
}
