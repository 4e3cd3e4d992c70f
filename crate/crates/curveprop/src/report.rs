//! Report emission: CSV tables with `#` footers and a JSON summary, each
//! written atomically (temporary file in the target directory, then rename).

use std::fmt::Write as _;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use serde::Serialize;
use serde_json::Value;

#[derive(Debug, thiserror::Error)]
pub enum ReportError {
    #[error("cannot write {path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("data integrity: {0}")]
    DataIntegrity(String),
}

impl ReportError {
    pub fn name(&self) -> &'static str {
        match self {
            ReportError::Io { .. } => "io",
            ReportError::DataIntegrity(_) => "data-integrity",
        }
    }
}

/// Writes `bytes` to `path` via a sibling temporary file and a rename.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> std::io::Result<()> {
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d.to_path_buf(),
        _ => PathBuf::from("."),
    };
    let name = path
        .file_name()
        .ok_or_else(|| std::io::Error::new(std::io::ErrorKind::InvalidInput, "path has no file name"))?;
    let tmp = dir.join(format!(".{}.{}.tmp", name.to_string_lossy(), std::process::id()));
    let result = (|| {
        let mut f = std::fs::File::create(&tmp)?;
        f.write_all(bytes)?;
        f.sync_all()?;
        std::fs::rename(&tmp, path)
    })();
    if result.is_err() {
        let _ = std::fs::remove_file(&tmp);
    }
    result
}

/// `{:.16e}`: 17 significant digits, enough to round-trip any `f64`.
pub fn format_float(v: f64) -> String {
    format!("{v:.16e}")
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Cell {
    Int(i64),
    Float(f64),
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Float(v)
    }
}

impl From<i64> for Cell {
    fn from(v: i64) -> Self {
        Cell::Int(v)
    }
}

impl From<u64> for Cell {
    fn from(v: u64) -> Self {
        Cell::Int(v as i64)
    }
}

impl From<u32> for Cell {
    fn from(v: u32) -> Self {
        Cell::Int(v.into())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CsvTable {
    pub header: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
    /// `# key=value` lines after the data.
    pub footer: Vec<(String, Cell)>,
}

impl CsvTable {
    pub fn new(header: &[&str]) -> Self {
        Self {
            header: header.iter().map(|s| s.to_string()).collect(),
            rows: Vec::new(),
            footer: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        self.rows.push(row);
    }

    pub fn footer(&mut self, key: &str, value: impl Into<Cell>) {
        self.footer.push((key.to_string(), value.into()));
    }

    /// Renders the table; NaN anywhere is refused.
    pub fn render(&self) -> Result<String, ReportError> {
        let cell = |c: &Cell, at: &str| match c {
            Cell::Int(i) => Ok(i.to_string()),
            Cell::Float(v) if v.is_nan() => Err(ReportError::DataIntegrity(format!("NaN in {at}"))),
            Cell::Float(v) => Ok(format_float(*v)),
        };
        let mut out = self.header.join(",");
        out.push('\n');
        for (i, row) in self.rows.iter().enumerate() {
            if row.len() != self.header.len() {
                return Err(ReportError::DataIntegrity(format!(
                    "row {i} has {} cells, header has {}",
                    row.len(),
                    self.header.len()
                )));
            }
            let cells = row
                .iter()
                .enumerate()
                .map(|(j, c)| cell(c, &format!("row {i}, column {}", self.header[j])))
                .collect::<Result<Vec<_>, _>>()?;
            out.push_str(&cells.join(","));
            out.push('\n');
        }
        for (k, v) in &self.footer {
            let _ = writeln!(out, "# {k}={}", cell(v, &format!("footer {k}"))?);
        }
        Ok(out)
    }
}

/// Converts a float for the JSON summary, refusing NaN and infinities.
pub fn json_number(name: &str, v: f64) -> Result<Value, ReportError> {
    serde_json::Number::from_f64(v)
        .map(Value::Number)
        .ok_or_else(|| ReportError::DataIntegrity(format!("non-finite value {v} for {name}")))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Summary {
    pub schema_version: u32,
    pub command: String,
    /// `sha256("blob <len>\0" ‖ canonical config JSON)`, hex.
    pub input_hash: String,
    pub config: Value,
    pub results: Vec<Value>,
    pub csv: Vec<String>,
}

/// Writes every CSV table into `dir`, then `summary.json`.
pub fn emit_report(dir: &Path, summary: &Summary, tables: &[(String, CsvTable)]) -> Result<PathBuf, ReportError> {
    let io = |path: &Path| {
        let path = path.to_path_buf();
        move |source| ReportError::Io { path, source }
    };
    std::fs::create_dir_all(dir).map_err(io(dir))?;
    let rendered = tables
        .iter()
        .map(|(name, t)| Ok((dir.join(name), t.render()?)))
        .collect::<Result<Vec<_>, ReportError>>()?;
    let json = serde_json::to_string_pretty(summary)
        .map_err(|e| ReportError::DataIntegrity(format!("summary does not serialize: {e}")))?;
    for (path, text) in &rendered {
        write_atomic(path, text.as_bytes()).map_err(io(path))?;
    }
    let path = dir.join("summary.json");
    write_atomic(&path, format!("{json}\n").as_bytes()).map_err(io(&path))?;
    Ok(path)
}
