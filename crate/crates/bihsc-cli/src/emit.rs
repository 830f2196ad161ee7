//! Deterministic emission helpers: fixed float formatting (17 significant
//! digits, round-trip safe), ordered JSON, no timestamps anywhere in data
//! files.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use crate::CliError;

/// `{:.16e}` gives one leading digit plus 16 fractional digits: enough to
/// reproduce any f64 bit pattern on re-parse.
pub fn fmt_float(v: f64) -> String {
    format!("{v:.16e}")
}

pub fn write_text(path: &Path, content: &str) -> Result<(), CliError> {
    if let Some(parent) = path.parent() {
        if !parent.as_os_str().is_empty() {
            std::fs::create_dir_all(parent)
                .map_err(|e| CliError::io(format!("cannot create {}: {e}", parent.display())))?;
        }
    }
    let file = File::create(path)
        .map_err(|e| CliError::io(format!("cannot create {}: {e}", path.display())))?;
    let mut writer = BufWriter::new(file);
    writer
        .write_all(content.as_bytes())
        .map_err(|e| CliError::io(format!("cannot write {}: {e}", path.display())))?;
    Ok(())
}

pub fn write_json(path: &Path, value: &serde_json::Value) -> Result<(), CliError> {
    let mut text = serde_json::to_string_pretty(value)
        .map_err(|e| CliError::io(format!("cannot serialize json: {e}")))?;
    text.push('\n');
    write_text(path, &text)
}

/// Finite floats become JSON numbers; infinities and NaN become null
/// (serde_json would do so silently, this makes it deliberate).
pub fn json_float(v: f64) -> serde_json::Value {
    if v.is_finite() {
        serde_json::json!(v)
    } else {
        serde_json::Value::Null
    }
}

/// A CSV built from rows of preformatted cells; the writer only guarantees
/// layout, all formatting happens at the call site.
pub struct Csv {
    buffer: String,
}

impl Csv {
    pub fn new(header: &[&str]) -> Self {
        let mut buffer = header.join(",");
        buffer.push('\n');
        Self { buffer }
    }

    pub fn row(&mut self, cells: &[String]) {
        self.buffer.push_str(&cells.join(","));
        self.buffer.push('\n');
    }

    pub fn write(self, path: &Path) -> Result<(), CliError> {
        write_text(path, &self.buffer)
    }
}
