use std::path::Path;

use anyhow::{Context, Result};
use serde::Serialize;
use serde_json::Value;

#[derive(Debug, Serialize)]
pub struct Verdict {
    pub name: String,
    pub holds: bool,
    #[serde(skip_serializing_if = "Value::is_null")]
    pub detail: Value,
}

#[derive(Debug, Serialize)]
pub struct Diagnostic {
    pub level: &'static str,
    pub message: String,
}

/// Top-level JSON written by every subcommand.
#[derive(Debug, Serialize)]
pub struct Report {
    pub command: &'static str,
    pub inputs: Value,
    pub verdicts: Vec<Verdict>,
    pub diagnostics: Vec<Diagnostic>,
}

impl Report {
    pub fn new(command: &'static str, inputs: impl Serialize) -> Self {
        Report {
            command,
            inputs: serde_json::to_value(inputs).unwrap_or(Value::Null),
            verdicts: Vec::new(),
            diagnostics: Vec::new(),
        }
    }

    pub fn verdict(&mut self, name: impl Into<String>, holds: bool, detail: impl Serialize) {
        let detail = serde_json::to_value(detail).unwrap_or(Value::Null);
        self.verdicts.push(Verdict { name: name.into(), holds, detail });
    }

    pub fn info(&mut self, message: impl Into<String>) {
        self.diagnostics.push(Diagnostic { level: "info", message: message.into() });
    }

    pub fn warn(&mut self, message: impl Into<String>) {
        self.diagnostics.push(Diagnostic { level: "warning", message: message.into() });
    }

    pub fn all_hold(&self) -> bool {
        self.verdicts.iter().all(|v| v.holds)
    }

    /// Writes to `path`, or to stdout when there is none.
    pub fn emit(&self, path: Option<&Path>) -> Result<()> {
        let text = serde_json::to_string_pretty(self)?;
        match path {
            Some(p) => std::fs::write(p, text + "\n").with_context(|| format!("writing {}", p.display())),
            None => stdout(&(text + "\n")),
        }
    }
}

/// Writes to stdout; a closed pipe is not an error.
pub fn stdout(text: &str) -> Result<()> {
    use std::io::Write;
    match std::io::stdout().lock().write_all(text.as_bytes()) {
        Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => Err(e.into()),
        _ => Ok(()),
    }
}
