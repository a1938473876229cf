use std::fs;
use std::path::Path;

use crate::error::{Error, Result};

const BUNDLED_VARVE: &str = include_str!("../../data/varve.txt");

/// An ordered batch of scalar observations.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    pub y: Vec<f64>,
    pub label: String,
}

impl Dataset {
    pub fn new(y: Vec<f64>, label: impl Into<String>) -> Result<Self> {
        if let Some(i) = y.iter().position(|v| !v.is_finite()) {
            return Err(Error::domain(format!("observation {i} is not finite")));
        }
        Ok(Dataset { y, label: label.into() })
    }

    pub fn len(&self) -> usize {
        self.y.len()
    }

    pub fn is_empty(&self) -> bool {
        self.y.is_empty()
    }

    /// Parses one decimal observation per line. A single leading line starting
    /// with `#` is treated as a header; blank lines are skipped.
    pub fn parse(text: &str, label: impl Into<String>) -> Result<Self> {
        let mut y = Vec::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || (idx == 0 && line.starts_with('#')) {
                continue;
            }
            let value: f64 = line.parse().map_err(|_| Error::Parse {
                line: idx + 1,
                message: format!("not a decimal number: {line:?}"),
            })?;
            if !value.is_finite() {
                return Err(Error::Parse {
                    line: idx + 1,
                    message: format!("non-finite observation {line:?}"),
                });
            }
            y.push(value);
        }
        Ok(Dataset { y, label: label.into() })
    }

    pub fn from_path(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = fs::read_to_string(path)?;
        Self::parse(&text, path.display().to_string())
    }

    /// The 634-layer ice-varve thickness series shipped with the crate.
    pub fn varve() -> Self {
        Self::parse(BUNDLED_VARVE, "ice-varve").expect("bundled varve data parses")
    }

    /// Serialises in the loader format: optional `# label` header, then one
    /// value per line in shortest round-trip form.
    pub fn to_text(&self) -> String {
        let mut out = format!("# {}\n", self.label);
        for v in &self.y {
            out.push_str(&format!("{v}\n"));
        }
        out
    }
}
