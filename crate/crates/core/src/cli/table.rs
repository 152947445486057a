//! Rectangular numeric tables written as CSV with a `#` provenance block.

use std::fmt::Write as _;
use std::io;
use std::path::Path;

use super::ScenarioError;

/// Numeric table with optional leading text column.
#[derive(Debug, Clone, PartialEq)]
pub struct OutputTable {
    pub provenance: Vec<(String, String)>,
    pub headers: Vec<String>,
    pub rows: Vec<Vec<f64>>,
    /// Header and per-row values of a leading text column.
    pub labels: Option<(String, Vec<String>)>,
}

/// Twelve significant digits in scientific notation.
pub fn format_number(v: f64) -> String {
    let v = if v == 0.0 { 0.0 } else { v };
    format!("{v:.11e}")
}

impl OutputTable {
    pub fn new<S: Into<String>>(headers: impl IntoIterator<Item = S>) -> Result<Self, ScenarioError> {
        let headers: Vec<String> = headers.into_iter().map(Into::into).collect();
        for (i, h) in headers.iter().enumerate() {
            if h.is_empty() || headers[..i].contains(h) {
                return Err(ScenarioError::Validation(format!("column header `{h}` empty or repeated")));
            }
        }
        Ok(OutputTable {
            provenance: Vec::new(),
            headers,
            rows: Vec::new(),
            labels: None,
        })
    }

    pub fn with_labels(mut self, header: impl Into<String>) -> Self {
        self.labels = Some((header.into(), Vec::new()));
        self
    }

    pub fn push_row(&mut self, row: Vec<f64>) -> Result<(), ScenarioError> {
        if row.len() != self.headers.len() {
            return Err(ScenarioError::Validation(format!(
                "row has {} values for {} columns",
                row.len(),
                self.headers.len()
            )));
        }
        if let Some(v) = row.iter().find(|v| !v.is_finite()) {
            return Err(ScenarioError::Validation(format!("non-finite table value {v}")));
        }
        self.rows.push(row);
        Ok(())
    }

    pub fn push_labelled(&mut self, label: impl Into<String>, row: Vec<f64>) -> Result<(), ScenarioError> {
        self.push_row(row)?;
        match &mut self.labels {
            Some((_, labels)) => labels.push(label.into()),
            None => return Err(ScenarioError::Validation("table has no label column".into())),
        }
        Ok(())
    }

    pub fn annotate(&mut self, key: impl Into<String>, value: impl Into<String>) {
        self.provenance.push((key.into(), value.into()));
    }

    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let i = self.headers.iter().position(|h| h == name)?;
        Some(self.rows.iter().map(|r| r[i]).collect())
    }

    /// Data rows only, without the provenance block.
    pub fn body_csv(&self) -> String {
        let mut out = String::new();
        let mut header: Vec<&str> = Vec::new();
        if let Some((h, _)) = &self.labels {
            header.push(h);
        }
        header.extend(self.headers.iter().map(String::as_str));
        out.push_str(&header.join(","));
        out.push('\n');
        for (i, row) in self.rows.iter().enumerate() {
            let mut cells: Vec<String> = Vec::with_capacity(row.len() + 1);
            if let Some((_, labels)) = &self.labels {
                cells.push(labels[i].clone());
            }
            cells.extend(row.iter().map(|v| format_number(*v)));
            out.push_str(&cells.join(","));
            out.push('\n');
        }
        out
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        for (k, v) in &self.provenance {
            let _ = writeln!(out, "# {k}: {v}");
        }
        out.push_str(&self.body_csv());
        out
    }

    pub fn write(&self, path: &Path) -> io::Result<()> {
        std::fs::write(path, self.to_csv())
    }
}
