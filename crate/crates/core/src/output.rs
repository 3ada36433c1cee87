//! CSV tables: `#` preamble, one header row, one row per sample.
//!
//! Numbers use Rust's shortest round-trip formatting, so parsing an emitted
//! file recovers every value exactly and the text is locale independent.

use std::fmt::Write as _;

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl Table {
    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let idx = self.columns.iter().position(|c| c == name)?;
        Some(self.rows.iter().map(|r| r[idx]).collect())
    }

    /// Renders the table after `preamble` (already `#`-prefixed lines).
    pub fn render(&self, preamble: &str) -> String {
        let mut out = String::with_capacity(preamble.len() + 32 * self.rows.len() * self.columns.len());
        out.push_str(preamble);
        out.push_str(&self.columns.join(","));
        out.push('\n');
        for row in &self.rows {
            for (i, v) in row.iter().enumerate() {
                if i > 0 {
                    out.push(',');
                }
                // first column is time: plain decimal; the rest in exponent form
                if i == 0 {
                    write!(out, "{v}").unwrap();
                } else {
                    write!(out, "{v:e}").unwrap();
                }
            }
            out.push('\n');
        }
        out
    }

    /// Parses text produced by [`Table::render`], skipping the preamble.
    pub fn parse(text: &str) -> Result<Self> {
        let mut lines = text.lines().skip_while(|l| l.starts_with('#'));
        let header = lines
            .next()
            .ok_or_else(|| Error::Csv("missing header row".into()))?;
        let columns: Vec<String> = header.split(',').map(str::to_string).collect();
        let mut rows = Vec::new();
        for (i, line) in lines.enumerate() {
            if line.is_empty() {
                continue;
            }
            let row = line
                .split(',')
                .map(|f| {
                    f.parse::<f64>()
                        .map_err(|_| Error::Csv(format!("row {}: bad number `{f}`", i + 1)))
                })
                .collect::<Result<Vec<_>>>()?;
            if row.len() != columns.len() {
                return Err(Error::Csv(format!(
                    "row {} has {} fields, header has {}",
                    i + 1,
                    row.len(),
                    columns.len()
                )));
            }
            rows.push(row);
        }
        Ok(Self { columns, rows })
    }
}
