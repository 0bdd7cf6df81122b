//! Comma-delimited text tables with a header row.
//!
//! All floating-point cells are written with 17 significant digits so a
//! written table re-reads to bit-identical values.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum TableError {
    #[error("table is empty")]
    Empty,
    #[error("line {line}: expected {expected} cells, found {found}")]
    RaggedRow {
        line: usize,
        expected: usize,
        found: usize,
    },
    #[error("no column named `{0}`")]
    NoSuchColumn(String),
    #[error("column `{column}`, row {row}: cannot parse `{value}` as a number")]
    BadNumber {
        column: String,
        row: usize,
        value: String,
    },
}

/// Formats a float with enough digits to round-trip exactly.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

#[derive(Debug, Clone)]
pub struct TextTable {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl TextTable {
    pub fn new<S: Into<String>>(columns: Vec<S>) -> Self {
        Self {
            columns: columns.into_iter().map(Into::into).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push_row(&mut self, cells: Vec<String>) {
        debug_assert_eq!(cells.len(), self.columns.len());
        self.rows.push(cells);
    }

    pub fn parse(text: &str) -> Result<Self, TableError> {
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        let header = lines.next().ok_or(TableError::Empty)?;
        let columns: Vec<String> = header.split(',').map(|s| s.trim().to_string()).collect();
        let mut rows = Vec::new();
        for (i, line) in lines.enumerate() {
            let cells: Vec<String> = line.split(',').map(|s| s.trim().to_string()).collect();
            if cells.len() != columns.len() {
                return Err(TableError::RaggedRow {
                    line: i + 2,
                    expected: columns.len(),
                    found: cells.len(),
                });
            }
            rows.push(cells);
        }
        Ok(Self { columns, rows })
    }

    pub fn column_index(&self, name: &str) -> Result<usize, TableError> {
        self.columns
            .iter()
            .position(|c| c == name)
            .ok_or_else(|| TableError::NoSuchColumn(name.to_string()))
    }

    pub fn column_f64(&self, name: &str) -> Result<Vec<f64>, TableError> {
        let idx = self.column_index(name)?;
        self.rows
            .iter()
            .enumerate()
            .map(|(row, cells)| {
                cells[idx].parse().map_err(|_| TableError::BadNumber {
                    column: name.to_string(),
                    row: row + 1,
                    value: cells[idx].clone(),
                })
            })
            .collect()
    }

    pub fn column_str(&self, name: &str) -> Result<Vec<&str>, TableError> {
        let idx = self.column_index(name)?;
        Ok(self.rows.iter().map(|cells| cells[idx].as_str()).collect())
    }

    pub fn render(&self) -> String {
        let mut out = self.columns.join(",");
        out.push('\n');
        for row in &self.rows {
            out.push_str(&row.join(","));
            out.push('\n');
        }
        out
    }
}
