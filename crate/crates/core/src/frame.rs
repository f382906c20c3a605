// SPDX-License-Identifier: Apache-2.0

//! The register-by-time matrix.

use indexmap::IndexMap;
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};

/// Cell value for a register holding any `x`/`z` bit, or not yet assigned.
pub const UNKNOWN: i64 = -1;

/// One row per register, one column per change-bearing timestamp.
///
/// Cells are stored row-major. Each is either [`UNKNOWN`] or a non-negative
/// register value.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Frame {
    row_names: Vec<String>,
    times: Vec<u64>,
    cells: Vec<i64>,
    widths: Vec<Option<u32>>,
    aliases: IndexMap<String, Vec<String>>,
    warnings: Vec<String>,
    wide: IndexMap<String, Vec<String>>,
}

impl Frame {
    /// Assemble a frame from row-major cells, checking every invariant.
    pub fn new(row_names: Vec<String>, times: Vec<u64>, cells: Vec<i64>) -> Result<Self> {
        let n_rows = row_names.len();
        let widths = vec![None; n_rows];
        let frame = Frame {
            row_names,
            times,
            cells,
            widths,
            aliases: IndexMap::new(),
            warnings: Vec::new(),
            wide: IndexMap::new(),
        };
        frame.validate()?;
        Ok(frame)
    }

    pub(crate) fn from_parts(
        row_names: Vec<String>,
        times: Vec<u64>,
        cells: Vec<i64>,
        widths: Vec<Option<u32>>,
        aliases: IndexMap<String, Vec<String>>,
        warnings: Vec<String>,
        wide: IndexMap<String, Vec<String>>,
    ) -> Self {
        let frame = Frame { row_names, times, cells, widths, aliases, warnings, wide };
        debug_assert!(frame.validate().is_ok(), "{:?}", frame.validate());
        frame
    }

    fn validate(&self) -> Result<()> {
        if self.cells.len() != self.row_names.len() * self.times.len() {
            return Err(Error::InvalidFrame(format!(
                "{} cells for {} rows x {} columns",
                self.cells.len(),
                self.row_names.len(),
                self.times.len()
            )));
        }
        if let Some(w) = self.times.windows(2).find(|w| w[0] >= w[1]) {
            return Err(Error::InvalidFrame(format!(
                "column times not strictly increasing at #{} -> #{}",
                w[0], w[1]
            )));
        }
        let mut seen = std::collections::HashSet::with_capacity(self.row_names.len());
        if let Some(dup) = self.row_names.iter().find(|n| !seen.insert(n.as_str())) {
            return Err(Error::InvalidFrame(format!("duplicate row name {dup:?}")));
        }
        if let Some(pos) = self.cells.iter().position(|&c| c < UNKNOWN) {
            let ncols = self.times.len();
            return Err(Error::UnrepresentableCell {
                register: self.row_names[pos / ncols].clone(),
                time: self.times[pos % ncols],
                value: self.cells[pos],
            });
        }
        Ok(())
    }

    pub fn row_names(&self) -> &[String] {
        &self.row_names
    }

    pub fn n_rows(&self) -> usize {
        self.row_names.len()
    }

    pub fn n_cols(&self) -> usize {
        self.times.len()
    }

    /// Column times in ticks, strictly increasing.
    pub fn times(&self) -> &[u64] {
        &self.times
    }

    /// Label of column `col`, e.g. `#5`.
    pub fn col_label(&self, col: usize) -> String {
        format!("#{}", self.times[col])
    }

    pub fn col_labels(&self) -> Vec<String> {
        (0..self.n_cols()).map(|c| self.col_label(c)).collect()
    }

    pub fn row(&self, row: usize) -> &[i64] {
        let n = self.n_cols();
        &self.cells[row * n..(row + 1) * n]
    }

    pub fn rows(&self) -> impl Iterator<Item = (&str, &[i64])> + '_ {
        self.row_names.iter().enumerate().map(|(i, name)| (name.as_str(), self.row(i)))
    }

    pub fn row_index(&self, name: &str) -> Option<usize> {
        self.row_names.iter().position(|n| n == name)
    }

    pub fn cell(&self, row: usize, col: usize) -> i64 {
        self.cells[row * self.n_cols() + col]
    }

    pub fn cells(&self) -> &[i64] {
        &self.cells
    }

    /// Declared bit width per row; `None` for frames read back from disk.
    pub fn widths(&self) -> &[Option<u32>] {
        &self.widths
    }

    /// Canonical row name to the alias names folded into it.
    pub fn aliases(&self) -> &IndexMap<String, Vec<String>> {
        &self.aliases
    }

    pub fn warnings(&self) -> &[String] {
        &self.warnings
    }

    /// Rows with values beyond 64 bits, as decimal strings per column. Only
    /// populated under the `stringify` wide policy; the matching cells hold -1.
    pub fn wide_rows(&self) -> &IndexMap<String, Vec<String>> {
        &self.wide
    }

    pub(crate) fn set_wide_rows(&mut self, wide: IndexMap<String, Vec<String>>) {
        self.wide = wide;
    }

    /// True when names, times and cells agree; aliases, warnings and widths
    /// are ignored.
    pub fn same_data(&self, other: &Frame) -> bool {
        self.row_names == other.row_names && self.times == other.times && self.cells == other.cells
    }
}

/// Serialized as `{rows, cols, cells}` with cells as nested row arrays.
impl Serialize for Frame {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let cells: Vec<&[i64]> = (0..self.n_rows()).map(|r| self.row(r)).collect();
        let mut s = serializer.serialize_struct("Frame", 5)?;
        s.serialize_field("rows", &self.row_names)?;
        s.serialize_field("cols", &self.col_labels())?;
        s.serialize_field("cells", &cells)?;
        s.serialize_field("aliases", &self.aliases)?;
        s.serialize_field("warnings", &self.warnings)?;
        s.end()
    }
}

/// Parse a `#<decimal>` column label.
pub fn parse_col_label(label: &str) -> Option<u64> {
    let digits = label.strip_prefix('#')?;
    if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    digits.parse().ok()
}
