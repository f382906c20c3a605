// SPDX-License-Identifier: Apache-2.0

//! Streaming conversion of a VCD document into a [`Frame`].

use std::collections::{HashMap, HashSet};
use std::fs::File;
use std::io::{BufRead, BufReader};
use std::path::Path;

use indexmap::IndexMap;

use crate::error::{Error, Result};
use crate::frame::{Frame, UNKNOWN};
use crate::vcd::{decode_bits, Decoded, EventRef, Parser, ValueRef};

/// What to do with an all-numeric value that does not fit a signed 64-bit cell.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, clap::ValueEnum)]
pub enum WidePolicy {
    /// Fail the conversion with [`Error::Overflow`].
    #[default]
    Error,
    /// Store -1 in the cell and keep the decimal string in [`Frame::wide_rows`].
    Stringify,
    /// Store -1.
    Unknown,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct BuildOptions {
    /// Emit aliased declarations as rows of their own, copies of their canonical row.
    pub keep_aliases: bool,
    pub wide_policy: WidePolicy,
}

struct RowPlan {
    name: String,
    slot: usize,
    width: u32,
}

/// Convert a VCD document read from `source` in one forward pass.
///
/// Rows follow declaration order. Declarations sharing an id code collapse
/// onto the first one unless [`BuildOptions::keep_aliases`] is set. Columns
/// are the timestamps at which at least one register changed, and each
/// cell holds the last value assigned at or before its column (-1 before
/// the first assignment).
pub fn build_frame<R: BufRead>(source: R, options: &BuildOptions) -> Result<Frame> {
    let mut parser = Parser::new(source);
    let header = parser.parse_header()?;

    let mut warnings = Vec::new();
    let mut slot_of_id: Vec<Option<usize>> = vec![None; parser.id_count()];
    let mut slot_names: Vec<String> = Vec::new();
    let mut rows: Vec<RowPlan> = Vec::new();
    let mut aliases: IndexMap<String, Vec<String>> = IndexMap::new();
    let mut taken: HashSet<String> = HashSet::new();

    for decl in &header.decls {
        let full = decl.full_name();
        if decl.kind.is_real() {
            warnings.push(format!("excluded real-valued signal {full}"));
            continue;
        }
        let id = parser.id_index(&decl.id_code).expect("declared in header");
        match slot_of_id[id] {
            None => {
                let name = if taken.contains(&full) {
                    let renamed = format!("{full} <{}>", decl.id_code);
                    warnings.push(format!(
                        "row name {full} reused by id code {:?}; renamed to {renamed}",
                        decl.id_code
                    ));
                    renamed
                } else {
                    full
                };
                let slot = slot_names.len();
                slot_of_id[id] = Some(slot);
                slot_names.push(name.clone());
                taken.insert(name.clone());
                rows.push(RowPlan { name, slot, width: decl.width });
            }
            Some(slot) => {
                let canonical = &slot_names[slot];
                if taken.contains(&full) {
                    warnings.push(format!("duplicate declaration of {full} dropped"));
                    continue;
                }
                aliases.entry(canonical.clone()).or_default().push(full.clone());
                if options.keep_aliases {
                    taken.insert(full.clone());
                    rows.push(RowPlan { name: full, slot, width: decl.width });
                }
            }
        }
    }
    if slot_names.is_empty() {
        return Err(Error::EmptyDesign);
    }

    let n_slots = slot_names.len();
    let mut current = vec![UNKNOWN; n_slots];
    let mut current_wide: Vec<Option<String>> = vec![None; n_slots];
    let mut wide_cells: Vec<(usize, usize, String)> = Vec::new();
    let mut columns: Vec<i64> = Vec::new();
    let mut times: Vec<u64> = Vec::new();
    let mut time = 0u64;
    let mut dirty = false;

    let mut flush = |time: u64,
                     current: &[i64],
                     current_wide: &[Option<String>],
                     columns: &mut Vec<i64>,
                     times: &mut Vec<u64>| {
        let col = times.len();
        times.push(time);
        columns.extend_from_slice(current);
        for (slot, w) in current_wide.iter().enumerate() {
            if let Some(s) = w {
                wide_cells.push((col, slot, s.clone()));
            }
        }
    };

    while let Some(event) = parser.next_event_ref()? {
        match event {
            EventRef::Timestamp(t) => {
                if t != time {
                    if dirty {
                        flush(time, &current, &current_wide, &mut columns, &mut times);
                        dirty = false;
                    }
                    time = t;
                }
            }
            EventRef::Change { id_index, value, .. } => {
                let Some(slot) = slot_of_id[id_index] else {
                    continue;
                };
                let ValueRef::Bits(bits) = value else {
                    continue;
                };
                current_wide[slot] = None;
                current[slot] = match decode_bits(bits) {
                    Decoded::Unknown => UNKNOWN,
                    Decoded::Int(v) => v,
                    Decoded::Wide(big) => match options.wide_policy {
                        WidePolicy::Error => {
                            return Err(Error::Overflow { register: slot_names[slot].clone(), time })
                        }
                        WidePolicy::Unknown => UNKNOWN,
                        WidePolicy::Stringify => {
                            current_wide[slot] = Some(big.to_string());
                            UNKNOWN
                        }
                    },
                };
                dirty = true;
            }
        }
    }
    if dirty {
        flush(time, &current, &current_wide, &mut columns, &mut times);
    }
    if times.is_empty() {
        return Err(Error::EmptyTrace);
    }

    let n_cols = times.len();
    let mut cells = Vec::with_capacity(rows.len() * n_cols);
    for row in &rows {
        cells.extend((0..n_cols).map(|c| columns[c * n_slots + row.slot]));
    }
    drop(columns);

    let mut wide: IndexMap<String, Vec<String>> = IndexMap::new();
    if !wide_cells.is_empty() {
        let mut by_slot: HashMap<usize, Vec<(usize, String)>> = HashMap::new();
        for (col, slot, s) in wide_cells {
            by_slot.entry(slot).or_default().push((col, s));
        }
        for (r, row) in rows.iter().enumerate() {
            let Some(entries) = by_slot.get(&row.slot) else {
                continue;
            };
            let mut strings: Vec<String> =
                cells[r * n_cols..(r + 1) * n_cols].iter().map(i64::to_string).collect();
            for (col, s) in entries {
                strings[*col] = s.clone();
            }
            warnings.push(format!("{} holds values wider than 64 bits", row.name));
            wide.insert(row.name.clone(), strings);
        }
    }

    let widths = rows.iter().map(|r| Some(r.width)).collect();
    let row_names = rows.into_iter().map(|r| r.name).collect();
    let mut frame = Frame::from_parts(row_names, times, cells, widths, aliases, warnings, IndexMap::new());
    frame.set_wide_rows(wide);
    Ok(frame)
}

/// [`build_frame`] over an in-memory document.
pub fn frame_from_text(document: &str, options: &BuildOptions) -> Result<Frame> {
    build_frame(document.as_bytes(), options)
}

/// [`build_frame`] over a file on disk.
pub fn load_vcd(path: impl AsRef<Path>, options: &BuildOptions) -> Result<Frame> {
    let file = File::open(path)?;
    build_frame(BufReader::with_capacity(1 << 16, file), options)
}
