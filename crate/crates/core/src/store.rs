// SPDX-License-Identifier: Apache-2.0

//! Frame persistence: Parquet and CSV, registers in rows.
//!
//! Both layouts start with a `register` column holding row names, followed by
//! one signed 64-bit column per timepoint named by its label (`#0`, `#5`, ...).
//! Rows holding values wider than 64 bits keep -1 in the main file and their
//! decimal strings in a `<path>.wide.json` sidecar.

use std::ffi::OsString;
use std::fmt;
use std::fs::{self, File};
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::{Path, PathBuf};
use std::sync::Arc;

use indexmap::IndexMap;
use parquet::basic::{Compression, LogicalType, Repetition, Type as PhysicalType};
use parquet::column::reader::ColumnReader;
use parquet::data_type::{ByteArray, ByteArrayType, Int64Type};
use parquet::file::properties::{EnabledStatistics, WriterProperties};
use parquet::file::reader::{FileReader, SerializedFileReader};
use parquet::file::writer::SerializedFileWriter;
use parquet::schema::types::Type;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::frame::{parse_col_label, Frame, UNKNOWN};

const REGISTER_COLUMN: &str = "register";
const TIME_COLUMN: &str = "time";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, clap::ValueEnum)]
pub enum ExportFormat {
    Parquet,
    Csv,
}

impl ExportFormat {
    pub fn extension(self) -> &'static str {
        match self {
            ExportFormat::Parquet => "parquet",
            ExportFormat::Csv => "csv",
        }
    }
}

/// Path of the sidecar holding wide-register values for `path`.
pub fn wide_sidecar_path(path: &Path) -> PathBuf {
    let mut s = OsString::from(path.as_os_str());
    s.push(".wide.json");
    PathBuf::from(s)
}

fn sync_sidecar(frame: &Frame, path: &Path) -> Result<()> {
    let sidecar = wide_sidecar_path(path);
    if frame.wide_rows().is_empty() {
        if sidecar.exists() {
            fs::remove_file(&sidecar)?;
        }
        return Ok(());
    }
    let mut out = BufWriter::new(File::create(&sidecar)?);
    serde_json::to_writer(&mut out, frame.wide_rows())?;
    out.flush()?;
    Ok(())
}

fn check_cells(frame: &Frame) -> Result<()> {
    let n = frame.n_cols();
    match frame.cells().iter().position(|&c| c < UNKNOWN) {
        Some(pos) => Err(Error::UnrepresentableCell {
            register: frame.row_names()[pos / n].clone(),
            time: frame.times()[pos % n],
            value: frame.cells()[pos],
        }),
        None => Ok(()),
    }
}

fn int64_field(name: &str) -> Result<Arc<Type>> {
    Ok(Arc::new(
        Type::primitive_type_builder(name, PhysicalType::INT64)
            .with_repetition(Repetition::REQUIRED)
            .build()?,
    ))
}

fn string_field(name: &str) -> Result<Arc<Type>> {
    Ok(Arc::new(
        Type::primitive_type_builder(name, PhysicalType::BYTE_ARRAY)
            .with_repetition(Repetition::REQUIRED)
            .with_logical_type(Some(LogicalType::String))
            .build()?,
    ))
}

fn writer_properties() -> Arc<WriterProperties> {
    Arc::new(
        WriterProperties::builder()
            .set_compression(Compression::SNAPPY)
            .set_statistics_enabled(EnabledStatistics::None)
            .set_created_by(concat!("vcdframe ", env!("CARGO_PKG_VERSION")).to_string())
            .build(),
    )
}

/// Write `frame` as Parquet. Returns the size of the written file in bytes.
pub fn write_columnar(frame: &Frame, path: impl AsRef<Path>) -> Result<u64> {
    let path = path.as_ref();
    check_cells(frame)?;
    let mut fields = vec![string_field(REGISTER_COLUMN)?];
    for label in frame.col_labels() {
        fields.push(int64_field(&label)?);
    }
    let schema = Arc::new(Type::group_type_builder("frame").with_fields(fields).build()?);

    let file = File::create(path)?;
    let mut writer = SerializedFileWriter::new(file, schema, writer_properties())?;
    let mut group = writer.next_row_group()?;
    let names: Vec<ByteArray> = frame.row_names().iter().map(|n| ByteArray::from(n.as_str())).collect();
    let mut column = Vec::with_capacity(frame.n_rows());
    let mut index = 0usize;
    while let Some(mut col) = group.next_column()? {
        if index == 0 {
            col.typed::<ByteArrayType>().write_batch(&names, None, None)?;
        } else {
            column.clear();
            column.extend((0..frame.n_rows()).map(|r| frame.cell(r, index - 1)));
            col.typed::<Int64Type>().write_batch(&column, None, None)?;
        }
        col.close()?;
        index += 1;
    }
    group.close()?;
    writer.close()?;
    sync_sidecar(frame, path)?;
    Ok(fs::metadata(path)?.len())
}

/// Write `frame` as RFC 4180 CSV. Output is a pure function of the frame.
pub fn write_csv(frame: &Frame, path: impl AsRef<Path>) -> Result<u64> {
    let path = path.as_ref();
    check_cells(frame)?;
    let mut out = csv::Writer::from_writer(BufWriter::new(File::create(path)?));
    let mut record: Vec<String> = Vec::with_capacity(frame.n_cols() + 1);
    record.push(REGISTER_COLUMN.to_string());
    record.extend(frame.col_labels());
    out.write_record(&record)?;
    for (name, cells) in frame.rows() {
        record.clear();
        record.push(name.to_string());
        record.extend(cells.iter().map(i64::to_string));
        out.write_record(&record)?;
    }
    out.flush()?;
    drop(out);
    sync_sidecar(frame, path)?;
    Ok(fs::metadata(path)?.len())
}

/// Write the time-major layout: a `time` column of labels, then one column
/// per register. [`read_frame`] refuses these files.
pub fn write_transposed(frame: &Frame, path: impl AsRef<Path>, format: ExportFormat) -> Result<u64> {
    let path = path.as_ref();
    check_cells(frame)?;
    match format {
        ExportFormat::Csv => {
            let mut out = csv::Writer::from_writer(BufWriter::new(File::create(path)?));
            let mut record: Vec<String> = vec![TIME_COLUMN.to_string()];
            record.extend(frame.row_names().iter().cloned());
            out.write_record(&record)?;
            for c in 0..frame.n_cols() {
                record.clear();
                record.push(frame.col_label(c));
                record.extend((0..frame.n_rows()).map(|r| frame.cell(r, c).to_string()));
                out.write_record(&record)?;
            }
            out.flush()?;
        }
        ExportFormat::Parquet => {
            let mut fields = vec![string_field(TIME_COLUMN)?];
            for name in frame.row_names() {
                fields.push(int64_field(name)?);
            }
            let schema = Arc::new(Type::group_type_builder("frame").with_fields(fields).build()?);
            let mut writer = SerializedFileWriter::new(File::create(path)?, schema, writer_properties())?;
            let mut group = writer.next_row_group()?;
            let labels: Vec<ByteArray> =
                frame.col_labels().iter().map(|l| ByteArray::from(l.as_str())).collect();
            let mut index = 0usize;
            while let Some(mut col) = group.next_column()? {
                if index == 0 {
                    col.typed::<ByteArrayType>().write_batch(&labels, None, None)?;
                } else {
                    col.typed::<Int64Type>().write_batch(frame.row(index - 1), None, None)?;
                }
                col.close()?;
                index += 1;
            }
            group.close()?;
            writer.close()?;
        }
    }
    sync_sidecar(frame, path)?;
    Ok(fs::metadata(path)?.len())
}

/// Write in the given format, registers in rows.
pub fn write_frame(frame: &Frame, path: impl AsRef<Path>, format: ExportFormat) -> Result<u64> {
    match format {
        ExportFormat::Parquet => write_columnar(frame, path),
        ExportFormat::Csv => write_csv(frame, path),
    }
}

fn parse_header_labels<'a>(mut names: impl Iterator<Item = &'a str>) -> Result<Vec<u64>> {
    match names.next() {
        Some(REGISTER_COLUMN) => {}
        Some(other) => {
            return Err(Error::SchemaMismatch(format!(
                "first column is {other:?}, expected {REGISTER_COLUMN:?}"
            )))
        }
        None => return Err(Error::SchemaMismatch("no columns".into())),
    }
    names
        .map(|label| {
            parse_col_label(label)
                .ok_or_else(|| Error::SchemaMismatch(format!("column label {label:?} is not #<time>")))
        })
        .collect()
}

/// Read a frame written by [`write_columnar`] or [`write_csv`]. The format is
/// detected from the file's magic bytes. A `.wide.json` sidecar is picked up
/// when present. Aliases, warnings and widths are not stored and come back
/// empty.
pub fn read_frame(path: impl AsRef<Path>) -> Result<Frame> {
    let path = path.as_ref();
    let mut magic = [0u8; 4];
    let n = File::open(path)?.read(&mut magic)?;
    if n == 0 {
        return Err(Error::SchemaMismatch(format!("{} is empty", path.display())));
    }
    let mut frame = if n == 4 && &magic == b"PAR1" {
        read_columnar(path)?
    } else {
        read_csv(path)?
    };
    let sidecar = wide_sidecar_path(path);
    if sidecar.exists() {
        let wide: IndexMap<String, Vec<String>> =
            serde_json::from_reader(BufReader::new(File::open(&sidecar)?))?;
        for (name, values) in &wide {
            if frame.row_index(name).is_none() || values.len() != frame.n_cols() {
                return Err(Error::SchemaMismatch(format!(
                    "sidecar row {name:?} does not match the frame"
                )));
            }
        }
        frame.set_wide_rows(wide);
    }
    Ok(frame)
}

fn read_csv(path: &Path) -> Result<Frame> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .from_reader(BufReader::new(File::open(path)?));
    let mut records = reader.records();
    let header = records
        .next()
        .ok_or_else(|| Error::SchemaMismatch("missing header row".into()))??;
    let times = parse_header_labels(header.iter())?;
    let mut names = Vec::new();
    let mut cells = Vec::new();
    for record in records {
        let record = record?;
        let mut fields = record.iter();
        names.push(fields.next().unwrap_or_default().to_string());
        for field in fields {
            let v: i64 = field
                .parse()
                .map_err(|_| Error::SchemaMismatch(format!("cell {field:?} is not an integer")))?;
            cells.push(v);
        }
    }
    Frame::new(names, times, cells)
}

fn read_columnar(path: &Path) -> Result<Frame> {
    let reader = SerializedFileReader::new(File::open(path)?)?;
    let schema = reader.metadata().file_metadata().schema_descr_ptr();
    let columns = schema.columns();
    let times = parse_header_labels(columns.iter().map(|c| c.name()))?;
    if columns[0].physical_type() != PhysicalType::BYTE_ARRAY
        || columns[1..].iter().any(|c| c.physical_type() != PhysicalType::INT64)
    {
        return Err(Error::SchemaMismatch("unexpected physical column types".into()));
    }
    let n_rows = reader.metadata().file_metadata().num_rows() as usize;
    let n_cols = times.len();
    let mut names: Vec<String> = Vec::with_capacity(n_rows);
    let mut cells = vec![0i64; n_rows * n_cols];
    let mut row_base = 0usize;
    let mut values_i64: Vec<i64> = Vec::new();
    let mut values_str: Vec<ByteArray> = Vec::new();
    for g in 0..reader.num_row_groups() {
        let group = reader.get_row_group(g)?;
        let group_rows = group.metadata().num_rows() as usize;
        for c in 0..group.num_columns() {
            match group.get_column_reader(c)? {
                ColumnReader::ByteArrayColumnReader(mut r) => {
                    values_str.clear();
                    let (records, _, _) = r.read_records(group_rows, None, None, &mut values_str)?;
                    check_count(records, group_rows)?;
                    for v in &values_str {
                        let name = v
                            .as_utf8()
                            .map_err(|_| Error::SchemaMismatch("register name is not UTF-8".into()))?;
                        names.push(name.to_string());
                    }
                }
                ColumnReader::Int64ColumnReader(mut r) => {
                    values_i64.clear();
                    let (records, _, _) = r.read_records(group_rows, None, None, &mut values_i64)?;
                    check_count(records, group_rows)?;
                    for (i, v) in values_i64.iter().enumerate() {
                        cells[(row_base + i) * n_cols + (c - 1)] = *v;
                    }
                }
                _ => return Err(Error::SchemaMismatch("unexpected column type".into())),
            }
        }
        row_base += group_rows;
    }
    Frame::new(names, times, cells)
}

fn check_count(got: usize, expected: usize) -> Result<()> {
    if got != expected {
        return Err(Error::SchemaMismatch(format!("column has {got} values, expected {expected}")));
    }
    Ok(())
}

/// Summary counts for `info`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FrameInfo {
    pub n_registers: usize,
    pub n_timepoints: usize,
    pub n_aliases_suppressed: usize,
    pub n_unknown_cells: usize,
    pub first_col: Option<String>,
    pub last_col: Option<String>,
}

pub fn frame_info(frame: &Frame) -> FrameInfo {
    FrameInfo {
        n_registers: frame.n_rows(),
        n_timepoints: frame.n_cols(),
        n_aliases_suppressed: frame.aliases().values().map(Vec::len).sum(),
        n_unknown_cells: frame.cells().iter().filter(|&&c| c == UNKNOWN).count(),
        first_col: frame.times().first().map(|t| format!("#{t}")),
        last_col: frame.times().last().map(|t| format!("#{t}")),
    }
}

impl fmt::Display for FrameInfo {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "registers:         {}", self.n_registers)?;
        writeln!(f, "timepoints:        {}", self.n_timepoints)?;
        writeln!(f, "aliases suppressed: {}", self.n_aliases_suppressed)?;
        writeln!(f, "unknown cells:     {}", self.n_unknown_cells)?;
        writeln!(f, "first column:      {}", self.first_col.as_deref().unwrap_or("-"))?;
        write!(f, "last column:       {}", self.last_col.as_deref().unwrap_or("-"))
    }
}
