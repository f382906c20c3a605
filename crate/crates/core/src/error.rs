// SPDX-License-Identifier: Apache-2.0

use std::io;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("line {line}: malformed declaration: {msg}")]
    MalformedDeclaration { line: u64, msg: String },

    #[error("line {line}: unbalanced scope: {msg}")]
    UnbalancedScope { line: u64, msg: String },

    #[error("end of input before $enddefinitions")]
    MissingEndDefinitions,

    #[error("line {line}: value change for undeclared identifier code {id:?}")]
    UnknownIdCode { line: u64, id: String },

    #[error("line {line}: timestamp #{found} is earlier than current time #{current}")]
    NonMonotonicTime { line: u64, current: u64, found: u64 },

    #[error("line {line}: malformed value change: {msg}")]
    MalformedChange { line: u64, msg: String },

    #[error("line {line}: truncated file: {msg}")]
    TruncatedFile { line: u64, msg: String },

    #[error("value of {register} at #{time} does not fit a signed 64-bit cell")]
    Overflow { register: String, time: u64 },

    #[error("document declares no integer-valued signals")]
    EmptyDesign,

    #[error("document contains no value changes")]
    EmptyTrace,

    #[error("cell ({register}, #{time}) holds {value}, which is not a valid frame value")]
    UnrepresentableCell { register: String, time: u64, value: i64 },

    #[error("schema mismatch: {0}")]
    SchemaMismatch(String),

    #[error("invalid frame: {0}")]
    InvalidFrame(String),

    #[error("frame for source {source_name:?} has no shadow rows")]
    NoShadowRows { source_name: String },

    #[error("duplicate input name {0:?}")]
    DuplicateName(String),

    #[error("I/O failure: {0}")]
    Io(#[from] io::Error),

    #[error("parquet: {0}")]
    Parquet(#[from] parquet::errors::ParquetError),

    #[error("csv: {0}")]
    Csv(#[from] csv::Error),

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Stable variant name, used in batch error records.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::MalformedDeclaration { .. } => "MalformedDeclaration",
            Error::UnbalancedScope { .. } => "UnbalancedScope",
            Error::MissingEndDefinitions => "MissingEndDefinitions",
            Error::UnknownIdCode { .. } => "UnknownIdCode",
            Error::NonMonotonicTime { .. } => "NonMonotonicTime",
            Error::MalformedChange { .. } => "MalformedChange",
            Error::TruncatedFile { .. } => "TruncatedFile",
            Error::Overflow { .. } => "Overflow",
            Error::EmptyDesign => "EmptyDesign",
            Error::EmptyTrace => "EmptyTrace",
            Error::UnrepresentableCell { .. } => "UnrepresentableCell",
            Error::SchemaMismatch(_) => "SchemaMismatch",
            Error::InvalidFrame(_) => "InvalidFrame",
            Error::NoShadowRows { .. } => "NoShadowRows",
            Error::DuplicateName(_) => "DuplicateName",
            Error::Io(_) | Error::Parquet(_) | Error::Csv(_) | Error::Json(_) => "IoFailure",
        }
    }
}
