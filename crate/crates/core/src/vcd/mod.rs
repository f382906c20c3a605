// SPDX-License-Identifier: Apache-2.0

//! Single-pass reader for IEEE 1364 value change dump documents.
//!
//! [`Parser`] consumes the header declarations with [`Parser::parse_header`]
//! and then yields a stream of [`ChangeEvent`]s. The input is only ever read
//! forward, so any [`std::io::BufRead`] works, including pipes and sockets.

use std::fmt;
use std::str::FromStr;

mod parser;
mod tokenizer;
mod value;

pub use parser::Parser;
pub use value::{decode_bits, decode_value, Decoded, DecodeError};

/// Unit of a [`Timescale`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TimeUnit {
    S,
    Ms,
    Us,
    Ns,
    Ps,
    Fs,
}

impl TimeUnit {
    pub fn as_str(self) -> &'static str {
        match self {
            TimeUnit::S => "s",
            TimeUnit::Ms => "ms",
            TimeUnit::Us => "us",
            TimeUnit::Ns => "ns",
            TimeUnit::Ps => "ps",
            TimeUnit::Fs => "fs",
        }
    }
}

impl FromStr for TimeUnit {
    type Err = ();

    fn from_str(s: &str) -> Result<Self, ()> {
        Ok(match s {
            "s" => TimeUnit::S,
            "ms" => TimeUnit::Ms,
            "us" => TimeUnit::Us,
            "ns" => TimeUnit::Ns,
            "ps" => TimeUnit::Ps,
            "fs" => TimeUnit::Fs,
            _ => return Err(()),
        })
    }
}

/// Duration of one simulation tick, e.g. `1 ns`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Timescale {
    magnitude: u32,
    unit: TimeUnit,
}

impl Timescale {
    /// Returns `None` unless `magnitude` is 1, 10 or 100.
    pub fn new(magnitude: u32, unit: TimeUnit) -> Option<Self> {
        matches!(magnitude, 1 | 10 | 100).then_some(Timescale { magnitude, unit })
    }

    pub fn magnitude(&self) -> u32 {
        self.magnitude
    }

    pub fn unit(&self) -> TimeUnit {
        self.unit
    }
}

impl fmt::Display for Timescale {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {}", self.magnitude, self.unit.as_str())
    }
}

impl FromStr for Timescale {
    type Err = ();

    /// Accepts `1ns`, `1 ns`, `100 ps`, ...
    fn from_str(s: &str) -> Result<Self, ()> {
        let s: String = s.chars().filter(|c| !c.is_ascii_whitespace()).collect();
        let split = s.find(|c: char| !c.is_ascii_digit()).ok_or(())?;
        let (digits, unit) = s.split_at(split);
        let magnitude = digits.parse().map_err(|_| ())?;
        let unit = unit.to_ascii_lowercase().parse()?;
        Timescale::new(magnitude, unit).ok_or(())
    }
}

/// Variable type from a `$var` declaration.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum VarKind {
    Wire,
    Reg,
    Integer,
    Parameter,
    Real,
    Other(String),
}

impl VarKind {
    pub fn parse(s: &str) -> Self {
        match s {
            "wire" => VarKind::Wire,
            "reg" => VarKind::Reg,
            "integer" => VarKind::Integer,
            "parameter" => VarKind::Parameter,
            "real" => VarKind::Real,
            other => VarKind::Other(other.to_string()),
        }
    }

    /// Real-valued variables carry `r` changes and never enter a frame.
    pub fn is_real(&self) -> bool {
        match self {
            VarKind::Real => true,
            VarKind::Other(s) => s == "realtime",
            _ => false,
        }
    }
}

/// One `$var` declaration.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SignalDecl {
    pub id_code: String,
    /// Reference as written, including any bit-select suffix (`bus [3:0]`).
    pub reference: String,
    pub width: u32,
    pub kind: VarKind,
    pub scope_path: Vec<String>,
}

impl SignalDecl {
    /// Dotted scope path followed by the reference, e.g. `top.cpu.pc`.
    pub fn full_name(&self) -> String {
        if self.scope_path.is_empty() {
            return self.reference.clone();
        }
        let mut name = self.scope_path.join(".");
        name.push('.');
        name.push_str(&self.reference);
        name
    }
}

/// `$date`, `$version` and `$comment` text from the header.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Metadata {
    pub date: Option<String>,
    pub version: Option<String>,
    pub comments: Vec<String>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Header {
    pub timescale: Option<Timescale>,
    /// Declarations in document order. Several may share an id code.
    pub decls: Vec<SignalDecl>,
    pub metadata: Metadata,
}

/// Raw value carried by a change: a four-state bit string or a real literal.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum FourStateValue {
    /// Lowercased, over `{0, 1, x, z}`, never empty.
    Bits(String),
    Real(String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ChangeEvent {
    Timestamp(u64),
    Change { id_code: String, value: FourStateValue },
}

/// Borrowed view of an event, valid until the next call on the parser.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EventRef<'a> {
    Timestamp(u64),
    Change {
        /// Dense index of the id code, in order of first declaration.
        id_index: usize,
        id_code: &'a [u8],
        value: ValueRef<'a>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ValueRef<'a> {
    Bits(&'a [u8]),
    Real(&'a [u8]),
}

impl ValueRef<'_> {
    pub fn to_owned_value(self) -> FourStateValue {
        match self {
            ValueRef::Bits(b) => FourStateValue::Bits(String::from_utf8_lossy(b).into_owned()),
            ValueRef::Real(r) => FourStateValue::Real(String::from_utf8_lossy(r).into_owned()),
        }
    }
}
