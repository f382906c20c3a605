// SPDX-License-Identifier: Apache-2.0

use num_bigint::BigUint;
use thiserror::Error;

use super::FourStateValue;

/// Result of decoding a bit string without a cell-width policy applied.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Decoded {
    /// At least one bit is `x` or `z`.
    Unknown,
    Int(i64),
    /// All-numeric but at least 2^63.
    Wide(BigUint),
}

impl Decoded {
    /// Cell value, with -1 standing in for anything non-numeric.
    pub fn to_cell(&self) -> Option<i64> {
        match self {
            Decoded::Unknown => Some(-1),
            Decoded::Int(v) => Some(*v),
            Decoded::Wide(_) => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DecodeError {
    #[error("value needs {0} bits and does not fit a signed 64-bit cell")]
    Overflow(usize),
    #[error("{len} bits exceed declared width {width}")]
    TooWide { len: usize, width: u32 },
    #[error("real literal has no integer encoding")]
    Real,
}

/// Decode a lowercase bit string. Left extension is implicit: a string
/// shorter than its register extends with 0 (value unchanged) or with the
/// leading x/z bit (already unknown).
pub fn decode_bits(bits: &[u8]) -> Decoded {
    if bits.iter().any(|&b| b != b'0' && b != b'1') {
        return Decoded::Unknown;
    }
    let first_one = match bits.iter().position(|&b| b == b'1') {
        Some(i) => i,
        None => return Decoded::Int(0),
    };
    let significant = &bits[first_one..];
    if significant.len() <= 63 {
        let v = significant
            .iter()
            .fold(0i64, |acc, &b| (acc << 1) | i64::from(b - b'0'));
        Decoded::Int(v)
    } else {
        Decoded::Wide(BigUint::parse_bytes(significant, 2).expect("validated binary digits"))
    }
}

/// Decode a raw change to a signed cell: the unsigned binary value, or -1
/// when any bit is `x`/`z`.
pub fn decode_value(raw: &FourStateValue, width: u32) -> Result<i64, DecodeError> {
    let bits = match raw {
        FourStateValue::Bits(b) => b.as_bytes(),
        FourStateValue::Real(_) => return Err(DecodeError::Real),
    };
    if bits.len() > width as usize {
        return Err(DecodeError::TooWide { len: bits.len(), width });
    }
    match decode_bits(bits) {
        Decoded::Unknown => Ok(-1),
        Decoded::Int(v) => Ok(v),
        Decoded::Wide(v) => Err(DecodeError::Overflow(v.bits() as usize)),
    }
}
