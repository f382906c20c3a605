// SPDX-License-Identifier: Apache-2.0

//! Analyses over frames: testbench coverage, universal value predicates and
//! shadow-register information flows.

use std::fmt;

use indexmap::IndexMap;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::frame::{Frame, UNKNOWN};

/// How a -1 cell evaluates under a predicate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, clap::ValueEnum)]
pub enum UnknownPolicy {
    Fail,
    Pass,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PredicateKind {
    Nonzero,
    Positive,
    /// `m % multiple == 0 && m < 2^bound_bits`.
    Aligned { multiple: u64, bound_bits: u32 },
    Below(i64),
    MultipleOf(u64),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct PredicateSpec {
    pub kind: PredicateKind,
    pub unknown_policy: UnknownPolicy,
}

impl PredicateSpec {
    pub fn new(kind: PredicateKind, unknown_policy: UnknownPolicy) -> Self {
        PredicateSpec { kind, unknown_policy }
    }

    /// Any nonzero value. Unknown cells pass, since -1 is itself nonzero.
    pub fn nonzero() -> Self {
        Self::new(PredicateKind::Nonzero, UnknownPolicy::Pass)
    }

    /// Word-aligned addresses: multiples of 32 below 2^32.
    pub fn word_address() -> Self {
        Self::aligned(32, 32)
    }

    /// Unknown cells fail.
    pub fn aligned(multiple: u64, bound_bits: u32) -> Self {
        Self::new(PredicateKind::Aligned { multiple, bound_bits }, UnknownPolicy::Fail)
    }

    pub fn with_unknown(mut self, policy: UnknownPolicy) -> Self {
        self.unknown_policy = policy;
        self
    }

    pub fn eval(&self, cell: i64) -> bool {
        if cell == UNKNOWN {
            return self.unknown_policy == UnknownPolicy::Pass;
        }
        match self.kind {
            PredicateKind::Nonzero => cell != 0,
            PredicateKind::Positive => cell > 0,
            PredicateKind::Aligned { multiple, bound_bits } => {
                let m = cell as u64;
                cell >= 0
                    && m.checked_rem(multiple) == Some(0)
                    && (bound_bits >= 64 || m < (1u64 << bound_bits))
            }
            PredicateKind::Below(n) => cell < n,
            PredicateKind::MultipleOf(k) => cell >= 0 && (cell as u64).checked_rem(k) == Some(0),
        }
    }
}

/// Count of columns in which each register is strictly positive. Registers
/// never positive are left out; unknown cells never count.
pub fn coverage(frame: &Frame) -> IndexMap<String, usize> {
    frame
        .rows()
        .filter_map(|(name, cells)| {
            let count = cells.iter().filter(|&&c| c > 0).count();
            (count > 0).then(|| (name.to_string(), count))
        })
        .collect()
}

/// Registers whose every cell satisfies `pred`, in row order.
pub fn holds_always(frame: &Frame, pred: &PredicateSpec) -> Vec<String> {
    frame
        .rows()
        .filter(|(_, cells)| cells.iter().all(|&c| pred.eval(c)))
        .map(|(name, _)| name.to_string())
        .collect()
}

/// Earliest column label at which each register satisfies `pred`.
pub fn first_match(frame: &Frame, pred: &PredicateSpec) -> IndexMap<String, String> {
    frame
        .rows()
        .filter_map(|(name, cells)| {
            let col = cells.iter().position(|&c| pred.eval(c))?;
            Some((name.to_string(), frame.col_label(col)))
        })
        .collect()
}

/// A flow from a tainted source register into `sink`, first observed at `first_col`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct FlowReport {
    pub source: String,
    pub sink: String,
    pub shadow_row: String,
    pub first_col: String,
}

impl fmt::Display for FlowReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} -> {} at {} ({})", self.source, self.sink, self.first_col, self.shadow_row)
    }
}

/// Split `name` into scope part (with trailing dot) and final component.
fn split_last(name: &str) -> (&str, &str) {
    match name.rfind('.') {
        Some(i) => name.split_at(i + 1),
        None => ("", name),
    }
}

/// Flows recorded by the shadow rows of one frame. Errors with
/// [`Error::NoShadowRows`] when no row's final name component carries `prefix`.
pub fn frame_flows(
    source: &str,
    frame: &Frame,
    prefix: &str,
    unknown_policy: UnknownPolicy,
) -> Result<Vec<FlowReport>> {
    let pred = PredicateSpec::nonzero().with_unknown(unknown_policy);
    let mut any_shadow = false;
    let mut flows = Vec::new();
    for (name, cells) in frame.rows() {
        let (scope, last) = split_last(name);
        let Some(base) = last.strip_prefix(prefix) else {
            continue;
        };
        any_shadow = true;
        if base.is_empty() {
            log::warn!("{source}: shadow row {name} has nothing after the prefix; skipped");
            continue;
        }
        let Some(col) = cells.iter().position(|&c| pred.eval(c)) else {
            continue;
        };
        flows.push(FlowReport {
            source: source.to_string(),
            sink: format!("{scope}{base}"),
            shadow_row: name.to_string(),
            first_col: frame.col_label(col),
        });
    }
    if !any_shadow {
        return Err(Error::NoShadowRows { source_name: source.to_string() });
    }
    Ok(flows)
}

/// Information flows across a set of traces, one trace per tainted source.
///
/// Any row whose final name component starts with `prefix` is a shadow
/// register; its first nonzero column marks when the source's data reached
/// the register named by the rest of the component. Unknown cells count as
/// nonzero.
pub fn shadow_flows(frames: &IndexMap<String, Frame>, prefix: &str) -> Result<Vec<FlowReport>> {
    shadow_flows_with(frames, prefix, UnknownPolicy::Pass)
}

pub fn shadow_flows_with(
    frames: &IndexMap<String, Frame>,
    prefix: &str,
    unknown_policy: UnknownPolicy,
) -> Result<Vec<FlowReport>> {
    let mut out = Vec::new();
    for (source, frame) in frames {
        out.extend(frame_flows(source, frame, prefix, unknown_policy)?);
    }
    Ok(out)
}

#[derive(Serialize)]
struct Entry<'a, V: Serialize> {
    register: &'a str,
    value: V,
}

/// `[{"register": ..., "value": ...}, ...]`, pretty-printed.
pub fn pairs_json<V: Serialize>(map: &IndexMap<String, V>) -> String {
    let entries: Vec<Entry<'_, &V>> =
        map.iter().map(|(k, v)| Entry { register: k, value: v }).collect();
    serde_json::to_string_pretty(&entries).expect("plain data serializes")
}

/// `["name", ...]`, pretty-printed.
pub fn names_json(names: &[String]) -> String {
    serde_json::to_string_pretty(names).expect("plain data serializes")
}

/// `[{"source", "sink", "shadow_row", "first_col"}, ...]`, pretty-printed.
pub fn flows_json(flows: &[FlowReport]) -> String {
    serde_json::to_string_pretty(flows).expect("plain data serializes")
}
