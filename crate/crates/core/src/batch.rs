// SPDX-License-Identifier: Apache-2.0

//! Parallel conversion of many traces on one machine.
//!
//! Items are independent: each worker parses one document, hands its frame
//! to a consumer, and keeps only the consumer's result. At most `jobs`
//! frames are resident at once. Results come back in input order whatever
//! the completion order.

use std::collections::HashSet;
use std::path::{Path, PathBuf};

use indexmap::IndexMap;
use rayon::prelude::*;
use serde::Serialize;

use crate::analysis::{frame_flows, FlowReport, UnknownPolicy};
use crate::build::{frame_from_text, load_vcd, BuildOptions};
use crate::error::{Error, Result};
use crate::frame::Frame;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum BatchInput {
    /// Named by the file stem.
    Path(PathBuf),
    Text { name: String, text: String },
}

impl BatchInput {
    pub fn name(&self) -> String {
        match self {
            BatchInput::Path(p) => p
                .file_stem()
                .map(|s| s.to_string_lossy().into_owned())
                .unwrap_or_else(|| p.display().to_string()),
            BatchInput::Text { name, .. } => name.clone(),
        }
    }

    fn build(&self, options: &BuildOptions) -> Result<Frame> {
        match self {
            BatchInput::Path(p) => load_vcd(p, options),
            BatchInput::Text { text, .. } => frame_from_text(text, options),
        }
    }
}

impl From<PathBuf> for BatchInput {
    fn from(p: PathBuf) -> Self {
        BatchInput::Path(p)
    }
}

/// Failure of one item, recorded without stopping the batch.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ItemError {
    pub name: String,
    pub kind: String,
    pub message: String,
}

impl ItemError {
    fn new(name: &str, err: &Error) -> Self {
        ItemError { name: name.to_string(), kind: err.kind().to_string(), message: err.to_string() }
    }
}

/// Per-input outcome, in input order.
pub type BatchResults<T> = IndexMap<String, std::result::Result<T, ItemError>>;

fn check_names(inputs: &[BatchInput]) -> Result<Vec<String>> {
    let names: Vec<String> = inputs.iter().map(BatchInput::name).collect();
    let mut seen = HashSet::with_capacity(names.len());
    for n in &names {
        if !seen.insert(n.as_str()) {
            return Err(Error::DuplicateName(n.clone()));
        }
    }
    Ok(names)
}

fn pool(jobs: usize) -> Result<rayon::ThreadPool> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(jobs.max(1))
        .thread_name(|i| format!("vcdframe-{i}"))
        .build()
        .map_err(|e| Error::Io(std::io::Error::other(e)))
}

/// Convert every input on `jobs` workers and pass each frame to `consume`
/// on the worker that built it. Only the consumer's output is kept.
pub fn convert_each<T, F>(
    inputs: &[BatchInput],
    options: &BuildOptions,
    jobs: usize,
    consume: F,
) -> Result<BatchResults<T>>
where
    T: Send,
    F: Fn(&str, Frame) -> Result<T> + Sync,
{
    let names = check_names(inputs)?;
    let outcomes: Vec<std::result::Result<T, ItemError>> = pool(jobs)?.install(|| {
        inputs
            .par_iter()
            .zip(names.par_iter())
            .with_max_len(1)
            .map(|(input, name)| {
                input
                    .build(options)
                    .and_then(|frame| consume(name, frame))
                    .map_err(|e| ItemError::new(name, &e))
            })
            .collect()
    });
    Ok(names.into_iter().zip(outcomes).collect())
}

/// Convert every input to a frame.
pub fn convert_all(inputs: &[BatchInput], options: &BuildOptions, jobs: usize) -> Result<BatchResults<Frame>> {
    convert_each(inputs, options, jobs, |_, frame| Ok(frame))
}

#[derive(Serialize)]
#[serde(untagged)]
enum ItemJson<'a, T: Serialize> {
    Ok { name: &'a str, result: &'a T },
    Err { name: &'a str, error: &'a ItemError },
}

/// Stable JSON rendering of batch results.
pub fn results_json<T: Serialize>(results: &BatchResults<T>) -> String {
    let items: Vec<ItemJson<'_, T>> = results
        .iter()
        .map(|(name, r)| match r {
            Ok(result) => ItemJson::Ok { name, result },
            Err(error) => ItemJson::Err { name, error },
        })
        .collect();
    serde_json::to_string_pretty(&items).expect("plain data serializes")
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct FlowPipelineResult {
    pub flows: Vec<FlowReport>,
    pub errors: Vec<ItemError>,
}

/// Shadow-register flows over many traces, each input named by its taint
/// source. Parse failures and traces without shadow rows become error
/// records; the flows of every other input are still reported.
pub fn flow_pipeline(
    inputs: &[BatchInput],
    options: &BuildOptions,
    jobs: usize,
    prefix: &str,
) -> Result<FlowPipelineResult> {
    flow_pipeline_with(inputs, options, jobs, prefix, UnknownPolicy::Pass)
}

pub fn flow_pipeline_with(
    inputs: &[BatchInput],
    options: &BuildOptions,
    jobs: usize,
    prefix: &str,
    unknown_policy: UnknownPolicy,
) -> Result<FlowPipelineResult> {
    let results = convert_each(inputs, options, jobs, |name, frame| {
        frame_flows(name, &frame, prefix, unknown_policy)
    })?;
    let mut out = FlowPipelineResult::default();
    for (_, r) in results {
        match r {
            Ok(flows) => out.flows.extend(flows),
            Err(e) => out.errors.push(e),
        }
    }
    Ok(out)
}

fn is_pattern(s: &str) -> bool {
    s.contains(['*', '?', '['])
}

/// Expand each pattern into paths. Glob matches come in lexicographic order;
/// plain paths pass through unchanged.
pub fn expand_inputs<S: AsRef<str>>(patterns: &[S]) -> Result<Vec<PathBuf>> {
    let mut out = Vec::new();
    for pattern in patterns {
        let pattern = pattern.as_ref();
        if !is_pattern(pattern) || Path::new(pattern).exists() {
            out.push(PathBuf::from(pattern));
            continue;
        }
        let paths = glob::glob(pattern)
            .map_err(|e| Error::Io(std::io::Error::new(std::io::ErrorKind::InvalidInput, e)))?;
        let mut matched: Vec<PathBuf> = paths
            .collect::<std::result::Result<_, _>>()
            .map_err(|e| Error::Io(e.into()))?;
        matched.sort();
        out.extend(matched);
    }
    Ok(out)
}
