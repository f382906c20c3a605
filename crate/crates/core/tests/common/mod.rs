// SPDX-License-Identifier: Apache-2.0

//! Generators and brute-force reference implementations shared by the
//! integration tests. Nothing here calls into the crate's parser.

#![allow(dead_code)]

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::io::{self, Read};

use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use vcdframe::Frame;

pub const FIXTURE: &str = "$timescale 1 ns $end
$scope module top $end
$var wire 1 ! clk $end
$var wire 4 \" bus $end
$upscope $end
$enddefinitions $end
#0
$dumpvars
0!
bx \"
$end
#5
1!
b1010 \"
#10
0!
";

/// Reader that only implements `Read`: no seeking, short reads.
pub struct ForwardOnly<R> {
    inner: R,
    chunk: usize,
}

impl<R: Read> ForwardOnly<R> {
    pub fn new(inner: R, chunk: usize) -> Self {
        ForwardOnly { inner, chunk }
    }
}

impl<R: Read> Read for ForwardOnly<R> {
    fn read(&mut self, buf: &mut [u8]) -> io::Result<usize> {
        let n = buf.len().min(self.chunk);
        self.inner.read(&mut buf[..n])
    }
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

const ID_CHARS: &[u8] = b"!\"#$%&'()*+,-./0123456789:;<=>?@ABCDEFGHIJKLMNOPQRSTUVWXYZ[\\]^_`abcdefghijklmnopqrstuvwxyz{|}~";

/// Random small VCD document: up to 8 signals of width up to 8, up to 32
/// timestamps, each signal changing with probability `density` per step,
/// bits drawn from {0, 1, x, z}.
pub fn random_vcd(rng: &mut impl Rng, density: f64) -> String {
    let n_ids = rng.gen_range(1..=8usize);
    let mut codes: Vec<String> = Vec::new();
    while codes.len() < n_ids {
        let len = rng.gen_range(1..=2);
        let code: String = (0..len)
            .map(|_| ID_CHARS[rng.gen_range(0..ID_CHARS.len())] as char)
            .collect();
        if !code.starts_with('$') && !codes.contains(&code) {
            codes.push(code);
        }
    }
    let widths: Vec<usize> = (0..n_ids).map(|_| rng.gen_range(1..=8)).collect();

    let mut doc = String::new();
    if rng.gen_bool(0.7) {
        doc.push_str("$date today $end\n$timescale 1 ps $end\n");
    }
    doc.push_str("$scope module top $end\n");
    for (i, code) in codes.iter().enumerate() {
        let kind = if rng.gen_bool(0.5) { "wire" } else { "reg" };
        writeln!(doc, "$var {kind} {} {code} sig{i} $end", widths[i]).unwrap();
    }
    if rng.gen_bool(0.3) {
        // Aliases in a nested scope.
        doc.push_str("$scope module inner $end\n");
        for (i, code) in codes.iter().enumerate() {
            if rng.gen_bool(0.5) {
                writeln!(doc, "$var wire {} {code} alias{i} $end", widths[i]).unwrap();
            }
        }
        doc.push_str("$upscope $end\n");
    }
    doc.push_str("$upscope $end\n$enddefinitions $end\n");

    let n_steps = rng.gen_range(1..=32usize);
    let mut time = 0u64;
    for step in 0..n_steps {
        let implicit_zero = step == 0 && rng.gen_bool(0.2);
        if !implicit_zero {
            writeln!(doc, "#{time}").unwrap();
            if rng.gen_bool(0.1) {
                writeln!(doc, "#{time}").unwrap();
            }
        }
        let dump = step == 0 && rng.gen_bool(0.5);
        if dump {
            doc.push_str("$dumpvars\n");
        }
        for (i, code) in codes.iter().enumerate() {
            if !(dump || rng.gen_bool(density)) {
                continue;
            }
            let len = if rng.gen_bool(0.8) { widths[i] } else { rng.gen_range(1..=widths[i]) };
            let bits: String = (0..len)
                .map(|_| {
                    let c = *b"01xz".choose(rng).unwrap() as char;
                    if rng.gen_bool(0.05) { c.to_ascii_uppercase() } else { c }
                })
                .collect();
            if widths[i] == 1 && rng.gen_bool(0.7) {
                writeln!(doc, "{bits}{code}").unwrap();
            } else {
                writeln!(doc, "b{bits} {code}").unwrap();
            }
        }
        if dump {
            doc.push_str("$end\n");
        }
        if rng.gen_bool(0.05) {
            doc.push_str("$comment b1 ignored $end\n");
        }
        time += rng.gen_range(1..=5);
    }
    doc
}

/// Reference conversion: load the whole document, replay every change into
/// a table keyed by time, then keep the times at which something changed.
/// Returns `(row_names, times, row-major cells)`, or `None` if no change.
pub fn naive_frame(doc: &str) -> Option<(Vec<String>, Vec<u64>, Vec<i64>)> {
    let tokens: Vec<&str> = doc.split_whitespace().collect();
    let mut i = 0;
    let mut scopes: Vec<String> = Vec::new();
    let mut rows: Vec<(String, String)> = Vec::new(); // (name, id)
    let mut seen_ids: Vec<String> = Vec::new();
    while tokens[i] != "$enddefinitions" {
        match tokens[i] {
            "$scope" => {
                scopes.push(tokens[i + 2].to_string());
                i += 4;
            }
            "$upscope" => {
                scopes.pop();
                i += 2;
            }
            "$var" => {
                let id = tokens[i + 3].to_string();
                let name = format!("{}.{}", scopes.join("."), tokens[i + 4]);
                if !seen_ids.contains(&id) {
                    seen_ids.push(id.clone());
                    rows.push((name, id));
                }
                i += 6;
            }
            _ => {
                while tokens[i] != "$end" {
                    i += 1;
                }
                i += 1;
            }
        }
    }
    i += 2;

    let mut table: BTreeMap<u64, BTreeMap<String, String>> = BTreeMap::new();
    let mut time = 0u64;
    while i < tokens.len() {
        let tok = tokens[i];
        i += 1;
        if let Some(t) = tok.strip_prefix('#') {
            time = t.parse().unwrap();
        } else if tok == "$comment" {
            while tokens[i] != "$end" {
                i += 1;
            }
            i += 1;
        } else if tok.starts_with('$') {
            // dump block open/close
        } else if let Some(bits) = tok.strip_prefix(['b', 'B']) {
            table.entry(time).or_default().insert(tokens[i].to_string(), bits.to_lowercase());
            i += 1;
        } else {
            let (v, id) = tok.split_at(1);
            table.entry(time).or_default().insert(id.to_string(), v.to_lowercase());
        }
    }
    if table.is_empty() {
        return None;
    }

    let times: Vec<u64> = table.keys().copied().collect();
    let mut current: BTreeMap<&str, i64> = BTreeMap::new();
    let mut columns: Vec<Vec<i64>> = Vec::new();
    for changes in table.values() {
        for (id, bits) in changes {
            current.insert(id.as_str(), naive_decode(bits));
        }
        columns.push(rows.iter().map(|(_, id)| *current.get(id.as_str()).unwrap_or(&-1)).collect());
    }
    let mut cells = Vec::new();
    for r in 0..rows.len() {
        for col in &columns {
            cells.push(col[r]);
        }
    }
    Some((rows.into_iter().map(|(n, _)| n).collect(), times, cells))
}

fn naive_decode(bits: &str) -> i64 {
    if bits.chars().all(|c| c == '0' || c == '1') {
        i64::from_str_radix(bits, 2).unwrap()
    } else {
        -1
    }
}

const NAME_PARTS: &[&str] = &["top", "core", "pc", "a,b", "q\"uote", "mem_la", "shadow_x", "sp ace", "ünï"];

/// Random valid frame with mixed cell magnitudes.
pub fn random_frame(rng: &mut impl Rng) -> Frame {
    let n_rows = rng.gen_range(1..=10usize);
    let n_cols = rng.gen_range(1..=12usize);
    let mut names = Vec::new();
    while names.len() < n_rows {
        let depth = rng.gen_range(1..=3);
        let name: Vec<&str> = (0..depth).map(|_| *NAME_PARTS.choose(rng).unwrap()).collect();
        let name = format!("{}{}", name.join("."), rng.gen_range(0..100));
        if !names.contains(&name) {
            names.push(name);
        }
    }
    let mut times = Vec::new();
    let mut t = rng.gen_range(0..3u64);
    for _ in 0..n_cols {
        times.push(t);
        t += rng.gen_range(1..1000);
    }
    let cells = (0..n_rows * n_cols).map(|_| random_cell(rng)).collect();
    Frame::new(names, times, cells).unwrap()
}

pub fn random_cell(rng: &mut impl Rng) -> i64 {
    match rng.gen_range(0..8) {
        0 => -1,
        1 => 0,
        2 => rng.gen_range(1..64),
        3 => 32 * rng.gen_range(0..(1i64 << 27)),
        4 => (1i64 << 32) - 32 * rng.gen_range(0..3),
        5 => rng.gen_range(0..i64::MAX),
        _ => 32 * rng.gen_range(0..4),
    }
}

/// Membership in {m : m >= 0, k | m, m < 2^b} by 128-bit arithmetic; -1 fails.
pub fn brute_aligned(cell: i64, k: i64, bits: u32) -> bool {
    let m = cell as i128;
    m >= 0 && m % (k as i128) == 0 && m < (1i128 << bits)
}
