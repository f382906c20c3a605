// SPDX-License-Identifier: Apache-2.0

mod common;

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use common::FIXTURE;
use vcdframe::analysis::{flows_json, names_json, pairs_json};
use vcdframe::batch::{flow_pipeline, BatchInput};
use vcdframe::{coverage, holds_always, load_vcd, BuildOptions, PredicateSpec};

fn vcdframe(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_vcdframe"))
        .args(args)
        .env_remove("VCDFRAME_JOBS")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn write_fixture(dir: &Path) -> String {
    let p = dir.join("fixture.vcd");
    fs::write(&p, FIXTURE).unwrap();
    p.display().to_string()
}

#[test]
fn convert_to_csv() {
    let dir = tempfile::tempdir().unwrap();
    let input = write_fixture(dir.path());
    let out = dir.path().join("o");
    let o = vcdframe(&["convert", &input, "--out", out.to_str().unwrap(), "--format", "csv"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(
        fs::read_to_string(out.join("fixture.csv")).unwrap(),
        "register,#0,#5,#10\ntop.clk,0,1,0\ntop.bus,-1,10,10\n"
    );
    assert_eq!(stdout(&o), "fixture: rows=2 cols=3 bytes=50\n");
}

#[test]
fn convert_parquet_then_analyse_exported_frame() {
    let dir = tempfile::tempdir().unwrap();
    let input = write_fixture(dir.path());
    let out = dir.path().join("o");
    let o = vcdframe(&["convert", &input, "--out", out.to_str().unwrap(), "--format", "parquet", "-j", "2"]);
    assert_eq!(o.status.code(), Some(0));
    let pq = out.join("fixture.parquet");
    let from_vcd = vcdframe(&["coverage", &input, "--json"]);
    let from_pq = vcdframe(&["coverage", pq.to_str().unwrap(), "--json"]);
    assert_eq!(stdout(&from_vcd), stdout(&from_pq));
}

#[test]
fn usage_errors_exit_2() {
    let o = vcdframe(&["convert", "x.vcd", "--bogus"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("Usage"));

    let dir = tempfile::tempdir().unwrap();
    let pattern = format!("{}/*.vcd", dir.path().display());
    let o = vcdframe(&["convert", &pattern, "--out", "o", "--format", "csv"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("no inputs"));

    let o = vcdframe(&["flows", &pattern]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn failures_exit_1() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.vcd");
    fs::write(&bad, "$var wire 1 ! a $end $enddefinitions $end #0 1?").unwrap();
    let o = vcdframe(&["coverage", bad.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("undeclared"));

    let good = write_fixture(dir.path());
    let out = dir.path().join("o");
    let o = vcdframe(&["convert", &good, bad.to_str().unwrap(), "--out", out.to_str().unwrap(), "--format", "csv"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(out.join("fixture.csv").exists());
    assert!(String::from_utf8_lossy(&o.stderr).contains("bad: UnknownIdCode"));
}

#[test]
fn analyses_match_library_json() {
    let dir = tempfile::tempdir().unwrap();
    let input = write_fixture(dir.path());
    let frame = load_vcd(&input, &BuildOptions::default()).unwrap();

    let o = vcdframe(&["coverage", &input, "--json"]);
    assert_eq!(stdout(&o), pairs_json(&coverage(&frame)) + "\n");
    let o = vcdframe(&["coverage", &input]);
    assert_eq!(stdout(&o), "top.clk\t1\ntop.bus\t2\n");

    let o = vcdframe(&["predicate", &input, "--json"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), names_json(&holds_always(&frame, &PredicateSpec::word_address())) + "\n");

    let o = vcdframe(&["predicate", &input, "--multiple-of", "1", "--below-bits", "1", "--unknown", "pass"]);
    assert_eq!(stdout(&o), "top.clk\n");

    let o = vcdframe(&["predicate", &input, "--multiple-of", "0"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn info_output() {
    let dir = tempfile::tempdir().unwrap();
    let input = write_fixture(dir.path());
    let o = vcdframe(&["info", &input, "--json"]);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["n_registers"], 2);
    assert_eq!(v["n_timepoints"], 3);
    assert_eq!(v["n_unknown_cells"], 1);
    assert_eq!(v["first_col"], "#0");
    assert_eq!(v["last_col"], "#10");
    let o = vcdframe(&["info", &input]);
    assert!(stdout(&o).contains("registers:         2"));
}

const FLOW_DOCS: [(&str, &str); 3] = [
    (
        "key",
        "$scope module aker $end $var reg 1 ! shadow_out $end $var reg 1 \" shadow_ack $end $var reg 8 # out $end \
         $upscope $end $enddefinitions $end #0 0! 0\" b0 # #12 1! #20 1\"",
    ),
    (
        "addr",
        "$scope module aker $end $var reg 1 ! shadow_out $end $var reg 1 \" shadow_ack $end $upscope $end \
         $enddefinitions $end #0 0! 0\" #4 1\"",
    ),
    (
        "valid",
        "$scope module aker $end $var reg 1 ! shadow_out $end $upscope $end $enddefinitions $end #0 0! #8 0!",
    ),
];

#[test]
fn flows_over_glob() {
    let dir = tempfile::tempdir().unwrap();
    let vcds = dir.path().join("vcds");
    fs::create_dir(&vcds).unwrap();
    for (name, doc) in FLOW_DOCS {
        fs::write(vcds.join(format!("{name}.vcd")), doc).unwrap();
    }
    let pattern = format!("{}/*.vcd", vcds.display());
    let o = vcdframe(&["flows", &pattern, "--prefix", "shadow_", "--json"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let expected = serde_json::json!([
        {"source": "addr", "sink": "aker.ack", "shadow_row": "aker.shadow_ack", "first_col": "#4"},
        {"source": "key", "sink": "aker.out", "shadow_row": "aker.shadow_out", "first_col": "#12"},
        {"source": "key", "sink": "aker.ack", "shadow_row": "aker.shadow_ack", "first_col": "#20"},
    ]);
    let got: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(got, expected);

    let paths: Vec<BatchInput> = ["addr", "key", "valid"]
        .iter()
        .map(|n| BatchInput::Path(vcds.join(format!("{n}.vcd"))))
        .collect();
    let lib = flow_pipeline(&paths, &BuildOptions::default(), 1, "shadow_").unwrap();
    assert_eq!(stdout(&o), flows_json(&lib.flows) + "\n");

    let o = Command::new(env!("CARGO_BIN_EXE_vcdframe"))
        .args(["flows", &pattern])
        .env("VCDFRAME_JOBS", "3")
        .output()
        .unwrap();
    assert_eq!(stdout(&o), "addr -> aker.ack at #4 (aker.shadow_ack)\nkey -> aker.out at #12 (aker.shadow_out)\nkey -> aker.ack at #20 (aker.shadow_ack)\n");
}
