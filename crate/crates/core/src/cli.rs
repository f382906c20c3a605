// SPDX-License-Identifier: Apache-2.0

use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use vcdframe::analysis::{self, PredicateKind, PredicateSpec, UnknownPolicy};
use vcdframe::batch::{self, BatchInput};
use vcdframe::store::{self, ExportFormat};
use vcdframe::{BuildOptions, Frame, WidePolicy};

const EXIT_OK: u8 = 0;
const EXIT_FAILURE: u8 = 1;
const EXIT_USAGE: u8 = 2;

/// Convert VCD traces into register-by-time frames and analyse them.
#[derive(Parser)]
#[command(name = "vcdframe", version)]
pub struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone, Copy)]
struct BuildArgs {
    /// Keep aliased declarations as rows of their own.
    #[arg(long)]
    keep_aliases: bool,
    /// Handling of values that do not fit a signed 64-bit cell.
    #[arg(long, value_enum, default_value_t = WidePolicy::Error)]
    wide_policy: WidePolicy,
}

impl BuildArgs {
    fn options(self) -> BuildOptions {
        BuildOptions { keep_aliases: self.keep_aliases, wide_policy: self.wide_policy }
    }
}

#[derive(Args, Clone, Copy)]
struct JobsArg {
    /// Worker threads (defaults to the number of cores).
    #[arg(long, short, env = "VCDFRAME_JOBS", value_parser = clap::value_parser!(u32).range(1..))]
    jobs: Option<u32>,
}

impl JobsArg {
    fn get(self) -> usize {
        match self.jobs {
            Some(n) => n as usize,
            None => std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1),
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Convert VCD files to Parquet or CSV frames.
    Convert {
        /// VCD files or glob patterns.
        #[arg(required = true)]
        inputs: Vec<String>,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, value_enum)]
        format: ExportFormat,
        /// Write timepoints as rows and registers as columns.
        #[arg(long)]
        transpose: bool,
        #[command(flatten)]
        jobs: JobsArg,
        #[command(flatten)]
        build: BuildArgs,
    },
    /// Summarise a trace or exported frame.
    Info {
        file: PathBuf,
        #[arg(long)]
        json: bool,
        #[command(flatten)]
        build: BuildArgs,
    },
    /// Registers the testbench ever drives to a positive value.
    Coverage {
        file: PathBuf,
        #[arg(long)]
        json: bool,
        #[command(flatten)]
        build: BuildArgs,
    },
    /// Registers holding multiples of K below 2^B at every timepoint.
    Predicate {
        file: PathBuf,
        #[arg(long, default_value_t = 32, value_parser = clap::value_parser!(u64).range(1..))]
        multiple_of: u64,
        #[arg(long, default_value_t = 32, value_parser = clap::value_parser!(u32).range(1..=64))]
        below_bits: u32,
        /// How -1 cells evaluate.
        #[arg(long, value_enum, default_value_t = UnknownPolicy::Fail)]
        unknown: UnknownPolicy,
        #[arg(long)]
        json: bool,
        #[command(flatten)]
        build: BuildArgs,
    },
    /// First information flow into each shadow-instrumented register.
    Flows {
        /// VCD files or glob patterns, one file per taint source.
        #[arg(required = true)]
        inputs: Vec<String>,
        #[arg(long, default_value = "shadow_")]
        prefix: String,
        /// How -1 cells in shadow rows evaluate.
        #[arg(long, value_enum, default_value_t = UnknownPolicy::Pass)]
        unknown: UnknownPolicy,
        #[arg(long)]
        json: bool,
        #[command(flatten)]
        jobs: JobsArg,
        #[command(flatten)]
        build: BuildArgs,
    },
}

pub fn run(cli: Cli) -> u8 {
    let result = match cli.command {
        Command::Convert { inputs, out, format, transpose, jobs, build } => {
            convert(&inputs, &out, format, transpose, jobs.get(), &build.options())
        }
        Command::Info { file, json, build } => load(&file, &build.options()).map(|frame| {
            let info = store::frame_info(&frame);
            if json {
                println!("{}", serde_json::to_string_pretty(&info).expect("plain data serializes"));
            } else {
                println!("{info}");
            }
            EXIT_OK
        }),
        Command::Coverage { file, json, build } => load(&file, &build.options()).map(|frame| {
            let counts = analysis::coverage(&frame);
            if json {
                println!("{}", analysis::pairs_json(&counts));
            } else {
                for (name, count) in &counts {
                    println!("{name}\t{count}");
                }
            }
            EXIT_OK
        }),
        Command::Predicate { file, multiple_of, below_bits, unknown, json, build } => {
            load(&file, &build.options()).map(|frame| {
                let pred = PredicateSpec::new(
                    PredicateKind::Aligned { multiple: multiple_of, bound_bits: below_bits },
                    unknown,
                );
                let names = analysis::holds_always(&frame, &pred);
                if json {
                    println!("{}", analysis::names_json(&names));
                } else {
                    for name in &names {
                        println!("{name}");
                    }
                }
                EXIT_OK
            })
        }
        Command::Flows { inputs, prefix, unknown, json, jobs, build } => {
            flows(&inputs, &prefix, unknown, json, jobs.get(), &build.options())
        }
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_FAILURE
        }
    }
}

fn report_warnings(name: &str, frame: &Frame) {
    for w in frame.warnings() {
        log::warn!("{name}: {w}");
    }
}

/// Exported frames are recognised by extension; anything else is parsed as VCD.
fn load(path: &Path, options: &BuildOptions) -> vcdframe::Result<Frame> {
    let ext = path.extension().and_then(|e| e.to_str()).map(str::to_ascii_lowercase);
    let frame = match ext.as_deref() {
        Some("parquet" | "pq" | "csv") => store::read_frame(path)?,
        _ => vcdframe::load_vcd(path, options)?,
    };
    report_warnings(&path.display().to_string(), &frame);
    Ok(frame)
}

fn expand(inputs: &[String]) -> Result<Vec<BatchInput>, u8> {
    match batch::expand_inputs(inputs) {
        Ok(paths) if paths.is_empty() => {
            eprintln!("error: no inputs");
            Err(EXIT_USAGE)
        }
        Ok(paths) => Ok(paths.into_iter().map(BatchInput::Path).collect()),
        Err(e) => {
            eprintln!("error: {e}");
            Err(EXIT_USAGE)
        }
    }
}

fn convert(
    inputs: &[String],
    out: &Path,
    format: ExportFormat,
    transpose: bool,
    jobs: usize,
    options: &BuildOptions,
) -> vcdframe::Result<u8> {
    let inputs = match expand(inputs) {
        Ok(i) => i,
        Err(code) => return Ok(code),
    };
    fs::create_dir_all(out)?;
    let results = batch::convert_each(&inputs, options, jobs, |name, frame| {
        report_warnings(name, &frame);
        let path = out.join(format!("{name}.{}", format.extension()));
        let bytes = if transpose {
            store::write_transposed(&frame, &path, format)?
        } else {
            store::write_frame(&frame, &path, format)?
        };
        Ok((frame.n_rows(), frame.n_cols(), bytes))
    })?;
    let mut code = EXIT_OK;
    for (name, r) in &results {
        match r {
            Ok((rows, cols, bytes)) => println!("{name}: rows={rows} cols={cols} bytes={bytes}"),
            Err(e) => {
                eprintln!("{name}: {}: {}", e.kind, e.message);
                code = EXIT_FAILURE;
            }
        }
    }
    Ok(code)
}

fn flows(
    inputs: &[String],
    prefix: &str,
    unknown: UnknownPolicy,
    json: bool,
    jobs: usize,
    options: &BuildOptions,
) -> vcdframe::Result<u8> {
    let inputs = match expand(inputs) {
        Ok(i) => i,
        Err(code) => return Ok(code),
    };
    let result = batch::flow_pipeline_with(&inputs, options, jobs, prefix, unknown)?;
    if json {
        println!("{}", analysis::flows_json(&result.flows));
    } else {
        for flow in &result.flows {
            println!("{flow}");
        }
    }
    for e in &result.errors {
        eprintln!("{}: {}: {}", e.name, e.kind, e.message);
    }
    Ok(if result.errors.is_empty() { EXIT_OK } else { EXIT_FAILURE })
}
