// SPDX-License-Identifier: Apache-2.0

//! Convert value change dump traces into register-by-time frames and
//! analyse them.
//!
//! A [`Frame`] has one row per register (dotted hierarchical name) and one
//! column per timestamp at which something changed, labelled `#<time>`.
//! Cells hold the register's value at that time, or -1 when any bit is `x`
//! or `z` or the register has not been assigned yet.
//!
//! ```
//! use vcdframe::{frame_from_text, BuildOptions};
//!
//! let doc = "$scope module top $end $var wire 4 ! bus $end $upscope $end \
//!            $enddefinitions $end #0 bx ! #5 b1010 !";
//! let frame = frame_from_text(doc, &BuildOptions::default()).unwrap();
//! assert_eq!(frame.row_names(), ["top.bus"]);
//! assert_eq!(frame.col_labels(), ["#0", "#5"]);
//! assert_eq!(frame.row(0), &[-1, 10]);
//! ```

pub mod analysis;
pub mod batch;
pub mod build;
pub mod error;
pub mod frame;
pub mod store;
pub mod vcd;

pub use analysis::{
    coverage, first_match, holds_always, shadow_flows, FlowReport, PredicateKind, PredicateSpec,
    UnknownPolicy,
};
pub use batch::{convert_all, flow_pipeline, BatchInput, FlowPipelineResult, ItemError};
pub use build::{build_frame, frame_from_text, load_vcd, BuildOptions, WidePolicy};
pub use error::{Error, Result};
pub use frame::{Frame, UNKNOWN};
pub use store::{frame_info, read_frame, write_columnar, write_csv, ExportFormat, FrameInfo};
