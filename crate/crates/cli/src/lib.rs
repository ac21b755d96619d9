//! Command-line driver: reads a spec document (or a plain directed graph),
//! runs one analysis and emits a JSON report.

pub mod commands;
pub mod config;
pub mod digraph;
pub mod report;

pub use commands::{run, run_text, Command, Flags};
pub use config::Config;
pub use kgraph_core::document::{parse_spec, SpecDocument};
pub use report::{Report, Status};
