//! Input format, command pipelines, reports and the built-in example registry.

pub mod parse;
pub mod registry;
pub mod report;
pub mod run;

pub use parse::{parse, parse_bytes, Document, ErrorClass, ParseError};
pub use registry::{example, Fixture, FIXTURES};
pub use report::Report;
pub use run::{run, run_source, Backend, Command, Options};
