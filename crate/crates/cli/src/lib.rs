//! Text formats, commands and reports for finite fibred sites.
//!
//! Files are parsed into a [`Bundle`](bundle::Bundle), a [`Command`] runs
//! against it and produces a [`Report`](report::Report), emitted as JSON or
//! markdown.

pub mod bundle;
pub mod commands;
pub mod emit;
pub mod error;
pub mod parse;
pub mod report;

pub use bundle::Bundle;
pub use commands::{run, Command, Options, Outcome};
pub use error::{exit, CliError, CliResult};
pub use parse::{parse_files, parse_str};
pub use report::{emit_report, Format, Report};
