//! Command-line front end: instance files, result documents, DOT export and
//! the subcommands built on them.

pub mod commands;
pub mod dot;
pub mod format;
pub mod report;

pub use format::{parse_instance, parse_instance_str, Document, ErrorKind, Instance, ParseError};
pub use report::{ResultDocument, StrategyDocument};
