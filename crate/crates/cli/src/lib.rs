//! File-driven front end for `polaris-core`.
//!
//! Exit codes: `0` when every check passes, `1` when a verification fails,
//! `2` on malformed input.

pub mod cli;
pub mod commands;
pub mod problem;
pub mod report;

pub use cli::{execute, Cli, Outcome};
pub use problem::{InputError, Problem};
pub use report::{Entry, Report, Status};
