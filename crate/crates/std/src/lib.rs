//! Std companion to `mukai-core`: JSON formats, seeded instance
//! generators, brute-force oracles, and the `mukai` command-line tool.

pub mod codec;
pub mod commands;
pub mod error;
pub mod invariants;
pub mod oracle;
pub mod random;
pub mod selftest;

pub use commands::{run, Outcome, SessionConfig};
pub use error::{CliError, ErrorKind};
