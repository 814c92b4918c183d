//! File formats, the command-line front end and the verification suite for
//! `resurgence-core`.

pub mod commands;
pub mod error;
pub mod exec;
pub mod schema;
pub mod suite;

pub use commands::{run, Cli, Outcome};
pub use error::CliError;
pub use exec::Threaded;
