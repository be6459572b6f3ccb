//! File formats and commands of the `teamsolve` executable.
//!
//! Every command is a function from parsed arguments to a [`Report`] (text
//! plus exit [`Status`]), so tests drive the same code paths as the binary.

pub mod cli;
pub mod commands;
pub mod error;
pub mod output;
pub mod rational;
pub mod schema;

pub use commands::{cmd_gdmm, cmd_gen, cmd_prox, cmd_solve, cmd_verify, Report};
pub use error::{CliError, Status};
