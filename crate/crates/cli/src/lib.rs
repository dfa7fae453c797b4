//! Terminal front end: the interactive game loop, demos, benchmarks and
//! the HTTP server entry point.

pub mod args;
mod commands;
mod error;
pub mod play;

pub use commands::run;
pub use error::{CliError, Result};
pub use play::play_loop;
