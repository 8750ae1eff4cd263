//! Configuration, commands and artifact output behind the `keldysh-nca` binary.

pub mod commands;
pub mod config;
pub mod output;

pub use commands::{Method, Options, Outcome, Status};
pub use config::{ConfigError, FileConfig, RunConfig};
