//! Batch front end for `multiway-disc`: loads tables, runs computations and
//! checks, and writes JSON/CSV reports.
//!
//! Exit codes: 0 success, 2 input or configuration error, 3 work budget
//! exceeded, 4 a verification check recorded failures.

pub mod commands;
pub mod config;
pub mod io;

use std::fmt;

pub use commands::{execute, Outcome};
pub use config::{Command, GeneratorFlags, RunConfig};

pub const EXIT_INPUT: u8 = 2;
pub const EXIT_BUDGET: u8 = 3;
pub const EXIT_VERIFY: u8 = 4;

#[derive(Debug)]
pub enum CliError {
    Input(String),
    Budget(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Input(_) => EXIT_INPUT,
            CliError::Budget(_) => EXIT_BUDGET,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Input(m) | CliError::Budget(m) => f.write_str(m),
        }
    }
}

impl std::error::Error for CliError {}

impl From<multiway_disc::Error> for CliError {
    fn from(e: multiway_disc::Error) -> Self {
        match e {
            multiway_disc::Error::BudgetExceeded { .. } => CliError::Budget(e.to_string()),
            e => CliError::Input(e.to_string()),
        }
    }
}
