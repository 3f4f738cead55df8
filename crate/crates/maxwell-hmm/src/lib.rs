//! Command line driver for `hmm-core`: JSON configuration, the `cell`,
//! `musweep`, `solve`, `hmm` and `study` commands, and CSV / VTK / Matrix
//! Market writers.

pub mod cache;
pub mod commands;
pub mod config;
pub mod output;

pub use commands::{run, Command};
pub use config::RunConfig;

use hmm_core::cell::CellError;
use hmm_core::hmm::HmmError;
use hmm_core::scatter::ScatterError;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("numerical failure: {0}")]
    Numerical(String),
}

impl CliError {
    /// 2 for configuration and validation errors, 3 for numerical failures.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Numerical(_) => 3,
        }
    }

    pub fn from_cell(e: CellError) -> Self {
        match e {
            CellError::Coefficients(_) | CellError::Mesh(_) => CliError::Config(e.to_string()),
            _ => CliError::Numerical(e.to_string()),
        }
    }

    pub fn from_scatter(e: ScatterError) -> Self {
        match e {
            ScatterError::Config(_) | ScatterError::Mesh(_) => CliError::Config(e.to_string()),
            _ => CliError::Numerical(e.to_string()),
        }
    }

    pub fn from_hmm(e: HmmError) -> Self {
        match e {
            HmmError::Config(_) => CliError::Config(e.to_string()),
            HmmError::Cell(c) => Self::from_cell(c),
            HmmError::Scatter(s) => Self::from_scatter(s),
            _ => CliError::Numerical(e.to_string()),
        }
    }
}
