//! Scenario files, planner runs, trajectory export and reports for the
//! strike planner.

// `!(x > 0.0)` and friends are deliberate: they reject NaN as well.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod report;
pub mod runner;
pub mod scenario;
pub mod trajectory;

use thiserror::Error;

pub use report::{Objectives, RunReport, SuiteReport, SuiteRow};
pub use runner::{run, run_suite, write_run, RunOutput};
pub use scenario::{bundled, load_scenario, parse_scenario, resolve_scenario, PsoSettings, Scenario, BUNDLED};
pub use trajectory::{read_csv, replay_landing, write_csv, Landing};

/// Process exit statuses.
pub mod exit {
    pub const OK: i32 = 0;
    pub const IO: i32 = 1;
    pub const INFEASIBLE: i32 = 2;
    pub const VALIDATION: i32 = 3;
    pub const PARSE: i32 = 4;
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{source_name}: parse error at line {line}, column {column}: {message}")]
    Parse { source_name: String, line: usize, column: usize, message: String },
    #[error("{source_name}: {field} {constraint}")]
    Validation { source_name: String, field: String, constraint: String },
    #[error("unknown scenario '{0}': not a file or a bundled fixture")]
    UnknownScenario(String),
    #[error("{path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("{0}")]
    Trajectory(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Parse { .. } | CliError::Trajectory(_) => exit::PARSE,
            CliError::Validation { .. } | CliError::UnknownScenario(_) => exit::VALIDATION,
            CliError::Io { .. } => exit::IO,
        }
    }

    pub(crate) fn io(path: &std::path::Path, source: std::io::Error) -> Self {
        CliError::Io { path: path.display().to_string(), source }
    }
}
