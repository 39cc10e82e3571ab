//! Command-line front end for `tfn-core`: solves networks described in JSON,
//! runs the named scenarios, and writes phase scans as CSV and SVG.

pub mod commands;
pub mod config;
pub mod record;
pub mod scan;

use thiserror::Error;

/// Exit status of a successful command.
pub const EXIT_OK: i32 = 0;
/// Bad configuration, arguments, or I/O.
pub const EXIT_CONFIG: i32 = 1;
/// The loop denominator could not be inverted.
pub const EXIT_SINGULAR: i32 = 2;
/// The loop-unrolling oracle did not converge.
pub const EXIT_NOT_CONVERGED: i32 = 3;
/// A scenario ran but one of its identities was violated.
pub const EXIT_CHECK_FAILED: i32 = 4;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),

    #[error("invalid arguments: {0}")]
    Usage(String),

    #[error("i/o error: {0}")]
    Io(String),

    #[error("singular loop denominator (condition estimate {condition:e})")]
    SingularDenominator { condition: f64 },

    #[error("oracle did not converge after {iterations} iterations (last update {final_update_norm:e}, loop radius {loop_spectral_radius:.6})")]
    NotConverged {
        iterations: usize,
        final_update_norm: f64,
        loop_spectral_radius: f64,
    },

    #[error("identity check failed: {0}")]
    CheckFailed(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) | CliError::Usage(_) | CliError::Io(_) => EXIT_CONFIG,
            CliError::SingularDenominator { .. } => EXIT_SINGULAR,
            CliError::NotConverged { .. } => EXIT_NOT_CONVERGED,
            CliError::CheckFailed(_) => EXIT_CHECK_FAILED,
        }
    }
}

impl From<tfn_core::Error> for CliError {
    fn from(e: tfn_core::Error) -> Self {
        use tfn_core::Error as E;
        match e {
            E::SingularDenominator { condition } => CliError::SingularDenominator { condition },
            E::NotConverged(report) => CliError::NotConverged {
                iterations: report.iterations_used,
                final_update_norm: report.final_update_norm,
                loop_spectral_radius: report.loop_spectral_radius_estimate,
            },
            other => CliError::Usage(other.to_string()),
        }
    }
}
