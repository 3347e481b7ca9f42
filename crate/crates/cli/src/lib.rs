//! Scenario files, dispatch and reporting for the `qprospect` tool.

pub mod acceptance;
pub mod error;
pub mod output;
pub mod random;
pub mod run;
pub mod scenario;

pub use error::CliError;
pub use output::{Format, ResultTable};
pub use run::{run, Command};
pub use scenario::{parse_scenario, Scenario};

/// Environment variable overriding the global numeric tolerance.
pub const TOLERANCE_ENV: &str = "QPROSPECT_TOL";

/// Applies `QPROSPECT_TOL` if set.
pub fn apply_tolerance_env() -> Result<(), CliError> {
    match std::env::var(TOLERANCE_ENV) {
        Ok(text) => {
            let tol: f64 = text
                .trim()
                .parse()
                .map_err(|_| CliError::Validation(format!("{TOLERANCE_ENV}: '{text}' is not a number")))?;
            qprospect_core::numeric::set_tolerance(tol).map_err(|e| CliError::from_core(TOLERANCE_ENV, e))
        }
        Err(std::env::VarError::NotPresent) => Ok(()),
        Err(e) => Err(CliError::Validation(format!("{TOLERANCE_ENV}: {e}"))),
    }
}
