//! Scenario runner behind the `photon-spinor` binary.
//!
//! Exit codes: 0 when every action passes, 1 when an action's assertion
//! fails, 2 for configuration or resource errors. Scenarios are validated
//! completely before the first action runs, so exit 2 never leaves a partial
//! report behind.

pub mod config;
pub mod report;
mod runner;

use std::path::Path;

pub use config::{describe_scenario, load_scenario, parse_scenario, ConfigError, Scenario};
pub use report::{to_json_string, RunReport, SCHEMA_VERSION};
pub use runner::execute;

pub const EXIT_OK: u8 = 0;
pub const EXIT_FAILED: u8 = 1;
pub const EXIT_CONFIG: u8 = 2;

/// Environment variable capping the worker thread count.
pub const THREADS_ENV: &str = "PHOTON_SPINOR_THREADS";

pub fn version_string() -> String {
    let features = if cfg!(feature = "parallel") {
        "parallel"
    } else {
        "serial"
    };
    format!(
        "photon-spinor {} (report schema {SCHEMA_VERSION}, {features}, {} {})",
        env!("CARGO_PKG_VERSION"),
        std::env::consts::ARCH,
        std::env::consts::OS
    )
}

/// Parse a thread cap from the environment value; `None` means no cap.
pub fn parse_thread_cap(value: Option<&str>) -> Result<Option<usize>, String> {
    match value.map(str::trim) {
        None | Some("") => Ok(None),
        Some(v) => match v.parse::<usize>() {
            Ok(n) if n > 0 => Ok(Some(n)),
            _ => Err(format!("{THREADS_ENV} must be a positive integer, got `{v}`")),
        },
    }
}

/// Outcome of `run`: the report (absent on exit 2) and the exit code.
pub struct RunOutcome {
    pub report: Option<RunReport>,
    pub exit_code: u8,
    pub message: Option<String>,
}

/// Load, validate and execute a scenario, writing the report to the path
/// given by `out`, else the scenario's `[output] report`, else returning it
/// for the caller to print.
pub fn run_path(path: &Path, out: Option<&Path>) -> RunOutcome {
    let scenario = match load_scenario(path) {
        Ok(s) => s,
        Err(e) => {
            return RunOutcome {
                report: None,
                exit_code: EXIT_CONFIG,
                message: Some(e.to_string()),
            }
        }
    };
    let report = execute(&scenario);
    let exit_code = if report.passed { EXIT_OK } else { EXIT_FAILED };
    let target = out
        .map(Path::to_path_buf)
        .or_else(|| scenario.file.output.as_ref().and_then(|o| o.report.clone()));
    if let Some(target) = target {
        if let Err(e) = std::fs::write(&target, to_json_string(&report)) {
            return RunOutcome {
                report: Some(report),
                exit_code: EXIT_CONFIG,
                message: Some(format!("cannot write report {}: {e}", target.display())),
            };
        }
        return RunOutcome {
            report: Some(report),
            exit_code,
            message: Some(format!("report written to {}", target.display())),
        };
    }
    RunOutcome {
        report: Some(report),
        exit_code,
        message: None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn thread_cap_parsing() {
        assert_eq!(parse_thread_cap(None), Ok(None));
        assert_eq!(parse_thread_cap(Some("4")), Ok(Some(4)));
        assert!(parse_thread_cap(Some("0")).is_err());
        assert!(parse_thread_cap(Some("many")).is_err());
    }

    #[test]
    fn version_is_semantic() {
        let v = version_string();
        let semver = v.split_whitespace().nth(1).unwrap();
        assert_eq!(semver.split('.').count(), 3);
    }
}
