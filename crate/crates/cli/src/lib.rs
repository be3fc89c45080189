//! Library side of the `magblock` command-line tool.

pub mod commands;
pub mod config;
pub mod output;

use thiserror::Error;

pub const EXIT_OK: i32 = 0;
/// Usage, configuration, validation or I/O error.
pub const EXIT_ERROR: i32 = 1;
/// The steady state has no magnon excitation, so g²(0) is undefined.
pub const EXIT_NO_EXCITATION: i32 = 2;
/// No Fock cutoff up to the cap passed the convergence test.
pub const EXIT_TRUNCATION: i32 = 3;

/// Caps the worker count, for CI machines.
pub const WORKERS_ENV: &str = "MAGBLOCK_MAX_WORKERS";

#[derive(Debug, Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("{0}")]
    Io(String),
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Core(#[from] magnon_core::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Core(magnon_core::Error::NoExcitation(_)) => EXIT_NO_EXCITATION,
            CliError::Core(magnon_core::Error::Truncation { .. }) => EXIT_TRUNCATION,
            _ => EXIT_ERROR,
        }
    }
}

/// Worker count from the request, the available parallelism and the
/// environment cap.
pub fn worker_count(requested: Option<usize>, env_cap: Option<&str>) -> Result<usize, CliError> {
    let available = std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1);
    let mut n = requested.unwrap_or(available);
    if n == 0 {
        return Err(CliError::Usage("--workers must be at least 1".into()));
    }
    if let Some(cap) = env_cap {
        let cap: usize = cap
            .trim()
            .parse()
            .ok()
            .filter(|&c| c >= 1)
            .ok_or_else(|| CliError::Usage(format!("{WORKERS_ENV} must be a positive integer, got `{cap}`")))?;
        n = n.min(cap);
    }
    Ok(n)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exit_codes() {
        assert_eq!(CliError::Core(magnon_core::Error::NoExcitation(0.0)).exit_code(), 2);
        let t = magnon_core::Error::Truncation {
            cap: 40,
            params: String::new(),
        };
        assert_eq!(CliError::Core(t).exit_code(), 3);
        assert_eq!(CliError::Config("x".into()).exit_code(), 1);
    }

    #[test]
    fn worker_cap() {
        assert_eq!(worker_count(Some(8), Some("2")).unwrap(), 2);
        assert_eq!(worker_count(Some(1), Some("4")).unwrap(), 1);
        assert_eq!(worker_count(Some(3), None).unwrap(), 3);
        assert!(worker_count(Some(0), None).is_err());
        assert!(worker_count(None, Some("zero")).is_err());
        assert!(worker_count(None, None).unwrap() >= 1);
    }
}
