//! Exit-status classification: input problems exit 1, provider problems
//! (wire failures that survived the retry budget) exit 2.

use std::fmt;

/// A failed run, tagged with the exit code it maps to.
#[derive(Debug)]
pub enum Failure {
    /// Bad input: unreadable files, malformed records, invalid config.
    Input(anyhow::Error),
    /// The translation provider failed after exhausting retries.
    Provider(anyhow::Error),
}

impl Failure {
    /// Wrap an error as an input failure.
    pub fn input(err: impl Into<anyhow::Error>) -> Failure {
        Failure::Input(err.into())
    }

    /// Wrap an error as a provider failure.
    pub fn provider(err: impl Into<anyhow::Error>) -> Failure {
        Failure::Provider(err.into())
    }

    /// Classify a core error: provider wrappers keep their own exit code,
    /// everything else is the caller's input problem.
    pub fn from_core(err: m2ms_core::Error) -> Failure {
        match err {
            m2ms_core::Error::Provider { .. } => Failure::provider(err),
            other => Failure::input(other),
        }
    }

    /// Process exit code for this failure.
    pub fn exit_code(&self) -> i32 {
        match self {
            Failure::Input(_) => 1,
            Failure::Provider(_) => 2,
        }
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Failure::Input(err) => write!(f, "{err:#}"),
            Failure::Provider(err) => write!(f, "provider failure: {err:#}"),
        }
    }
}
