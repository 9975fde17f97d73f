// Copyright 2026 The randord Authors
// SPDX-License-Identifier: Apache-2.0

use alloc::string::String;

/// Errors raised by the numerical core.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("invalid problem: {0}")]
    InvalidProblem(String),

    #[error("Legendre root iteration did not converge for degree {degree}")]
    RootFinding { degree: usize },

    #[error("source iteration did not converge after {iterations} iterations (residual {residual:e})")]
    NonConvergence { iterations: usize, residual: f64 },

    #[error("Neumann series did not converge after {terms} terms (tail bound {tail_bound:e})")]
    SeriesNonConvergence { terms: usize, tail_bound: f64 },

    #[error("sample {index} failed: {source}")]
    Sample {
        index: u64,
        #[source]
        source: alloc::boxed::Box<Error>,
    },

    #[error("internal error: {0}")]
    Internal(&'static str),
}

impl Error {
    pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }

    /// True when the error comes from a solver or series failing to converge.
    pub fn is_non_convergence(&self) -> bool {
        match self {
            Error::NonConvergence { .. } | Error::SeriesNonConvergence { .. } => true,
            Error::Sample { source, .. } => source.is_non_convergence(),
            _ => false,
        }
    }
}

pub type Result<T> = core::result::Result<T, Error>;
