use std::path::PathBuf;

use thiserror::Error;

use crate::grid::MultiIndex;

/// Errors raised by the numerical kernels and the experiment harness.
#[derive(Debug, Error)]
pub enum Error {
    #[error("incomplete stencil: offset ({}, {}) missing", .0.m, .0.n)]
    IncompleteStencil(MultiIndex),

    #[error("degenerate stencil in {context}: conditioning {conditioning:e}")]
    DegenerateStencil { context: &'static str, conditioning: f64 },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("invalid step: {0}")]
    InvalidStep(String),

    #[error("misuse: {0}")]
    Misuse(String),

    #[error("mesh collapse at level {level}: tangled pairs {pairs:?}")]
    MeshCollapse { level: i64, pairs: Vec<(usize, usize)> },

    #[error("config error: {0}")]
    Config(String),

    #[error("at level {level}: {source}")]
    AtLevel {
        level: i64,
        #[source]
        source: Box<Error>,
    },

    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn misuse(msg: impl Into<String>) -> Self {
        Error::Misuse(msg.into())
    }

    pub(crate) fn at_level(self, level: i64) -> Self {
        match self {
            e @ Error::AtLevel { .. } => e,
            e @ Error::MeshCollapse { .. } => e,
            e => Error::AtLevel { level, source: Box::new(e) },
        }
    }

    /// Strips level context, returning the underlying error.
    pub fn root(&self) -> &Error {
        match self {
            Error::AtLevel { source, .. } => source.root(),
            e => e,
        }
    }

    /// Process exit code used by the command-line front end.
    pub fn exit_code(&self) -> i32 {
        match self.root() {
            Error::Config(_) | Error::Misuse(_) | Error::Io { .. } => 2,
            Error::MeshCollapse { .. } => 4,
            _ => 3,
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
