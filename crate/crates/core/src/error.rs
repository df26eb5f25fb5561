use std::path::PathBuf;

use thiserror::Error;

/// Errors produced anywhere in the simulation, evolution and analysis pipeline.
#[derive(Debug, Error)]
pub enum Error {
    #[error("bad genotype length: expected {expected}, found {found}")]
    BadLength { expected: usize, found: usize },

    #[error("unresolvable collision at ({x:.4}, {y:.4}): no valid pose within one body radius")]
    Unresolvable { x: f64, y: f64 },

    #[error("no supported rows in expected activity matrix")]
    NoSupport,

    #[error("segment {0} has no steps in this traversal")]
    EmptyTraversal(String),

    #[error("degenerate statistics input: {0}")]
    Degenerate(&'static str),

    #[error("checkpoint corrupt: {0}")]
    CheckpointCorrupt(String),

    #[error("{}:{line}: {msg}", path.display())]
    Parse {
        path: PathBuf,
        line: usize,
        msg: String,
    },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("invalid layout: {0}")]
    Layout(String),

    #[error("missing input: {}", .0.display())]
    MissingInput(PathBuf),

    #[error("inputs carry different config hashes ({0} vs {1}); pass --force to mix them")]
    MixedHash(String, String),

    #[error("invalid argument: {0}")]
    Invalid(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    pub(crate) fn parse(path: impl Into<PathBuf>, line: usize, msg: impl Into<String>) -> Self {
        Error::Parse {
            path: path.into(),
            line,
            msg: msg.into(),
        }
    }
}
