use std::path::PathBuf;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("validation error: {0}")]
    Validation(String),

    #[error("shape error: {what}: expected {expected}, got {got}")]
    Shape {
        what: &'static str,
        expected: usize,
        got: usize,
    },

    #[error("imputation error: {0}")]
    Imputation(String),

    #[error(
        "split of {n_train} train + {n_test} test samples exceeds the {available} available rows"
    )]
    Size {
        n_train: usize,
        n_test: usize,
        available: usize,
    },

    #[error("network construction error: {0}")]
    Construction(String),

    #[error("training diverged at epoch {epoch}: sum of squared errors is {sse}")]
    Divergence { epoch: usize, sse: f64 },

    #[error("format error: {0}")]
    Format(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn shape(what: &'static str, expected: usize, got: usize) -> Self {
        Error::Shape {
            what,
            expected,
            got,
        }
    }

    /// Process exit status used by the command-line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config(_) => 2,
            Error::Parse { .. }
            | Error::Validation(_)
            | Error::Shape { .. }
            | Error::Imputation(_)
            | Error::Size { .. }
            | Error::Construction(_)
            | Error::Format(_) => 3,
            Error::Divergence { .. } => 4,
            Error::Io { .. } => 5,
        }
    }
}
