use std::path::PathBuf;

/// Errors surfaced by the simulator, controller and scenario tooling.
///
/// Perception failures are deliberately absent: they are encoded in
/// [`crate::perception::DockEstimate::valid`] and never abort a run.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("integration blew up (non-finite state after step with dt = {dt})")]
    IntegrationBlowup { dt: f64 },

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("cannot plot an empty trajectory log")]
    EmptyPlot,

    #[error("failed to parse {path}: {message}")]
    Parse { path: PathBuf, message: String },

    #[error("I/O error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn config(msg: impl Into<String>) -> Self {
        Error::Config(msg.into())
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
