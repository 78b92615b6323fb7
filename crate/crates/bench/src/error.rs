use std::io;
use std::path::PathBuf;

use crate::format::FormatError;

#[derive(Debug, thiserror::Error)]
pub enum BenchError {
    /// Bad user input: unknown method, impossible weight count, missing file.
    #[error("configuration error: {0}")]
    Config(String),
    #[error("{path}: {source}")]
    Instance { path: PathBuf, source: FormatError },
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: io::Error },
    #[error("{path}: line {line}: {source}")]
    Json {
        path: PathBuf,
        line: usize,
        source: serde_json::Error,
    },
    #[error(transparent)]
    Core(#[from] mubqp_core::Error),
    #[error("reports from different instances cannot be summarised together: {0} and {1}")]
    MixedInstances(String, String),
    #[error("no successful run reports")]
    NoReports,
}

pub type Result<T, E = BenchError> = std::result::Result<T, E>;

pub(crate) trait IoContext<T> {
    fn at(self, path: &std::path::Path) -> Result<T>;
}

impl<T> IoContext<T> for io::Result<T> {
    fn at(self, path: &std::path::Path) -> Result<T> {
        self.map_err(|source| BenchError::Io {
            path: path.to_owned(),
            source,
        })
    }
}
