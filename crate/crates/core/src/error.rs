use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("module root {} is not a readable directory: {reason}", path.display())]
    RootUnreadable { path: PathBuf, reason: String },

    #[error("invalid exclude pattern `{pattern}`: {reason}")]
    InvalidExclude { pattern: String, reason: String },

    #[error("unknown attack vector `{0}` (expected one of P1,P2,I1,I2,E1..E8)")]
    UnknownVector(String),

    #[error("cannot compare reports of different modules: `{baseline}` vs `{candidate}`")]
    ModuleMismatch { baseline: String, candidate: String },

    #[error("malformed report: {0}")]
    InvalidReport(String),

    #[error("module path `{0}` is ambiguous: `!` may not precede an uppercase letter")]
    AmbiguousModulePath(String),

    #[error("GOPROXY={0} disables proxy downloads; set it to a proxy URL")]
    ProxyDisabled(String),

    #[error("GET {url} returned HTTP {status}")]
    HttpStatus { url: String, status: u16 },

    #[error("GET {url} failed: {reason}")]
    Network { url: String, reason: String },

    #[error("unsafe archive path `{0}`")]
    UnsafeArchivePath(String),

    #[error("bad module archive: {0}")]
    BadArchive(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

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
}
