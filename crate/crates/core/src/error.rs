use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("point is co-located with the base station site")]
    CoLocated,

    #[error("inconsistent SINR reports: device {device} lists peer {peer} but not vice versa")]
    InconsistentReports { device: usize, peer: usize },

    #[error("invalid SINR {value} reported by device {device} for peer {peer}")]
    InvalidSinr {
        device: usize,
        peer: usize,
        value: f64,
    },

    #[error("link ({a}, {b}) is not part of the matching")]
    LinkNotInMatching { a: usize, b: usize },

    #[error("inconsistent device counts: {0}")]
    InconsistentCounts(String),

    #[error(
        "unknown sweep axis `{0}` (expected d2d_power_dbm, delta_d2d_db or d2d_bandwidth_mhz)"
    )]
    UnknownAxis(String),

    #[error("empirical CDF requested over an empty sample set")]
    EmptySamples,

    #[error("config line {line}: {message}")]
    Config { line: usize, message: String },

    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
