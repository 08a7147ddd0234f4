use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid character {found:?} at position {position} in sequence (expected one of 0 1 b _)")]
    SequenceParse { found: char, position: usize },

    #[error("cannot parse {input:?} as a rational number")]
    RationalParse { input: String },

    #[error("cannot parse {input:?} as a point: {reason}")]
    PointParse { input: String, reason: String },

    #[error("index {index} is out of range for a subbase with {len} pairs")]
    IndexOutOfRange { index: usize, len: usize },

    #[error("point {point} is outside the domain of {space}")]
    Domain { point: String, space: String },

    #[error("unknown space {0:?} (expected interval, circle, square, torus, compactified or finite)")]
    UnknownSpace(String),

    #[error("malformed space file: {0}")]
    MalformedSpaceFile(String),

    #[error("metric axiom violated: {0}")]
    MetricAxiom(String),

    #[error("not a permutation: {0}")]
    InvalidPermutation(String),

    #[error("resolution must be positive, got {0}")]
    InvalidResolution(String),

    #[error("delta {delta} is smaller than twice the sample resolution {resolution}")]
    DeltaTooSmall { delta: String, resolution: String },

    #[error("cut {index} has neither an exact oracle nor a positive boundary tolerance")]
    NoBoundaryClassification { index: usize },

    #[error("no admissible cut in {interval} after {retries} draws")]
    Exhausted { interval: String, retries: u32 },

    #[error("invalid builder parameters: {0}")]
    InvalidParams(String),

    #[error("malformed subbase file: {0}")]
    MalformedSubbaseFile(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
