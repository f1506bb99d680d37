use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Errors produced by the library.
///
/// `exit_code` groups them into the CLI's exit-code contract:
/// 2 = configuration, 3 = data, 4 = missing/stale stage dependency.
#[derive(Debug, Error)]
pub enum Error {
    #[error("config: {0}")]
    Config(String),

    #[error("{path}:{line}: malformed record: {reason}")]
    MalformedRecord {
        path: PathBuf,
        line: u64,
        reason: String,
    },

    #[error("unknown event type `{0}`")]
    UnknownEventType(String),

    #[error("unknown event result `{0}`")]
    UnknownEventResult(String),

    #[error("unknown event attribute `{0}`")]
    UnknownEventAttribute(String),

    #[error("{path}:{line}: coordinate ({x}, {y}) outside [0, 100] beyond clamp slack")]
    CoordinateOutOfRange {
        path: PathBuf,
        line: u64,
        x: f64,
        y: f64,
    },

    #[error("invalid grid spec: {0}")]
    InvalidGridSpec(String),

    #[error("heatmaps mix categories or grid sizes: {0}")]
    MixedHeatmaps(String),

    #[error("duplicate column for player `{player_id}` in match `{match_id}`")]
    DuplicateColumn {
        match_id: String,
        player_id: String,
    },

    #[error("matrix has a negative entry {value} at ({row}, {col})")]
    NegativeEntry { row: usize, col: usize, value: f64 },

    #[error("component count {k} outside 1..={max}")]
    ComponentCountOutOfRange { k: usize, max: usize },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: String, got: String },

    #[error("k-means needs {k} distinct points, only {distinct} available")]
    TooFewDistinctPoints { k: usize, distinct: usize },

    #[error("silhouette needs at least two non-empty clusters")]
    SingleCluster,

    #[error("cannot merge side clusters: {0}; supply positions.merge_map in the config")]
    NoMirrorPairing(String),

    #[error("invalid merge map: {0}")]
    InvalidMergeMap(String),

    #[error("column indexes differ between per-action models: {0}")]
    ColumnIndexMismatch(String),

    #[error("empty input: {0}")]
    EmptyInput(String),

    #[error("position `{0}` has no fitted style model")]
    UnknownPosition(String),

    #[error("position `{position}` has {count} player-matches, fewer than {styles} styles")]
    PositionGroupTooSmall {
        position: String,
        count: usize,
        styles: usize,
    },

    #[error("no player-match record for player `{player_id}` in match `{match_id}`")]
    MissingRecord {
        match_id: String,
        player_id: String,
    },

    #[error("player `{0}` not found in the season population")]
    PlayerNotFound(String),

    #[error("similarity distance {d_ij} exceeds population maximum {d_max}")]
    DistanceAboveMax { d_ij: f64, d_max: f64 },

    #[error("negative distance passed to similarity transform: {0}")]
    NegativeDistance(f64),

    #[error("invalid archetype spec: {0}")]
    InvalidArchetype(String),

    #[error("missing artifact `{artifact}` at {path}; run `{stage}` first")]
    MissingArtifact {
        artifact: String,
        stage: String,
        path: PathBuf,
    },

    #[error(
        "artifact `{artifact}` was produced with config fingerprint {found}, expected {expected}; \
         re-run the stage or pass --force"
    )]
    FingerprintMismatch {
        artifact: String,
        expected: String,
        found: String,
    },

    #[error("corrupt artifact {path}: {reason}")]
    CorruptArtifact { path: PathBuf, reason: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error("csv: {0}")]
    Csv(#[from] csv::Error),

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// CLI exit code: 0 success, 2 config error, 3 data error, 4 dependency error.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config(_) | Error::InvalidGridSpec(_) | Error::InvalidMergeMap(_) => 2,
            Error::MissingArtifact { .. } | Error::FingerprintMismatch { .. } => 4,
            _ => 3,
        }
    }
}
