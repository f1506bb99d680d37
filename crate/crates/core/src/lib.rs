//! Spatial playing-style vectors for football players.
//!
//! The pipeline ingests match-event streams, draws smoothed per-action
//! heatmaps, compresses them with non-negative matrix factorization,
//! concatenates the compressed representations into fixed-size per-match
//! player vectors, detects positions by clustering average action
//! locations, extracts per-position playing styles with a second NMF pass,
//! and produces similarity rankings and pairwise comparison reports.

pub mod artifacts;
pub mod config;
pub mod error;
pub mod events;
pub mod heatmap;
pub mod kmeans;
pub mod nmf;
pub mod pipeline;
pub mod positions;
pub mod report;
pub mod similarity;
pub mod styles;
pub mod synth;
pub mod vectors;

pub use config::PipelineConfig;
pub use error::{Error, Result};
pub use events::{
    ActionCategory, CategoryMapping, IngestConfig, MatchEvent, MatchOutcome, Nationality,
    PitchPoint, PlayerMatchKey, PlayerMatchRecord, RawEventType, StartPosition,
};
pub use heatmap::{GridSpec, Heatmap, HeatmapMatrix, Normalization};
pub use kmeans::{KmeansFit, KmeansOptions};
pub use nmf::{FactorModel, NmfOptions};
pub use pipeline::Pipeline;
pub use positions::{AvgPositionSample, PositionLabel, PositionModel};
pub use report::{ComparisonReport, SeasonData};
pub use similarity::SimilarityResult;
pub use styles::{PositionStyleConfig, StyleAssignment, StyleCatalog, StyleStats};
pub use synth::{ArchetypeSpec, LeagueSpec};
pub use vectors::{PlayerMatchVector, VectorLayout};
