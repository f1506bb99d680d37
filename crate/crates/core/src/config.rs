//! The single TOML config that drives every pipeline stage. All fields have
//! defaults; the fingerprint of the parsed config is embedded in every
//! artifact so stale intermediates are caught.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::artifacts::fingerprint_of;
use crate::error::{Error, Result};
use crate::events::{ActionCategory, CategoryMapping, IngestConfig};
use crate::heatmap::GridSpec;
use crate::kmeans::KmeansOptions;
use crate::nmf::NmfOptions;
use crate::positions::{MergeParams, PositionLabel};
use crate::styles::PositionStyleConfig;
use crate::vectors::VectorLayout;

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PipelineConfig {
    /// Every stage derives its RNG stream from this.
    pub seed: u64,
    pub grid: GridSpec,
    pub layout: LayoutConfig,
    pub nmf: NmfConfig,
    pub positions: PositionsConfig,
    pub styles: Vec<StyleEntry>,
    pub ingest: IngestToml,
    pub similarity: SimilarityConfig,
    pub io: IoConfig,
    pub synth: SynthConfig,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        PipelineConfig {
            seed: 42,
            grid: GridSpec::default(),
            layout: LayoutConfig::default(),
            nmf: NmfConfig::default(),
            positions: PositionsConfig::default(),
            styles: StyleEntry::defaults(),
            ingest: IngestToml::default(),
            similarity: SimilarityConfig::default(),
            io: IoConfig::default(),
            synth: SynthConfig::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LayoutConfig {
    pub shot: usize,
    pub cross: usize,
    pub dribble: usize,
    pub pass: usize,
    pub long_pass: usize,
    pub key_pass: usize,
    pub interception: usize,
    pub clearance: usize,
    pub header: usize,
    pub recovery: usize,
}

impl Default for LayoutConfig {
    fn default() -> Self {
        LayoutConfig {
            shot: 4,
            cross: 4,
            dribble: 5,
            pass: 5,
            long_pass: 5,
            key_pass: 4,
            interception: 4,
            clearance: 4,
            header: 5,
            recovery: 4,
        }
    }
}

impl LayoutConfig {
    pub fn to_layout(&self) -> Result<VectorLayout> {
        VectorLayout::from_counts(&[
            (ActionCategory::Shot, self.shot),
            (ActionCategory::Cross, self.cross),
            (ActionCategory::Dribble, self.dribble),
            (ActionCategory::Pass, self.pass),
            (ActionCategory::LongPass, self.long_pass),
            (ActionCategory::KeyPass, self.key_pass),
            (ActionCategory::Interception, self.interception),
            (ActionCategory::Clearance, self.clearance),
            (ActionCategory::Header, self.header),
            (ActionCategory::Recovery, self.recovery),
        ])
    }
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct NmfConfig {
    pub max_iter: usize,
    pub tol: f64,
}

impl Default for NmfConfig {
    fn default() -> Self {
        NmfConfig {
            max_iter: 500,
            tol: 1e-4,
        }
    }
}

impl NmfConfig {
    pub fn options(&self, seed: u64) -> NmfOptions {
        NmfOptions {
            max_iter: self.max_iter,
            tol: self.tol,
            seed,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PositionsConfig {
    pub k_min: usize,
    pub k_max: usize,
    pub n_init: usize,
    pub max_iter: usize,
    pub side_switch_threshold: f64,
    pub min_lateral: f64,
    pub mirror_tol: f64,
    /// Manual cluster → label override; replaces the automatic mirror merge.
    pub merge_map: Option<Vec<String>>,
}

impl Default for PositionsConfig {
    fn default() -> Self {
        PositionsConfig {
            k_min: 5,
            k_max: 10,
            n_init: 10,
            max_iter: 300,
            side_switch_threshold: 30.0,
            min_lateral: 15.0,
            mirror_tol: 10.0,
            merge_map: None,
        }
    }
}

impl PositionsConfig {
    pub fn kmeans_options(&self, seed: u64) -> KmeansOptions {
        KmeansOptions {
            n_init: self.n_init,
            max_iter: self.max_iter,
            seed,
        }
    }

    pub fn merge_params(&self) -> MergeParams {
        MergeParams {
            min_lateral: self.min_lateral,
            mirror_tol: self.mirror_tol,
        }
    }

    pub fn parsed_merge_map(&self) -> Result<Option<Vec<PositionLabel>>> {
        let Some(labels) = &self.merge_map else {
            return Ok(None);
        };
        labels
            .iter()
            .map(|s| {
                PositionLabel::parse(s)
                    .ok_or_else(|| Error::InvalidMergeMap(format!("unknown label `{s}`")))
            })
            .collect::<Result<Vec<_>>>()
            .map(Some)
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StyleEntry {
    pub position: String,
    pub actions: Vec<String>,
    pub count: usize,
}

impl StyleEntry {
    pub fn defaults() -> Vec<StyleEntry> {
        crate::styles::default_style_configs()
            .into_iter()
            .map(|c| StyleEntry {
                position: c.position.as_str().to_string(),
                actions: c.actions.iter().map(|a| a.slug().to_string()).collect(),
                count: c.styles,
            })
            .collect()
    }

    pub fn parse(&self) -> Result<PositionStyleConfig> {
        let position = PositionLabel::parse(&self.position)
            .ok_or_else(|| Error::Config(format!("unknown position `{}`", self.position)))?;
        let actions = self
            .actions
            .iter()
            .map(|a| {
                ActionCategory::from_slug(a)
                    .ok_or_else(|| Error::Config(format!("unknown action `{a}`")))
            })
            .collect::<Result<Vec<_>>>()?;
        if self.count == 0 {
            return Err(Error::Config(format!("{}: style count must be ≥ 1", self.position)));
        }
        Ok(PositionStyleConfig {
            position,
            actions,
            styles: self.count,
        })
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct IngestToml {
    pub clamp_slack: f64,
    pub keypass_double_count: bool,
    /// Raw event name → category slug (or "none" to exclude); overrides the
    /// default table entry by entry.
    pub mapping_overrides: std::collections::BTreeMap<String, String>,
}

impl Default for IngestToml {
    fn default() -> Self {
        IngestToml {
            clamp_slack: 0.5,
            keypass_double_count: true,
            mapping_overrides: Default::default(),
        }
    }
}

impl IngestToml {
    pub fn to_config(&self) -> Result<IngestConfig> {
        let mut mapping = CategoryMapping::default();
        mapping.keypass_double_count = self.keypass_double_count;
        for (name, target) in &self.mapping_overrides {
            let category = if target == "none" {
                None
            } else {
                Some(ActionCategory::from_slug(target).ok_or_else(|| {
                    Error::Config(format!("mapping override `{name}` → unknown category `{target}`"))
                })?)
            };
            mapping.set_base(name, category)?;
        }
        Ok(IngestConfig {
            clamp_slack: self.clamp_slack,
            mapping,
        })
    }
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SimilarityConfig {
    pub top_n: usize,
}

impl Default for SimilarityConfig {
    fn default() -> Self {
        SimilarityConfig { top_n: 10 }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct IoConfig {
    pub events: PathBuf,
    pub records: PathBuf,
    pub artifacts: PathBuf,
}

impl Default for IoConfig {
    fn default() -> Self {
        IoConfig {
            events: PathBuf::from("events.csv"),
            records: PathBuf::from("records.csv"),
            artifacts: PathBuf::from("artifacts"),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SynthConfig {
    pub players_per_archetype: usize,
    pub matchdays: usize,
    pub teams: usize,
    /// Directory the `synth` stage writes events/records/truth into.
    pub out_dir: PathBuf,
}

impl Default for SynthConfig {
    fn default() -> Self {
        SynthConfig {
            players_per_archetype: 6,
            matchdays: 32,
            teams: 8,
            out_dir: PathBuf::from("synth"),
        }
    }
}

impl PipelineConfig {
    pub fn load(path: &Path) -> Result<PipelineConfig> {
        let text = std::fs::read_to_string(path)?;
        let config: PipelineConfig =
            toml::from_str(&text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        config.validate()?;
        Ok(config)
    }

    pub fn validate(&self) -> Result<()> {
        self.grid.validate()?;
        if self.positions.k_min < 1 || self.positions.k_min > self.positions.k_max {
            return Err(Error::Config(format!(
                "bad k range {}..={}",
                self.positions.k_min, self.positions.k_max
            )));
        }
        self.layout.to_layout()?;
        for entry in &self.styles {
            entry.parse()?;
        }
        self.ingest.to_config()?;
        Ok(())
    }

    pub fn style_configs(&self) -> Result<Vec<PositionStyleConfig>> {
        self.styles.iter().map(|e| e.parse()).collect()
    }

    /// Stable fingerprint of everything that affects artifact content.
    pub fn fingerprint(&self) -> String {
        fingerprint_of(self)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_config_is_valid_and_fingerprint_stable() {
        let config = PipelineConfig::default();
        config.validate().unwrap();
        assert_eq!(config.fingerprint(), PipelineConfig::default().fingerprint());
        let mut other = PipelineConfig::default();
        other.seed = 77;
        assert_ne!(config.fingerprint(), other.fingerprint());
    }

    #[test]
    fn toml_round_trip_with_overrides() {
        let text = r#"
            seed = 7

            [grid]
            m = 25
            n = 17
            sigma = 1.0

            [ingest]
            keypass_double_count = false

            [ingest.mapping_overrides]
            "Throw in" = "pass"
            "Aerial duel" = "none"

            [[styles]]
            position = "ST"
            actions = ["shot", "header"]
            count = 2

            [[styles]]
            position = "CM"
            actions = ["pass"]
            count = 1

            [[styles]]
            position = "L/RW"
            actions = ["cross"]
            count = 1

            [[styles]]
            position = "L/RFB"
            actions = ["interception"]
            count = 1

            [[styles]]
            position = "CB"
            actions = ["clearance"]
            count = 1
        "#;
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("pv.toml");
        std::fs::write(&path, text).unwrap();
        let config = PipelineConfig::load(&path).unwrap();
        assert_eq!(config.seed, 7);
        assert_eq!(config.grid.m, 25);
        let ingest = config.ingest.to_config().unwrap();
        assert!(!ingest.mapping.keypass_double_count);
        let throw = crate::events::RawEventType::new("Throw in", "", "").unwrap();
        assert_eq!(
            ingest.mapping.base_category(&throw).unwrap(),
            Some(ActionCategory::Pass)
        );
        let styles = config.style_configs().unwrap();
        assert_eq!(styles.len(), 5);
        assert_eq!(styles[0].styles, 2);
    }

    #[test]
    fn unknown_keys_and_bad_values_are_config_errors() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("bad.toml");
        std::fs::write(&path, "nonsense = true\n").unwrap();
        assert!(matches!(PipelineConfig::load(&path), Err(Error::Config(_))));

        std::fs::write(&path, "[grid]\nm = 1\nn = 1\n").unwrap();
        let err = PipelineConfig::load(&path).unwrap_err();
        assert_eq!(err.exit_code(), 2);
    }
}
