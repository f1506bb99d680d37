//! Stage orchestration over the artifact store. Stages form a DAG:
//! `ingest` → `heatmaps` and `cluster-positions` → `fit-vectors` →
//! `fit-styles` → `table2`; `synth` generates input files; `compare` and
//! `similar` read the finished artifacts. Every stage summary embeds the
//! config fingerprint and downstream stages refuse stale inputs.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use ndarray::Array2;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::artifacts::{
    derive_seed, read_factor_model, read_matrix, write_factor_model, write_matrix, ArtifactStore,
};
use crate::config::PipelineConfig;
use crate::error::{Error, Result};
use crate::events::{
    filter_eligible, ingest_events, read_player_records, write_events_csv, ActionCategory,
    MatchEvent, PlayerMatchKey, PlayerMatchRecord,
};
use crate::heatmap::{build_heatmap, build_matrix, collect_points, Heatmap, HeatmapMatrix};
use crate::kmeans::silhouette_mean;
use crate::nmf::nmf_fit;
use crate::positions::{
    average_positions, detect_side_switch, label_samples, merge_side_clusters, select_k,
    validate_merge_map, KScore, PositionLabel, PositionModel,
};
use crate::report::{build_report, ComparisonReport, SeasonData};
use crate::similarity::{most_similar, SimilarityResult};
use crate::styles::{
    assign_style, fit_styles, name_styles, style_stats, StyleAssignment, StyleCatalog,
    StyleStats, DEFAULT_MIN_START_COUNT,
};
use crate::synth::{generate_season, LeagueSpec};
use crate::vectors::{assemble, write_vectors_csv, CategoryModel, PlayerMatchVector};

pub struct Pipeline {
    pub config: PipelineConfig,
    pub store: ArtifactStore,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct IngestSummary {
    pub fingerprint: String,
    pub events: u64,
    pub dropped_missing_location: u64,
    pub eligible_player_matches: u64,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct HeatmapsSummary {
    pub fingerprint: String,
    pub grid: crate::heatmap::GridSpec,
    pub columns: Vec<PlayerMatchKey>,
    pub nonzero_heatmaps: u64,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct PositionsSummary {
    pub fingerprint: String,
    pub model: PositionModel,
    pub per_k: Vec<KScore>,
    pub samples: u64,
    pub side_switches_removed: u64,
    pub skipped_without_actions: u64,
    pub label_counts: BTreeMap<String, u64>,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct VectorsSummary {
    pub fingerprint: String,
    pub dim: usize,
    pub vectors: u64,
    pub skipped_unpositioned: u64,
    pub reconstruction_errors: BTreeMap<String, f64>,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct StylesSummaryEntry {
    pub actions: Vec<String>,
    pub slots: Vec<usize>,
    pub slot_names: Vec<String>,
    pub names: Vec<String>,
    pub stats: Vec<StyleStats>,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct StylesSummary {
    pub fingerprint: String,
    pub total_styles: usize,
    pub positions: BTreeMap<String, StylesSummaryEntry>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct VectorColumn {
    key: PlayerMatchKey,
    position: PositionLabel,
}

#[derive(Debug, Serialize, Deserialize)]
struct VectorsIndex {
    fingerprint: String,
    dim: usize,
    columns: Vec<VectorColumn>,
}

impl Pipeline {
    /// `root_override` (CLI flag or env var) wins over the config's
    /// artifact directory.
    pub fn new(config: PipelineConfig, root_override: Option<PathBuf>, force: bool) -> Pipeline {
        let root = root_override.unwrap_or_else(|| config.io.artifacts.clone());
        let store = ArtifactStore::new(root, config.fingerprint(), force);
        Pipeline { config, store }
    }

    fn nmf_seed(&self, label: &str) -> u64 {
        derive_seed(self.config.seed, label)
    }

    /// Generates the synthetic league into `synth.out_dir`.
    pub fn synth(&self) -> Result<crate::synth::LeaguePaths> {
        let spec = LeagueSpec {
            players_per_archetype: self.config.synth.players_per_archetype,
            matchdays: self.config.synth.matchdays,
            teams: self.config.synth.teams,
            seed: derive_seed(self.config.seed, "synth"),
            ..LeagueSpec::default()
        };
        generate_season(&spec, &self.config.synth.out_dir)
    }

    /// Validates the raw event file and writes the canonical event artifact.
    pub fn ingest(&self) -> Result<IngestSummary> {
        self.store.ensure_root()?;
        let ingest_cfg = self.config.ingest.to_config()?;
        let outcome = ingest_events(&self.config.io.events, &ingest_cfg)?;
        let records = read_player_records(&self.config.io.records)?;
        let eligible = filter_eligible(&records);

        write_events_csv(&self.store.path("events.csv"), &outcome.events)?;
        let summary = IngestSummary {
            fingerprint: self.store.fingerprint.clone(),
            events: outcome.events.len() as u64,
            dropped_missing_location: outcome.dropped_missing_location,
            eligible_player_matches: eligible.len() as u64,
        };
        self.store.write_json("ingest.json", &summary)?;
        Ok(summary)
    }

    fn load_canonical_events(&self, stage: &str) -> Result<Vec<MatchEvent>> {
        let summary: IngestSummary = self.store.read_json("ingest.json", stage)?;
        self.store.check_fingerprint("ingest.json", &summary.fingerprint)?;
        let path = self.store.require("events.csv", stage)?;
        let ingest_cfg = self.config.ingest.to_config()?;
        Ok(ingest_events(&path, &ingest_cfg)?.events)
    }

    fn eligible_records(&self) -> Result<Vec<PlayerMatchRecord>> {
        let records = read_player_records(&self.config.io.records)?;
        Ok(filter_eligible(&records))
    }

    /// Builds the per-category heatmap matrices over the eligible universe.
    pub fn heatmaps(&self) -> Result<HeatmapsSummary> {
        self.store.ensure_root()?;
        let events = self.load_canonical_events("ingest")?;
        let eligible = self.eligible_records()?;
        let ingest_cfg = self.config.ingest.to_config()?;
        let spec = self.config.grid;

        let mut columns: Vec<PlayerMatchKey> = eligible.iter().map(|r| r.key()).collect();
        columns.sort();
        columns.dedup();

        let mut points = collect_points(&events, &ingest_cfg.mapping)?;
        // Heatmaps only for eligible player-matches.
        points.retain(|(key, _), _| columns.binary_search(key).is_ok());

        let mut nonzero = 0u64;
        let categories: Vec<ActionCategory> = self.config.layout.to_layout()?.categories().collect();
        for category in &categories {
            let heatmaps: Vec<Heatmap> = columns
                .par_iter()
                .map(|key| {
                    let pts = points
                        .get(&(key.clone(), *category))
                        .map(|v| v.as_slice())
                        .unwrap_or(&[]);
                    build_heatmap(&key.player_id, &key.match_id, *category, pts, &spec)
                })
                .collect();
            nonzero += heatmaps.iter().filter(|h| h.event_count > 0).count() as u64;
            let hm: HeatmapMatrix = build_matrix(&heatmaps, &spec)?;
            debug_assert_eq!(hm.columns, columns);
            write_matrix(&self.store.path(&format!("heatmaps/{}.mat", category.slug())), &hm.matrix)?;
        }

        let summary = HeatmapsSummary {
            fingerprint: self.store.fingerprint.clone(),
            grid: spec,
            columns,
            nonzero_heatmaps: nonzero,
        };
        self.store.write_json("heatmaps/index.json", &summary)?;
        Ok(summary)
    }

    /// Average positions, side-switch filtering, k selection and the merge
    /// to five labels.
    pub fn cluster_positions(&self) -> Result<PositionsSummary> {
        self.store.ensure_root()?;
        let events = self.load_canonical_events("ingest")?;
        let eligible = self.eligible_records()?;
        let ingest_cfg = self.config.ingest.to_config()?;
        let pos_cfg = &self.config.positions;

        let (samples, skipped) = average_positions(&events, &eligible, &ingest_cfg.mapping)?;
        let threshold = pos_cfg.side_switch_threshold;
        let kept: Vec<_> = samples
            .iter()
            .filter(|s| !detect_side_switch(s, threshold))
            .cloned()
            .collect();
        let side_switches = (samples.len() - kept.len()) as u64;

        let opts = pos_cfg.kmeans_options(derive_seed(self.config.seed, "kmeans"));
        let selection = select_k(&kept, pos_cfg.k_min..=pos_cfg.k_max, &opts)?;

        let centroids: Vec<crate::events::PitchPoint> = selection
            .fit
            .centroids
            .iter()
            .map(|c| crate::events::PitchPoint { x: c[0], y: c[1] })
            .collect();
        let merge_map = match pos_cfg.parsed_merge_map()? {
            Some(map) => {
                validate_merge_map(&map, selection.k)?;
                map
            }
            None => merge_side_clusters(&centroids, &pos_cfg.merge_params())?,
        };
        let model = PositionModel {
            k: selection.k,
            centroids,
            silhouette: selection.silhouette,
            merge_map,
        };

        let labeled = label_samples(&model, &kept, &selection.fit.assignments);
        let mut label_counts: BTreeMap<String, u64> = BTreeMap::new();
        for (_, label) in &labeled {
            *label_counts.entry(label.as_str().to_string()).or_insert(0) += 1;
        }

        let mut w = csv::Writer::from_path(self.store.path("positions_assignments.csv"))?;
        w.write_record(["match_id", "player_id", "cluster", "position"])?;
        for ((key, label), &cluster) in labeled.iter().zip(&selection.fit.assignments) {
            w.write_record([
                key.match_id.as_str(),
                key.player_id.as_str(),
                &cluster.to_string(),
                label.as_str(),
            ])?;
        }
        w.flush()?;

        let summary = PositionsSummary {
            fingerprint: self.store.fingerprint.clone(),
            model,
            per_k: selection.per_k,
            samples: kept.len() as u64,
            side_switches_removed: side_switches,
            skipped_without_actions: skipped,
            label_counts,
        };
        self.store.write_json("positions.json", &summary)?;
        Ok(summary)
    }

    fn load_positions(&self, stage: &str) -> Result<(PositionsSummary, BTreeMap<PlayerMatchKey, PositionLabel>)> {
        let summary: PositionsSummary = self.store.read_json("positions.json", stage)?;
        self.store.check_fingerprint("positions.json", &summary.fingerprint)?;
        let path = self.store.require("positions_assignments.csv", stage)?;
        let mut rdr = csv::ReaderBuilder::new().has_headers(true).from_path(&path)?;
        let mut map = BTreeMap::new();
        for (idx, row) in rdr.records().enumerate() {
            let row = row?;
            let label = PositionLabel::parse(row.get(3).unwrap_or("")).ok_or_else(|| {
                Error::MalformedRecord {
                    path: path.clone(),
                    line: idx as u64 + 2,
                    reason: format!("bad position `{}`", row.get(3).unwrap_or("")),
                }
            })?;
            map.insert(
                PlayerMatchKey::new(row.get(0).unwrap_or(""), row.get(1).unwrap_or("")),
                label,
            );
        }
        Ok((summary, map))
    }

    /// Per-category NMF over the heatmap matrices, then vector assembly.
    pub fn fit_vectors(&self) -> Result<VectorsSummary> {
        self.store.ensure_root()?;
        let heatmaps: HeatmapsSummary = self.store.read_json("heatmaps/index.json", "heatmaps")?;
        self.store.check_fingerprint("heatmaps/index.json", &heatmaps.fingerprint)?;
        let (_, positions) = self.load_positions("cluster-positions")?;
        let layout = self.config.layout.to_layout()?;
        let columns = heatmaps.columns;

        let fitted: Vec<Result<(ActionCategory, CategoryModel, f64)>> = layout
            .entries
            .par_iter()
            .map(|entry| {
                let path = self.store.require(&format!("heatmaps/{}.mat", entry.category.slug()), "heatmaps")?;
                let matrix: Array2<f64> = read_matrix(&path)?;
                if matrix.ncols() != columns.len() {
                    return Err(Error::DimensionMismatch {
                        expected: format!("{} columns", columns.len()),
                        got: format!("{}", matrix.ncols()),
                    });
                }
                let opts = self.config.nmf.options(self.nmf_seed(&format!("nmf.{}", entry.category.slug())));
                let model = nmf_fit(&matrix.view(), entry.k, &opts)?;
                let error = crate::nmf::reconstruction_error(&model, &matrix.view())?;
                Ok((
                    entry.category,
                    CategoryModel {
                        category: entry.category,
                        model,
                        columns: columns.clone(),
                    },
                    error,
                ))
            })
            .collect();

        let mut models: BTreeMap<ActionCategory, CategoryModel> = BTreeMap::new();
        let mut errors: BTreeMap<String, f64> = BTreeMap::new();
        for item in fitted {
            let (category, model, error) = item?;
            write_factor_model(
                &self.store.path(&format!("models/{}.nmf", category.slug())),
                &model.model,
            )?;
            errors.insert(category.slug().to_string(), error);
            models.insert(category, model);
        }

        let vectors = assemble(&models, &layout, &positions)?;
        let skipped = columns.len() - vectors.len();

        let mut matrix = Array2::zeros((layout.total_dim(), vectors.len()));
        for (col, v) in vectors.iter().enumerate() {
            matrix.column_mut(col).assign(&v.values);
        }
        write_matrix(&self.store.path("vectors.mat"), &matrix)?;
        let index = VectorsIndex {
            fingerprint: self.store.fingerprint.clone(),
            dim: layout.total_dim(),
            columns: vectors
                .iter()
                .map(|v| VectorColumn {
                    key: v.key.clone(),
                    position: v.position,
                })
                .collect(),
        };
        self.store.write_json("vectors.json", &index)?;
        write_vectors_csv(&self.store.path("vectors.csv"), &vectors, &layout)?;

        let summary = VectorsSummary {
            fingerprint: self.store.fingerprint.clone(),
            dim: layout.total_dim(),
            vectors: vectors.len() as u64,
            skipped_unpositioned: skipped as u64,
            reconstruction_errors: errors,
        };
        self.store.write_json("vectors_summary.json", &summary)?;
        Ok(summary)
    }

    fn load_vectors(&self, stage: &str) -> Result<Vec<PlayerMatchVector>> {
        let index: VectorsIndex = self.store.read_json("vectors.json", stage)?;
        self.store.check_fingerprint("vectors.json", &index.fingerprint)?;
        let matrix = read_matrix(&self.store.require("vectors.mat", stage)?)?;
        if matrix.dim() != (index.dim, index.columns.len()) {
            return Err(Error::CorruptArtifact {
                path: self.store.path("vectors.mat"),
                reason: format!(
                    "matrix is {:?}, index says {}×{}",
                    matrix.dim(),
                    index.dim,
                    index.columns.len()
                ),
            });
        }
        Ok(index
            .columns
            .into_iter()
            .enumerate()
            .map(|(col, c)| PlayerMatchVector {
                key: c.key,
                position: c.position,
                values: matrix.column(col).to_owned(),
            })
            .collect())
    }

    fn position_slug(label: PositionLabel) -> String {
        label.as_str().to_lowercase().replace('/', "")
    }

    /// Per-position style NMF, naming, assignment of every vector, and the
    /// descriptive statistics.
    pub fn fit_styles(&self) -> Result<StylesSummary> {
        self.store.ensure_root()?;
        let vectors = self.load_vectors("fit-vectors")?;
        let layout = self.config.layout.to_layout()?;
        let configs = self.config.style_configs()?;
        let opts = self.config.nmf.options(self.config.seed);

        let mut catalog = fit_styles(&vectors, &layout, &configs, &opts)?;
        name_styles(&mut catalog, &crate::styles::default_naming_rules());

        let mut assignments: Vec<(PlayerMatchKey, PositionLabel, StyleAssignment)> = Vec::new();
        for v in &vectors {
            let a = assign_style(v, &catalog)?;
            assignments.push((v.key.clone(), v.position, a));
        }

        let records: BTreeMap<PlayerMatchKey, PlayerMatchRecord> = self
            .eligible_records()?
            .into_iter()
            .map(|r| (r.key(), r))
            .collect();
        let style_counts: BTreeMap<PositionLabel, usize> = catalog
            .positions
            .iter()
            .map(|(&p, s)| (p, s.style_count()))
            .collect();
        let stats = style_stats(&assignments, &records, &style_counts, DEFAULT_MIN_START_COUNT)?;
        for (position, stats) in stats {
            if let Some(styles) = catalog.positions.get_mut(&position) {
                styles.stats = stats;
            }
        }

        let mut w = csv::Writer::from_path(self.store.path("styles_assignments.csv"))?;
        w.write_record(["match_id", "player_id", "position", "style_id", "style", "degenerate"])?;
        for (key, position, a) in &assignments {
            let styles = catalog.get(*position)?;
            w.write_record([
                key.match_id.as_str(),
                key.player_id.as_str(),
                position.as_str(),
                &a.style.to_string(),
                styles.names[a.style].as_str(),
                if a.degenerate { "1" } else { "0" },
            ])?;
        }
        w.flush()?;

        let mut positions_summary = BTreeMap::new();
        for (position, styles) in &catalog.positions {
            write_factor_model(
                &self.store.path(&format!("models/style_{}.nmf", Self::position_slug(*position))),
                &styles.model,
            )?;
            positions_summary.insert(
                position.as_str().to_string(),
                StylesSummaryEntry {
                    actions: styles.actions.iter().map(|a| a.slug().to_string()).collect(),
                    slots: styles.slots.clone(),
                    slot_names: styles.slot_names.clone(),
                    names: styles.names.clone(),
                    stats: styles.stats.clone(),
                },
            );
        }
        let summary = StylesSummary {
            fingerprint: self.store.fingerprint.clone(),
            total_styles: catalog.total_styles(),
            positions: positions_summary,
        };
        self.store.write_json("styles.json", &summary)?;
        Ok(summary)
    }

    fn load_catalog(&self, stage: &str) -> Result<(StylesSummary, StyleCatalog)> {
        let summary: StylesSummary = self.store.read_json("styles.json", stage)?;
        self.store.check_fingerprint("styles.json", &summary.fingerprint)?;
        let mut catalog = StyleCatalog::default();
        for (label, entry) in &summary.positions {
            let position = PositionLabel::parse(label)
                .ok_or_else(|| Error::UnknownPosition(label.clone()))?;
            let model = read_factor_model(
                &self
                    .store
                    .require(&format!("models/style_{}.nmf", Self::position_slug(position)), stage)?,
            )?;
            let actions = entry
                .actions
                .iter()
                .map(|a| {
                    ActionCategory::from_slug(a)
                        .ok_or_else(|| Error::Config(format!("unknown action `{a}` in styles.json")))
                })
                .collect::<Result<Vec<_>>>()?;
            catalog.positions.insert(
                position,
                crate::styles::PositionStyles {
                    position,
                    actions,
                    slots: entry.slots.clone(),
                    slot_names: entry.slot_names.clone(),
                    model,
                    names: entry.names.clone(),
                    stats: entry.stats.clone(),
                },
            );
        }
        Ok((summary, catalog))
    }

    fn load_assignments(
        &self,
        stage: &str,
    ) -> Result<BTreeMap<PlayerMatchKey, (PositionLabel, StyleAssignment)>> {
        let path = self.store.require("styles_assignments.csv", stage)?;
        let mut rdr = csv::ReaderBuilder::new().has_headers(true).from_path(&path)?;
        let mut out = BTreeMap::new();
        for (idx, row) in rdr.records().enumerate() {
            let row = row?;
            let line = idx as u64 + 2;
            let bad = |what: &str| Error::MalformedRecord {
                path: path.clone(),
                line,
                reason: what.to_string(),
            };
            let position =
                PositionLabel::parse(row.get(2).unwrap_or("")).ok_or_else(|| bad("bad position"))?;
            let style: usize = row.get(3).unwrap_or("").parse().map_err(|_| bad("bad style id"))?;
            let degenerate = row.get(5).unwrap_or("0") == "1";
            out.insert(
                PlayerMatchKey::new(row.get(0).unwrap_or(""), row.get(1).unwrap_or("")),
                (position, StyleAssignment { style, degenerate }),
            );
        }
        Ok(out)
    }

    /// Table-2-shaped CSV: one row per style with appearance counts and
    /// mean/SD of the performance indicators.
    pub fn table2(&self) -> Result<PathBuf> {
        let (summary, _) = self.load_catalog("fit-styles")?;
        let path = self.store.path("table2.csv");
        let mut w = csv::Writer::from_path(&path)?;
        w.write_record([
            "Position", "Style", "Total", "Domestic", "Foreign", "Rating", "Rating SD", "Goals",
            "Goals SD", "Shots", "Shots SD", "Assists", "Assists SD", "Win/Loss",
        ])?;
        // Published table order: ST, CM, L/RW, L/RFB, CB.
        const TABLE_ORDER: [PositionLabel; 5] = [
            PositionLabel::Striker,
            PositionLabel::CentralMidfielder,
            PositionLabel::WingForward,
            PositionLabel::FullBack,
            PositionLabel::CenterBack,
        ];
        for position in TABLE_ORDER {
            let Some(entry) = summary.positions.get(position.as_str()) else {
                continue;
            };
            for (style, stats) in entry.names.iter().zip(&entry.stats) {
                w.write_record([
                    position.as_str().to_string(),
                    style.clone(),
                    stats.total.to_string(),
                    stats.domestic.to_string(),
                    stats.foreign.to_string(),
                    format!("{}", stats.rating.mean),
                    format!("{}", stats.rating.sd),
                    format!("{}", stats.goals.mean),
                    format!("{}", stats.goals.sd),
                    format!("{}", stats.shots.mean),
                    format!("{}", stats.shots.sd),
                    format!("{}", stats.assists.mean),
                    format!("{}", stats.assists.sd),
                    format!("{}", stats.win_loss),
                ])?;
            }
        }
        w.flush()?;
        Ok(path)
    }

    /// Runs the full analytic chain.
    pub fn run_all(&self) -> Result<()> {
        self.ingest()?;
        self.heatmaps()?;
        self.cluster_positions()?;
        self.fit_vectors()?;
        self.fit_styles()?;
        self.table2()?;
        Ok(())
    }

    /// Loads everything the report builder needs from the artifacts.
    pub fn load_season(&self) -> Result<SeasonData> {
        let vectors = self.load_vectors("fit-vectors")?;
        let (_, catalog) = self.load_catalog("fit-styles")?;
        let assignments = self.load_assignments("fit-styles")?;
        let records: BTreeMap<PlayerMatchKey, PlayerMatchRecord> = self
            .eligible_records()?
            .into_iter()
            .map(|r| (r.key(), r))
            .collect();
        Ok(SeasonData {
            layout: self.config.layout.to_layout()?,
            vectors,
            assignments,
            records,
            catalog,
        })
    }

    pub fn compare(&self, player_a: &str, player_b: &str) -> Result<ComparisonReport> {
        let season = self.load_season()?;
        build_report(&season, player_a, player_b)
    }

    pub fn similar(&self, player: &str, top_n: usize) -> Result<Vec<SimilarityResult>> {
        let season = self.load_season()?;
        let population = season.season_vectors()?;
        most_similar(player, &population, top_n)
    }

    /// Sanity check used by tests: silhouette of the stored position model
    /// recomputed from assignments.
    pub fn recompute_silhouette(&self, samples: &[[f64; 2]], assignments: &[usize]) -> Result<f64> {
        silhouette_mean(samples, assignments)
    }
}

/// Reads an artifact file as raw bytes; used by determinism checks.
pub fn artifact_bytes(root: &Path, name: &str) -> Result<Vec<u8>> {
    Ok(std::fs::read(root.join(name))?)
}
