//! The five-part pairwise comparison report: basic info, similarity,
//! per-style match stats, chart-ready series, and the season general
//! vectors. Serialized as JSON (`docs/comparison_report.schema.json`).

use std::collections::BTreeMap;

use ndarray::Array1;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::events::{PlayerMatchKey, PlayerMatchRecord};
use crate::positions::PositionLabel;
use crate::similarity::{manhattan, pairwise_max_distance, similarity_percent};
use crate::styles::{StyleAssignment, StyleCatalog};
use crate::vectors::{season_vector, PlayerMatchVector, VectorLayout};

pub const REPORT_SCHEMA_VERSION: &str = "1";

/// Everything report building needs about one season of data.
#[derive(Debug, Clone)]
pub struct SeasonData {
    pub layout: VectorLayout,
    pub vectors: Vec<PlayerMatchVector>,
    pub assignments: BTreeMap<PlayerMatchKey, (PositionLabel, StyleAssignment)>,
    pub records: BTreeMap<PlayerMatchKey, PlayerMatchRecord>,
    pub catalog: StyleCatalog,
}

impl SeasonData {
    /// Season general vector per player, over every eligible match.
    pub fn season_vectors(&self) -> Result<BTreeMap<String, Array1<f64>>> {
        let mut grouped: BTreeMap<String, Vec<&Array1<f64>>> = BTreeMap::new();
        for v in &self.vectors {
            grouped.entry(v.key.player_id.clone()).or_default().push(&v.values);
        }
        grouped
            .into_iter()
            .map(|(player, vs)| Ok((player, season_vector(vs)?)))
            .collect()
    }
}

/// Part i: who the player is and how much they played.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlayerInfo {
    pub player_id: String,
    pub matches: u64,
    pub minutes: f64,
    pub mean_rating: f64,
    pub nationality: String,
    /// Matches per detected position.
    pub positions: BTreeMap<String, u64>,
}

/// Part ii: the similarity between the two season vectors.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimilarityPart {
    pub manhattan: f64,
    /// Maximal pairwise distance in the season population.
    pub d_max: f64,
    pub percent: f64,
}

/// Part iii: one player's matches and mean rating in one style.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StyleUsage {
    pub position: String,
    pub style_id: usize,
    pub style_name: String,
    pub matches: u64,
    pub mean_rating: f64,
}

/// Part iv: the same numbers shaped for a grouped bar / radar rendering.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChartData {
    /// Union of styles either player used, as "POSITION: name" labels.
    pub style_labels: Vec<String>,
    pub matches: [Vec<u64>; 2],
    pub mean_ratings: [Vec<f64>; 2],
}

/// Part v: one season general vector with its slot names.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeasonVectorPart {
    pub player_id: String,
    pub slot_abbrs: Vec<String>,
    pub slot_names: Vec<String>,
    pub values: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonReport {
    pub schema_version: String,
    pub players: [PlayerInfo; 2],
    pub similarity: SimilarityPart,
    pub style_breakdown: [Vec<StyleUsage>; 2],
    pub chart: ChartData,
    pub season_vectors: [SeasonVectorPart; 2],
}

fn player_info(data: &SeasonData, player: &str) -> Result<PlayerInfo> {
    let mut matches = 0;
    let mut minutes = 0.0;
    let mut rating_sum = 0.0;
    let mut nationality = String::new();
    let mut positions: BTreeMap<String, u64> = BTreeMap::new();
    for v in data.vectors.iter().filter(|v| v.key.player_id == player) {
        let record = data.records.get(&v.key).ok_or_else(|| Error::MissingRecord {
            match_id: v.key.match_id.clone(),
            player_id: v.key.player_id.clone(),
        })?;
        matches += 1;
        minutes += record.minutes_played;
        rating_sum += record.rating;
        nationality = match record.nationality {
            crate::events::Nationality::Domestic => "domestic".to_string(),
            crate::events::Nationality::Foreign => "foreign".to_string(),
        };
        *positions.entry(v.position.as_str().to_string()).or_insert(0) += 1;
    }
    if matches == 0 {
        return Err(Error::PlayerNotFound(player.to_string()));
    }
    Ok(PlayerInfo {
        player_id: player.to_string(),
        matches,
        minutes,
        mean_rating: rating_sum / matches as f64,
        nationality,
        positions,
    })
}

fn style_breakdown(data: &SeasonData, player: &str) -> Result<Vec<StyleUsage>> {
    struct Acc {
        matches: u64,
        rating_sum: f64,
    }
    let mut acc: BTreeMap<(PositionLabel, usize), Acc> = BTreeMap::new();
    for v in data.vectors.iter().filter(|v| v.key.player_id == player) {
        let (position, assignment) = data
            .assignments
            .get(&v.key)
            .ok_or_else(|| Error::MissingRecord {
                match_id: v.key.match_id.clone(),
                player_id: v.key.player_id.clone(),
            })?;
        let record = data.records.get(&v.key).ok_or_else(|| Error::MissingRecord {
            match_id: v.key.match_id.clone(),
            player_id: v.key.player_id.clone(),
        })?;
        let entry = acc.entry((*position, assignment.style)).or_insert(Acc {
            matches: 0,
            rating_sum: 0.0,
        });
        entry.matches += 1;
        entry.rating_sum += record.rating;
    }
    acc.into_iter()
        .map(|((position, style_id), a)| {
            let styles = data.catalog.get(position)?;
            Ok(StyleUsage {
                position: position.as_str().to_string(),
                style_id,
                style_name: styles.names[style_id].clone(),
                matches: a.matches,
                mean_rating: a.rating_sum / a.matches as f64,
            })
        })
        .collect()
}

fn chart_data(breakdowns: &[Vec<StyleUsage>; 2]) -> ChartData {
    let mut labels: Vec<String> = Vec::new();
    for b in breakdowns.iter().flatten() {
        let label = format!("{}: {}", b.position, b.style_name);
        if !labels.contains(&label) {
            labels.push(label);
        }
    }
    labels.sort();
    let series = |breakdown: &Vec<StyleUsage>| -> (Vec<u64>, Vec<f64>) {
        let mut matches = vec![0u64; labels.len()];
        let mut ratings = vec![0.0f64; labels.len()];
        for usage in breakdown {
            let label = format!("{}: {}", usage.position, usage.style_name);
            let i = labels.iter().position(|l| l == &label).unwrap();
            matches[i] = usage.matches;
            ratings[i] = usage.mean_rating;
        }
        (matches, ratings)
    };
    let (m0, r0) = series(&breakdowns[0]);
    let (m1, r1) = series(&breakdowns[1]);
    ChartData {
        style_labels: labels,
        matches: [m0, m1],
        mean_ratings: [r0, r1],
    }
}

fn season_part(data: &SeasonData, player: &str, vector: &Array1<f64>) -> SeasonVectorPart {
    let names = data.layout.slot_names();
    SeasonVectorPart {
        player_id: player.to_string(),
        slot_abbrs: names.iter().map(|s| s.abbr.clone()).collect(),
        slot_names: names.iter().map(|s| s.full.clone()).collect(),
        values: vector.to_vec(),
    }
}

/// Builds the five-part report comparing two players over the season.
pub fn build_report(data: &SeasonData, player_a: &str, player_b: &str) -> Result<ComparisonReport> {
    let season = data.season_vectors()?;
    let va = season
        .get(player_a)
        .ok_or_else(|| Error::PlayerNotFound(player_a.to_string()))?;
    let vb = season
        .get(player_b)
        .ok_or_else(|| Error::PlayerNotFound(player_b.to_string()))?;

    let d = manhattan(va, vb)?;
    let d_max = pairwise_max_distance(&season);
    let percent = similarity_percent(d.min(d_max), d_max)?;

    let breakdowns = [style_breakdown(data, player_a)?, style_breakdown(data, player_b)?];
    let chart = chart_data(&breakdowns);

    Ok(ComparisonReport {
        schema_version: REPORT_SCHEMA_VERSION.to_string(),
        players: [player_info(data, player_a)?, player_info(data, player_b)?],
        similarity: SimilarityPart {
            manhattan: d,
            d_max,
            percent,
        },
        style_breakdown: breakdowns,
        chart,
        season_vectors: [season_part(data, player_a, va), season_part(data, player_b, vb)],
    })
}

/// Flattens part iii to CSV rows: `player_id,position,style,matches,mean_rating`.
pub fn write_breakdown_csv(path: &std::path::Path, report: &ComparisonReport) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(["player_id", "position", "style", "matches", "mean_rating"])?;
    for (player, breakdown) in report.players.iter().zip(report.style_breakdown.iter()) {
        for usage in breakdown {
            w.write_record([
                player.player_id.as_str(),
                usage.position.as_str(),
                usage.style_name.as_str(),
                &usage.matches.to_string(),
                &format!("{}", usage.mean_rating),
            ])?;
        }
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::events::{MatchOutcome, Nationality, StartPosition};
    use crate::nmf::NmfOptions;
    use crate::styles::{assign_style, fit_styles, PositionStyleConfig};
    use crate::vectors::VectorLayout;
    use crate::events::ActionCategory;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    /// Two-player season: "alpha" and "beta" are byte-identical strikers,
    /// "gamma" is far away so d_max is non-zero.
    fn fixture() -> SeasonData {
        let layout = VectorLayout::default();
        let (shot, _) = layout.slot_range(ActionCategory::Shot).unwrap();
        let (header, _) = layout.slot_range(ActionCategory::Header).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(5);

        let mut vectors = Vec::new();
        for m in 0..6 {
            for player in ["alpha", "beta", "gamma"] {
                let mut values = Array1::zeros(44);
                if player == "gamma" {
                    for d in 0..4 {
                        values[header + d] = 2.0 + rng.random::<f64>() * 0.01;
                    }
                } else {
                    // Identical twins: same deterministic pattern per match.
                    for d in 0..4 {
                        values[shot + d] = 1.0 + (m as f64) * 0.1 + d as f64 * 0.2;
                    }
                }
                vectors.push(PlayerMatchVector {
                    key: PlayerMatchKey::new(&format!("m{m}"), player),
                    position: PositionLabel::Striker,
                    values,
                });
            }
        }

        let configs = vec![PositionStyleConfig {
            position: PositionLabel::Striker,
            actions: vec![ActionCategory::Shot, ActionCategory::Header],
            styles: 2,
        }];
        let catalog = fit_styles(&vectors, &layout, &configs, &NmfOptions::default()).unwrap();

        let mut assignments = BTreeMap::new();
        let mut records = BTreeMap::new();
        for v in &vectors {
            let a = assign_style(v, &catalog).unwrap();
            assignments.insert(v.key.clone(), (v.position, a));
            records.insert(
                v.key.clone(),
                PlayerMatchRecord {
                    match_id: v.key.match_id.clone(),
                    player_id: v.key.player_id.clone(),
                    minutes_played: 90.0,
                    start_position: StartPosition::Forward,
                    rating: 7.0,
                    goals: 0,
                    shots: 2,
                    assists: 0,
                    nationality: Nationality::Domestic,
                    outcome: MatchOutcome::Win,
                },
            );
        }

        SeasonData {
            layout,
            vectors,
            assignments,
            records,
            catalog,
        }
    }

    #[test]
    fn identical_players_report_100_percent_and_equal_tables() {
        let data = fixture();
        let report = build_report(&data, "alpha", "beta").unwrap();
        assert_eq!(report.similarity.percent, 100.0);
        assert_eq!(report.similarity.manhattan, 0.0);
        assert_eq!(report.style_breakdown[0], report.style_breakdown[1]);
        assert_eq!(report.players[0].matches, 6);
    }

    #[test]
    fn part_iii_counts_sum_to_match_count() {
        let data = fixture();
        let report = build_report(&data, "alpha", "gamma").unwrap();
        for (info, breakdown) in report.players.iter().zip(report.style_breakdown.iter()) {
            let total: u64 = breakdown.iter().map(|u| u.matches).sum();
            assert_eq!(total, info.matches);
        }
        assert!(report.similarity.percent < 100.0);
    }

    #[test]
    fn all_five_parts_serialize() {
        let data = fixture();
        let report = build_report(&data, "alpha", "gamma").unwrap();
        let json = serde_json::to_value(&report).unwrap();
        for part in ["players", "similarity", "style_breakdown", "chart", "season_vectors"] {
            assert!(json.get(part).is_some(), "missing part {part}");
        }
        assert_eq!(json["season_vectors"][0]["values"].as_array().unwrap().len(), 44);
        let round: ComparisonReport = serde_json::from_value(json).unwrap();
        assert_eq!(round, report);
    }

    #[test]
    fn missing_player_is_an_error() {
        let data = fixture();
        assert!(matches!(
            build_report(&data, "alpha", "nobody"),
            Err(Error::PlayerNotFound(_))
        ));
    }
}
