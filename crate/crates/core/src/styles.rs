//! Per-position style discovery: a second NMF over the position's slice of
//! the player vectors, nearest-component style assignment, and the
//! descriptive statistics table.

use std::collections::BTreeMap;

use ndarray::Array2;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::events::{ActionCategory, MatchOutcome, Nationality, PlayerMatchKey, PlayerMatchRecord};
use crate::nmf::{nmf_fit, nmf_transform, FactorModel, NmfOptions};
use crate::positions::PositionLabel;
use crate::vectors::{PlayerMatchVector, VectorLayout};

/// Which action categories feed one position's style model, and how many
/// styles to extract.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PositionStyleConfig {
    pub position: PositionLabel,
    pub actions: Vec<ActionCategory>,
    pub styles: usize,
}

/// The default per-position action subsets and style counts (4/4/3/4/3,
/// eighteen styles in total).
pub fn default_style_configs() -> Vec<PositionStyleConfig> {
    use ActionCategory::*;
    vec![
        PositionStyleConfig {
            position: PositionLabel::Striker,
            actions: vec![Shot, Cross, Dribble, Pass, KeyPass, Header],
            styles: 4,
        },
        PositionStyleConfig {
            position: PositionLabel::CentralMidfielder,
            actions: vec![Dribble, Pass, LongPass, Recovery, Header, KeyPass],
            styles: 4,
        },
        PositionStyleConfig {
            position: PositionLabel::WingForward,
            actions: vec![Shot, Cross, Dribble, Pass, KeyPass],
            styles: 3,
        },
        PositionStyleConfig {
            position: PositionLabel::FullBack,
            actions: vec![Cross, Dribble, Pass, Recovery, Interception],
            styles: 4,
        },
        PositionStyleConfig {
            position: PositionLabel::CenterBack,
            actions: vec![Dribble, Pass, LongPass, Header, Clearance, Interception],
            styles: 3,
        },
    ]
}

/// Aggregates of one style (one Table-2 row).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StyleStats {
    pub total: u64,
    pub domestic: u64,
    pub foreign: u64,
    pub rating: MeanSd,
    pub goals: MeanSd,
    pub shots: MeanSd,
    pub assists: MeanSd,
    /// Wins ÷ losses, draws excluded. +∞ when undefeated with at least one
    /// win; 0 when no decided matches at all.
    pub win_loss: f64,
    pub wins: u64,
    pub draws: u64,
    pub losses: u64,
    /// Official starting positions observed more than `min_start_count`
    /// times within the style.
    pub start_positions: BTreeMap<String, u64>,
}

/// Mean and population standard deviation (divide by N).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MeanSd {
    pub mean: f64,
    pub sd: f64,
}

impl MeanSd {
    fn of(values: &[f64]) -> MeanSd {
        if values.is_empty() {
            return MeanSd { mean: 0.0, sd: 0.0 };
        }
        let n = values.len() as f64;
        let mean = values.iter().sum::<f64>() / n;
        let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n;
        MeanSd {
            mean,
            sd: var.sqrt(),
        }
    }
}

/// The fitted styles of one position.
#[derive(Debug, Clone)]
pub struct PositionStyles {
    pub position: PositionLabel,
    pub actions: Vec<ActionCategory>,
    /// Indices into the full vector layout that form the sub-vector.
    pub slots: Vec<usize>,
    /// Full slot names, parallel to `slots`.
    pub slot_names: Vec<String>,
    pub model: FactorModel,
    /// Style names; `Style-<position>-<index>` until naming rules run.
    pub names: Vec<String>,
    pub stats: Vec<StyleStats>,
}

impl PositionStyles {
    pub fn style_count(&self) -> usize {
        self.model.k
    }

    /// W column of one style over the sub-vector slots.
    pub fn component(&self, style: usize) -> ndarray::ArrayView1<'_, f64> {
        self.model.w.column(style)
    }
}

/// All fitted styles, keyed by position.
#[derive(Debug, Clone, Default)]
pub struct StyleCatalog {
    pub positions: BTreeMap<PositionLabel, PositionStyles>,
}

impl StyleCatalog {
    pub fn total_styles(&self) -> usize {
        self.positions.values().map(|p| p.style_count()).sum()
    }

    pub fn get(&self, position: PositionLabel) -> Result<&PositionStyles> {
        self.positions
            .get(&position)
            .ok_or_else(|| Error::UnknownPosition(position.as_str().to_string()))
    }
}

fn sub_slots(layout: &VectorLayout, actions: &[ActionCategory]) -> Result<(Vec<usize>, Vec<String>)> {
    let names = layout.slot_names();
    let mut slots = Vec::new();
    let mut slot_names = Vec::new();
    for &category in actions {
        let (start, len) = layout.slot_range(category).ok_or_else(|| {
            Error::Config(format!("style config uses {category}, absent from the layout"))
        })?;
        for i in start..start + len {
            slots.push(i);
            slot_names.push(names[i].full.clone());
        }
    }
    Ok((slots, slot_names))
}

fn default_name(position: PositionLabel, index: usize) -> String {
    format!("Style-{}-{index}", position.as_str())
}

/// Fits one NMF per position over the stacked sub-vectors (`d′ × l`, one
/// column per player-match). Components come back ordered and unnamed.
pub fn fit_styles(
    vectors: &[PlayerMatchVector],
    layout: &VectorLayout,
    configs: &[PositionStyleConfig],
    opts: &NmfOptions,
) -> Result<StyleCatalog> {
    let mut grouped: BTreeMap<PositionLabel, Vec<&PlayerMatchVector>> = BTreeMap::new();
    for v in vectors {
        grouped.entry(v.position).or_default().push(v);
    }

    let mut catalog = StyleCatalog::default();
    for cfg in configs {
        let group = grouped.remove(&cfg.position).unwrap_or_default();
        if group.is_empty() {
            return Err(Error::EmptyInput(format!(
                "no player-matches for position {}",
                cfg.position
            )));
        }
        if group.len() < cfg.styles {
            return Err(Error::PositionGroupTooSmall {
                position: cfg.position.as_str().to_string(),
                count: group.len(),
                styles: cfg.styles,
            });
        }
        let (slots, slot_names) = sub_slots(layout, &cfg.actions)?;

        let mut matrix = Array2::zeros((slots.len(), group.len()));
        for (col, v) in group.iter().enumerate() {
            for (row, &slot) in slots.iter().enumerate() {
                matrix[(row, col)] = v.values[slot];
            }
        }

        let seed = crate::artifacts::derive_seed(opts.seed, &format!("styles.{}", cfg.position.as_str()));
        let model = nmf_fit(&matrix.view(), cfg.styles, &NmfOptions { seed, ..*opts })?;
        let names = (0..cfg.styles).map(|i| default_name(cfg.position, i)).collect();
        catalog.positions.insert(
            cfg.position,
            PositionStyles {
                position: cfg.position,
                actions: cfg.actions.clone(),
                slots,
                slot_names,
                model,
                names,
                stats: Vec::new(),
            },
        );
    }
    Ok(catalog)
}

/// A style decision for one player-match.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct StyleAssignment {
    pub style: usize,
    /// The sub-vector was all zeros; style 0 by convention.
    pub degenerate: bool,
}

/// The most similar style of one vector within its position: argmax of the
/// transformed sub-vector, ties to the lowest style id.
pub fn assign_style(v: &PlayerMatchVector, catalog: &StyleCatalog) -> Result<StyleAssignment> {
    let styles = catalog.get(v.position)?;
    let sub = ndarray::Array1::from_iter(styles.slots.iter().map(|&s| v.values[s]));
    if sub.sum() == 0.0 {
        return Ok(StyleAssignment {
            style: 0,
            degenerate: true,
        });
    }
    let weights = nmf_transform(&styles.model, &sub.view())?;
    let mut best = 0;
    let mut best_w = weights[0];
    for (i, &w) in weights.iter().enumerate().skip(1) {
        if w > best_w {
            best_w = w;
            best = i;
        }
    }
    Ok(StyleAssignment {
        style: best,
        degenerate: false,
    })
}

/// Threshold above which a starting position is listed for a style.
pub const DEFAULT_MIN_START_COUNT: u64 = 100;

/// Computes the per-style aggregates from assignments and match records.
/// Returns, per position, one `StyleStats` per style id.
pub fn style_stats(
    assignments: &[(PlayerMatchKey, PositionLabel, StyleAssignment)],
    records: &BTreeMap<PlayerMatchKey, PlayerMatchRecord>,
    style_counts: &BTreeMap<PositionLabel, usize>,
    min_start_count: u64,
) -> Result<BTreeMap<PositionLabel, Vec<StyleStats>>> {
    struct Acc {
        ratings: Vec<f64>,
        goals: Vec<f64>,
        shots: Vec<f64>,
        assists: Vec<f64>,
        domestic: u64,
        foreign: u64,
        wins: u64,
        draws: u64,
        losses: u64,
        starts: BTreeMap<String, u64>,
    }
    impl Acc {
        fn new() -> Acc {
            Acc {
                ratings: Vec::new(),
                goals: Vec::new(),
                shots: Vec::new(),
                assists: Vec::new(),
                domestic: 0,
                foreign: 0,
                wins: 0,
                draws: 0,
                losses: 0,
                starts: BTreeMap::new(),
            }
        }
    }

    let mut acc: BTreeMap<(PositionLabel, usize), Acc> = BTreeMap::new();
    for (&position, &count) in style_counts {
        for style in 0..count {
            acc.insert((position, style), Acc::new());
        }
    }

    for (key, position, assignment) in assignments {
        let record = records.get(key).ok_or_else(|| Error::MissingRecord {
            match_id: key.match_id.clone(),
            player_id: key.player_id.clone(),
        })?;
        let entry = acc
            .get_mut(&(*position, assignment.style))
            .ok_or_else(|| Error::UnknownPosition(position.as_str().to_string()))?;
        entry.ratings.push(record.rating);
        entry.goals.push(record.goals as f64);
        entry.shots.push(record.shots as f64);
        entry.assists.push(record.assists as f64);
        match record.nationality {
            Nationality::Domestic => entry.domestic += 1,
            Nationality::Foreign => entry.foreign += 1,
        }
        match record.outcome {
            MatchOutcome::Win => entry.wins += 1,
            MatchOutcome::Draw => entry.draws += 1,
            MatchOutcome::Loss => entry.losses += 1,
        }
        *entry.starts.entry(record.start_position.as_str().to_string()).or_insert(0) += 1;
    }

    let mut out: BTreeMap<PositionLabel, Vec<StyleStats>> = BTreeMap::new();
    for ((position, _style), a) in acc {
        let win_loss = if a.losses > 0 {
            a.wins as f64 / a.losses as f64
        } else if a.wins > 0 {
            f64::INFINITY
        } else {
            0.0
        };
        out.entry(position).or_default().push(StyleStats {
            total: a.ratings.len() as u64,
            domestic: a.domestic,
            foreign: a.foreign,
            rating: MeanSd::of(&a.ratings),
            goals: MeanSd::of(&a.goals),
            shots: MeanSd::of(&a.shots),
            assists: MeanSd::of(&a.assists),
            win_loss,
            wins: a.wins,
            draws: a.draws,
            losses: a.losses,
            start_positions: a.starts.into_iter().filter(|(_, c)| *c > min_start_count).collect(),
        });
    }
    Ok(out)
}

/// A declarative naming rule: a component whose top-weight slots are exactly
/// `signature` (as full slot names, order-free) gets `name`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NamingRule {
    pub position: PositionLabel,
    pub name: String,
    pub signature: Vec<String>,
}

fn rule(position: PositionLabel, name: &str, signature: &[&str]) -> NamingRule {
    NamingRule {
        position,
        name: name.to_string(),
        signature: signature.iter().map(|s| s.to_string()).collect(),
    }
}

/// The published 18-style rule table. Signatures reference full slot names
/// (abbreviations are ambiguous: "LS" is both Long Shot and Left Shot).
pub fn default_naming_rules() -> Vec<NamingRule> {
    use PositionLabel::*;
    vec![
        rule(Striker, "Poacher", &["Close Shot", "Front Header"]),
        rule(Striker, "Second Striker", &["Long Shot", "Center Dribble", "Center Pass"]),
        rule(
            Striker,
            "Mobile Striker",
            &[
                "Right Shot",
                "Left Shot",
                "L. Backline Cross",
                "R. Backline Cross",
                "L. Flank Dribble",
                "R. Flank Dribble",
                "L. Flank Pass",
                "R. Flank Pass",
            ],
        ),
        rule(Striker, "Target Man", &["Mid Front Header"]),
        rule(
            CentralMidfielder,
            "Playmaker",
            &["Center Dribble", "Center Pass", "Center Long Pass"],
        ),
        rule(
            CentralMidfielder,
            "L Defensive Midfielder",
            &["L. Back Dribble", "L. Back Pass", "L. Back Long Pass", "L. Back Recovery"],
        ),
        rule(
            CentralMidfielder,
            "R Defensive Midfielder",
            &["R. Back Dribble", "R. Back Pass", "R. Back Long Pass", "R. Back Recovery"],
        ),
        rule(
            CentralMidfielder,
            "Wide Midfielder",
            &[
                "L. Flank Dribble",
                "R. Flank Dribble",
                "L. Flank Pass",
                "R. Flank Pass",
                "L. Flank Long Pass",
                "R. Flank Long Pass",
                "L. Flank Recovery",
                "R. Flank Recovery",
                "Mid Front Header",
            ],
        ),
        rule(
            WingForward,
            "L Winger",
            &["L. Backline Cross", "L. Flank Cross", "L. Flank Dribble", "L. Flank Pass"],
        ),
        rule(
            WingForward,
            "R Winger",
            &["R. Backline Cross", "R. Flank Cross", "R. Flank Dribble", "R. Flank Pass"],
        ),
        rule(
            WingForward,
            "Inside Forward",
            &["Center Dribble", "Center Pass", "Close Shot", "Long Shot"],
        ),
        rule(
            FullBack,
            "L Wing Back",
            &["L. Flank Dribble", "L. Flank Pass", "L. Flank Cross", "L. Backline Cross"],
        ),
        rule(
            FullBack,
            "R Wing Back",
            &["R. Flank Dribble", "R. Flank Pass", "R. Flank Cross", "R. Backline Cross"],
        ),
        rule(FullBack, "L Back", &["L. Back Dribble", "L. Back Pass", "L. Back Recovery"]),
        rule(FullBack, "R Back", &["R. Back Dribble", "R. Back Pass", "R. Back Recovery"]),
        rule(
            CenterBack,
            "L Ball Playing Defender",
            &["L. Back Dribble", "L. Back Pass", "L. Back Long Pass"],
        ),
        rule(
            CenterBack,
            "R Ball Playing Defender",
            &["R. Back Dribble", "R. Back Pass", "R. Back Long Pass"],
        ),
        rule(
            CenterBack,
            "Central Defender",
            &[
                "Back Header",
                "Middle Clearance",
                "Left Clearance",
                "Inner Clearance",
                "Right Clearance",
            ],
        ),
    ]
}

/// Names every component whose top-|signature| slots match a rule exactly;
/// each rule names at most one component, unmatched components keep their
/// fallback name.
pub fn name_styles(catalog: &mut StyleCatalog, rules: &[NamingRule]) {
    for styles in catalog.positions.values_mut() {
        let mut consumed = vec![false; rules.len()];
        for style in 0..styles.style_count() {
            let component = styles.component(style);
            let mut order: Vec<usize> = (0..component.len()).collect();
            order.sort_by(|&a, &b| component[b].total_cmp(&component[a]).then(a.cmp(&b)));

            let matched = rules.iter().enumerate().find(|(ri, r)| {
                if consumed[*ri] || r.position != styles.position {
                    return false;
                }
                if r.signature.len() > order.len() {
                    return false;
                }
                let top: std::collections::BTreeSet<&str> = order[..r.signature.len()]
                    .iter()
                    .map(|&i| styles.slot_names[i].as_str())
                    .collect();
                r.signature.iter().all(|s| top.contains(s.as_str()))
            });
            if let Some((ri, r)) = matched {
                styles.names[style] = r.name.clone();
                consumed[ri] = true;
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::events::StartPosition;
    use ndarray::Array1;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn key(m: &str, p: &str) -> PlayerMatchKey {
        PlayerMatchKey::new(m, p)
    }

    /// Striker vectors with two planted archetypes: mass either on the Shot
    /// slots or on the Header slots.
    fn planted_striker_vectors(per_style: usize) -> Vec<PlayerMatchVector> {
        let layout = VectorLayout::default();
        let (shot_start, _) = layout.slot_range(ActionCategory::Shot).unwrap();
        let (header_start, _) = layout.slot_range(ActionCategory::Header).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let mut out = Vec::new();
        for i in 0..per_style * 2 {
            let mut values = Array1::zeros(44);
            let base = if i % 2 == 0 { shot_start } else { header_start };
            for d in 0..3 {
                values[base + d] = 1.0 + rng.random::<f64>();
            }
            out.push(PlayerMatchVector {
                key: key(&format!("m{}", i / 2), &format!("p{}", i % 7)),
                position: PositionLabel::Striker,
                values,
            });
        }
        out
    }

    fn st_only_configs(styles: usize) -> Vec<PositionStyleConfig> {
        vec![PositionStyleConfig {
            position: PositionLabel::Striker,
            actions: vec![
                ActionCategory::Shot,
                ActionCategory::Cross,
                ActionCategory::Dribble,
                ActionCategory::Pass,
                ActionCategory::KeyPass,
                ActionCategory::Header,
            ],
            styles,
        }]
    }

    #[test]
    fn defaults_give_18_styles_over_5_positions() {
        let configs = default_style_configs();
        assert_eq!(configs.len(), 5);
        let total: usize = configs.iter().map(|c| c.styles).sum();
        assert_eq!(total, 18);
        let counts: Vec<usize> = configs.iter().map(|c| c.styles).collect();
        assert_eq!(counts, vec![4, 4, 3, 4, 3]);
    }

    #[test]
    fn planted_archetypes_are_recovered() {
        let vectors = planted_striker_vectors(40);
        let layout = VectorLayout::default();
        let catalog = fit_styles(&vectors, &layout, &st_only_configs(2), &NmfOptions::default()).unwrap();

        let mut by_truth = [[0u64; 2]; 2];
        for (i, v) in vectors.iter().enumerate() {
            let a = assign_style(v, &catalog).unwrap();
            assert!(!a.degenerate);
            by_truth[i % 2][a.style] += 1;
        }
        for truth in 0..2 {
            let total: u64 = by_truth[truth].iter().sum();
            let max: u64 = *by_truth[truth].iter().max().unwrap();
            assert!(
                max as f64 / total as f64 >= 0.8,
                "style purity too low: {by_truth:?}"
            );
        }
    }

    #[test]
    fn single_planted_style_reconstructs_at_k1() {
        let layout = VectorLayout::default();
        let (start, _) = layout.slot_range(ActionCategory::Shot).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let vectors: Vec<PlayerMatchVector> = (0..30)
            .map(|i| {
                let mut values = Array1::zeros(44);
                let scale = 0.5 + rng.random::<f64>();
                for d in 0..4 {
                    values[start + d] = scale * (1.0 + d as f64);
                }
                PlayerMatchVector {
                    key: key(&format!("m{i}"), "p0"),
                    position: PositionLabel::Striker,
                    values,
                }
            })
            .collect();
        let opts = NmfOptions {
            max_iter: 2000,
            tol: 0.0,
            seed: 0,
        };
        let catalog = fit_styles(&vectors, &layout, &st_only_configs(1), &opts).unwrap();
        let styles = catalog.get(PositionLabel::Striker).unwrap();

        let mut matrix = Array2::zeros((styles.slots.len(), vectors.len()));
        for (col, v) in vectors.iter().enumerate() {
            for (row, &slot) in styles.slots.iter().enumerate() {
                matrix[(row, col)] = v.values[slot];
            }
        }
        let err = crate::nmf::reconstruction_error(&styles.model, &matrix.view()).unwrap();
        let norm = matrix.iter().map(|v| v * v).sum::<f64>().sqrt();
        assert!(err / norm < 1e-3, "relative error {}", err / norm);
    }

    #[test]
    fn empty_position_group_is_an_error() {
        let vectors = planted_striker_vectors(5);
        let layout = VectorLayout::default();
        let mut configs = st_only_configs(2);
        configs.push(PositionStyleConfig {
            position: PositionLabel::CenterBack,
            actions: vec![ActionCategory::Clearance],
            styles: 3,
        });
        assert!(matches!(
            fit_styles(&vectors, &layout, &configs, &NmfOptions::default()),
            Err(Error::EmptyInput(_))
        ));
    }

    #[test]
    fn group_smaller_than_style_count_is_an_error() {
        let vectors = planted_striker_vectors(1); // 2 vectors
        let layout = VectorLayout::default();
        assert!(matches!(
            fit_styles(&vectors, &layout, &st_only_configs(3), &NmfOptions::default()),
            Err(Error::PositionGroupTooSmall { .. })
        ));
    }

    #[test]
    fn zero_subvector_is_degenerate_style_zero() {
        let vectors = planted_striker_vectors(10);
        let layout = VectorLayout::default();
        let catalog = fit_styles(&vectors, &layout, &st_only_configs(2), &NmfOptions::default()).unwrap();
        let zero = PlayerMatchVector {
            key: key("mz", "pz"),
            position: PositionLabel::Striker,
            values: Array1::zeros(44),
        };
        let a = assign_style(&zero, &catalog).unwrap();
        assert_eq!(a.style, 0);
        assert!(a.degenerate);
    }

    #[test]
    fn missing_position_is_an_error() {
        let vectors = planted_striker_vectors(10);
        let layout = VectorLayout::default();
        let catalog = fit_styles(&vectors, &layout, &st_only_configs(2), &NmfOptions::default()).unwrap();
        let cb = PlayerMatchVector {
            key: key("m", "p"),
            position: PositionLabel::CenterBack,
            values: Array1::zeros(44),
        };
        assert!(matches!(assign_style(&cb, &catalog), Err(Error::UnknownPosition(_))));
    }

    fn record(
        k: &PlayerMatchKey,
        rating: f64,
        outcome: MatchOutcome,
        nationality: Nationality,
    ) -> PlayerMatchRecord {
        PlayerMatchRecord {
            match_id: k.match_id.clone(),
            player_id: k.player_id.clone(),
            minutes_played: 90.0,
            start_position: StartPosition::Forward,
            rating,
            goals: 1,
            shots: 3,
            assists: 0,
            nationality,
            outcome,
        }
    }

    #[test]
    fn stats_match_the_hand_computed_fixture() {
        let keys: Vec<PlayerMatchKey> = (0..4).map(|i| key(&format!("m{i}"), "p")).collect();
        let assignment = StyleAssignment {
            style: 0,
            degenerate: false,
        };
        let assignments: Vec<(PlayerMatchKey, PositionLabel, StyleAssignment)> = keys
            .iter()
            .map(|k| (k.clone(), PositionLabel::Striker, assignment))
            .collect();
        let records: BTreeMap<PlayerMatchKey, PlayerMatchRecord> = [
            record(&keys[0], 7.0, MatchOutcome::Win, Nationality::Domestic),
            record(&keys[1], 8.0, MatchOutcome::Win, Nationality::Foreign),
            record(&keys[2], 7.0, MatchOutcome::Loss, Nationality::Domestic),
            record(&keys[3], 8.0, MatchOutcome::Draw, Nationality::Domestic),
        ]
        .into_iter()
        .map(|r| (r.key(), r))
        .collect();
        let style_counts: BTreeMap<PositionLabel, usize> =
            [(PositionLabel::Striker, 1)].into_iter().collect();

        let stats = style_stats(&assignments, &records, &style_counts, 100).unwrap();
        let s = &stats[&PositionLabel::Striker][0];
        assert_eq!(s.total, 4);
        assert_eq!(s.domestic, 3);
        assert_eq!(s.foreign, 1);
        assert!((s.rating.mean - 7.5).abs() < 1e-12);
        assert!((s.rating.sd - 0.5).abs() < 1e-12);
        assert!((s.win_loss - 2.0).abs() < 1e-12);
        assert_eq!((s.wins, s.draws, s.losses), (2, 1, 1));
        // Only 4 observations: below the start-position report threshold.
        assert!(s.start_positions.is_empty());
    }

    #[test]
    fn undefeated_style_reports_infinite_win_loss() {
        let k0 = key("m0", "p");
        let assignments = vec![(
            k0.clone(),
            PositionLabel::Striker,
            StyleAssignment {
                style: 0,
                degenerate: false,
            },
        )];
        let records: BTreeMap<PlayerMatchKey, PlayerMatchRecord> =
            [(k0.clone(), record(&k0, 7.0, MatchOutcome::Win, Nationality::Domestic))]
                .into_iter()
                .collect();
        let style_counts: BTreeMap<PositionLabel, usize> =
            [(PositionLabel::Striker, 1)].into_iter().collect();
        let stats = style_stats(&assignments, &records, &style_counts, 100).unwrap();
        assert!(stats[&PositionLabel::Striker][0].win_loss.is_infinite());
    }

    #[test]
    fn missing_record_is_an_error() {
        let assignments = vec![(
            key("m0", "p"),
            PositionLabel::Striker,
            StyleAssignment {
                style: 0,
                degenerate: false,
            },
        )];
        let records = BTreeMap::new();
        let style_counts: BTreeMap<PositionLabel, usize> =
            [(PositionLabel::Striker, 1)].into_iter().collect();
        assert!(matches!(
            style_stats(&assignments, &records, &style_counts, 100),
            Err(Error::MissingRecord { .. })
        ));
    }

    /// Builds a catalog whose components have hand-chosen dominant slots.
    fn catalog_with_weights(weight_sets: Vec<Vec<(&str, f64)>>) -> StyleCatalog {
        let layout = VectorLayout::default();
        let cfg = &st_only_configs(weight_sets.len())[0];
        let (slots, slot_names) = sub_slots(&layout, &cfg.actions).unwrap();
        let mut w = Array2::zeros((slots.len(), weight_sets.len()));
        for (style, weights) in weight_sets.iter().enumerate() {
            for (name, value) in weights {
                let row = slot_names.iter().position(|n| n == name).unwrap();
                w[(row, style)] = *value;
            }
        }
        let k = weight_sets.len();
        let model = FactorModel {
            w,
            h: Array2::zeros((k, 1)),
            k,
            objective_trace: vec![],
            seed: 0,
            degenerate: false,
        };
        let mut catalog = StyleCatalog::default();
        catalog.positions.insert(
            PositionLabel::Striker,
            PositionStyles {
                position: PositionLabel::Striker,
                actions: cfg.actions.clone(),
                slots,
                slot_names,
                model,
                names: (0..k).map(|i| default_name(PositionLabel::Striker, i)).collect(),
                stats: Vec::new(),
            },
        );
        catalog
    }

    #[test]
    fn naming_rules_match_dominant_slots() {
        let mut catalog = catalog_with_weights(vec![
            vec![("Close Shot", 0.9), ("Front Header", 0.8), ("Center Pass", 0.1)],
            vec![("Long Shot", 0.9), ("Center Dribble", 0.8), ("Center Pass", 0.7)],
            vec![("L. Flank Cross", 0.9)],
        ]);
        name_styles(&mut catalog, &default_naming_rules());
        let names = &catalog.get(PositionLabel::Striker).unwrap().names;
        assert_eq!(names[0], "Poacher");
        assert_eq!(names[1], "Second Striker");
        assert_eq!(names[2], "Style-ST-2"); // no rule matches → fallback
    }

    #[test]
    fn each_rule_names_at_most_one_component() {
        let mut catalog = catalog_with_weights(vec![
            vec![("Close Shot", 0.9), ("Front Header", 0.8)],
            vec![("Close Shot", 0.7), ("Front Header", 0.6)],
        ]);
        name_styles(&mut catalog, &default_naming_rules());
        let names = &catalog.get(PositionLabel::Striker).unwrap().names;
        assert_eq!(names[0], "Poacher");
        assert_eq!(names[1], "Style-ST-1");
    }
}
