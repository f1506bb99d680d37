//! Assembly of the fixed-size per-player-per-match style vector: the
//! per-action compressed representations concatenated in a fixed layout.
//!
//! The default layout has 44 dimensions (Shot 4, Cross 4, Dribble 5, Pass 5,
//! LongPass 5, KeyPass 4, Interception 4, Clearance 4, Header 5, Recovery 4)
//! with the canonical slot names of the published component scheme.

use std::collections::BTreeMap;
use std::path::Path;

use ndarray::Array1;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::events::{ActionCategory, PlayerMatchKey};
use crate::nmf::FactorModel;
use crate::positions::PositionLabel;

/// Display name of one vector slot.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SlotName {
    /// Short label used as a column header. Not guaranteed unique: the
    /// canonical scheme abbreviates both Long Shot and Left Shot as "LS".
    pub abbr: String,
    /// Full name; unique within the layout.
    pub full: String,
}

impl SlotName {
    fn new(abbr: &str, full: &str) -> SlotName {
        SlotName {
            abbr: abbr.to_string(),
            full: full.to_string(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LayoutEntry {
    pub category: ActionCategory,
    pub k: usize,
    pub slots: Vec<SlotName>,
}

/// Ordered per-category component counts and slot names.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VectorLayout {
    pub entries: Vec<LayoutEntry>,
}

/// `(category, k)` pairs of the default 44-dimensional layout.
pub const DEFAULT_COMPONENT_COUNTS: [(ActionCategory, usize); 10] = [
    (ActionCategory::Shot, 4),
    (ActionCategory::Cross, 4),
    (ActionCategory::Dribble, 5),
    (ActionCategory::Pass, 5),
    (ActionCategory::LongPass, 5),
    (ActionCategory::KeyPass, 4),
    (ActionCategory::Interception, 4),
    (ActionCategory::Clearance, 4),
    (ActionCategory::Header, 5),
    (ActionCategory::Recovery, 4),
];

fn canonical_slot_names(category: ActionCategory) -> Vec<SlotName> {
    let names: &[(&str, &str)] = match category {
        ActionCategory::Shot => &[
            ("CS", "Close Shot"),
            ("LS", "Long Shot"),
            ("RS", "Right Shot"),
            ("LS", "Left Shot"),
        ],
        ActionCategory::Cross => &[
            ("LBC", "L. Backline Cross"),
            ("RBC", "R. Backline Cross"),
            ("RFC", "R. Flank Cross"),
            ("LFC", "L. Flank Cross"),
        ],
        ActionCategory::Dribble => &[
            ("CD", "Center Dribble"),
            ("RFD", "R. Flank Dribble"),
            ("LFD", "L. Flank Dribble"),
            ("LBD", "L. Back Dribble"),
            ("RBD", "R. Back Dribble"),
        ],
        ActionCategory::Pass => &[
            ("LBP", "L. Back Pass"),
            ("RFP", "R. Flank Pass"),
            ("LFP", "L. Flank Pass"),
            ("CP", "Center Pass"),
            ("RBP", "R. Back Pass"),
        ],
        ActionCategory::LongPass => &[
            ("LBLP", "L. Back Long Pass"),
            ("LFLP", "L. Flank Long Pass"),
            ("RFLP", "R. Flank Long Pass"),
            ("CLP", "Center Long Pass"),
            ("RBLP", "R. Back Long Pass"),
        ],
        ActionCategory::KeyPass => &[
            ("RFKP", "R. Far Key Pass"),
            ("RKP", "R. Key Pass"),
            ("LKP", "L. Key Pass"),
            ("LFKP", "L. Far Key Pass"),
        ],
        ActionCategory::Interception => &[
            ("LBI", "L. Back Interception"),
            ("RFI", "R. Flank Interception"),
            ("LFI", "L. Flank Interception"),
            ("RBI", "R. Back Interception"),
        ],
        ActionCategory::Clearance => &[
            ("MC", "Middle Clearance"),
            ("LC", "Left Clearance"),
            ("IC", "Inner Clearance"),
            ("RC", "Right Clearance"),
        ],
        ActionCategory::Header => &[
            ("BH", "Back Header"),
            ("MFH", "Mid Front Header"),
            ("RBH", "R. Back Header"),
            ("LBH", "L. Back Header"),
            ("FH", "Front Header"),
        ],
        ActionCategory::Recovery => &[
            ("LBR", "L. Back Recovery"),
            ("RFR", "R. Flank Recovery"),
            ("LFR", "L. Flank Recovery"),
            ("RBR", "R. Back Recovery"),
        ],
    };
    names.iter().map(|(a, f)| SlotName::new(a, f)).collect()
}

impl Default for VectorLayout {
    fn default() -> Self {
        VectorLayout {
            entries: DEFAULT_COMPONENT_COUNTS
                .iter()
                .map(|&(category, k)| {
                    let slots = canonical_slot_names(category);
                    debug_assert_eq!(slots.len(), k);
                    LayoutEntry { category, k, slots }
                })
                .collect(),
        }
    }
}

impl VectorLayout {
    /// Layout with custom component counts; the canonical slot names apply
    /// only at the canonical counts, other slots get generated names.
    pub fn from_counts(counts: &[(ActionCategory, usize)]) -> Result<VectorLayout> {
        if counts.is_empty() {
            return Err(Error::Config("layout needs at least one category".into()));
        }
        let entries = counts
            .iter()
            .map(|&(category, k)| {
                if k == 0 {
                    return Err(Error::Config(format!("{category} component count must be ≥ 1")));
                }
                let canonical = canonical_slot_names(category);
                let slots = if canonical.len() == k {
                    canonical
                } else {
                    (0..k)
                        .map(|i| {
                            SlotName::new(
                                &format!("{}{}", category.slug().to_uppercase(), i + 1),
                                &format!("{} Component {}", category.name(), i + 1),
                            )
                        })
                        .collect()
                };
                Ok(LayoutEntry { category, k, slots })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(VectorLayout { entries })
    }

    pub fn total_dim(&self) -> usize {
        self.entries.iter().map(|e| e.k).sum()
    }

    pub fn categories(&self) -> impl Iterator<Item = ActionCategory> + '_ {
        self.entries.iter().map(|e| e.category)
    }

    /// Slot range `[start, start + k)` of a category within the vector.
    pub fn slot_range(&self, category: ActionCategory) -> Option<(usize, usize)> {
        let mut offset = 0;
        for entry in &self.entries {
            if entry.category == category {
                return Some((offset, entry.k));
            }
            offset += entry.k;
        }
        None
    }

    /// All slot names in vector order.
    pub fn slot_names(&self) -> Vec<&SlotName> {
        self.entries.iter().flat_map(|e| e.slots.iter()).collect()
    }

    pub fn component_count(&self, category: ActionCategory) -> Option<usize> {
        self.entries.iter().find(|e| e.category == category).map(|e| e.k)
    }
}

/// One fitted per-category factorization together with its column index.
#[derive(Debug, Clone)]
pub struct CategoryModel {
    pub category: ActionCategory,
    pub model: FactorModel,
    pub columns: Vec<PlayerMatchKey>,
}

/// The assembled style vector of one player in one match.
#[derive(Debug, Clone, PartialEq)]
pub struct PlayerMatchVector {
    pub key: PlayerMatchKey,
    pub position: PositionLabel,
    pub values: Array1<f64>,
}

/// Concatenates per-category H columns into one vector per player-match,
/// in layout order. Player-matches without a position label (side-switch
/// filtered or unpositioned) are skipped.
pub fn assemble(
    models: &BTreeMap<ActionCategory, CategoryModel>,
    layout: &VectorLayout,
    positions: &BTreeMap<PlayerMatchKey, PositionLabel>,
) -> Result<Vec<PlayerMatchVector>> {
    let mut reference: Option<(&ActionCategory, &CategoryModel)> = None;
    for entry in &layout.entries {
        let model = models.get(&entry.category).ok_or_else(|| {
            Error::ColumnIndexMismatch(format!("no model for category {}", entry.category))
        })?;
        if model.model.k != entry.k {
            return Err(Error::DimensionMismatch {
                expected: format!("{} components for {}", entry.k, entry.category),
                got: format!("{}", model.model.k),
            });
        }
        if let Some((ref_cat, ref_model)) = reference {
            if model.columns != ref_model.columns {
                return Err(Error::ColumnIndexMismatch(format!(
                    "{} and {ref_cat} index different player-matches",
                    entry.category
                )));
            }
        } else {
            reference = Some((&entry.category, model));
        }
    }
    let (_, reference) = reference.ok_or_else(|| Error::EmptyInput("layout has no categories".into()))?;

    let dim = layout.total_dim();
    let mut out = Vec::new();
    for (col, key) in reference.columns.iter().enumerate() {
        let Some(&position) = positions.get(key) else {
            continue;
        };
        let mut values = Array1::zeros(dim);
        let mut offset = 0;
        for entry in &layout.entries {
            let model = &models[&entry.category].model;
            values
                .slice_mut(ndarray::s![offset..offset + entry.k])
                .assign(&model.h.column(col));
            offset += entry.k;
        }
        out.push(PlayerMatchVector {
            key: key.clone(),
            position,
            values,
        });
    }
    Ok(out)
}

/// Entrywise mean of one player's match vectors: the general vector of the
/// season. Order-independent up to float associativity; inputs are summed
/// in the order given, so callers pass match vectors in key order.
pub fn season_vector<'a, I>(vectors: I) -> Result<Array1<f64>>
where
    I: IntoIterator<Item = &'a Array1<f64>>,
{
    let mut iter = vectors.into_iter();
    let first = iter
        .next()
        .ok_or_else(|| Error::EmptyInput("season vector of zero matches".into()))?;
    let mut sum = first.clone();
    let mut count = 1.0;
    for v in iter {
        if v.len() != sum.len() {
            return Err(Error::DimensionMismatch {
                expected: format!("{}", sum.len()),
                got: format!("{}", v.len()),
            });
        }
        sum += v;
        count += 1.0;
    }
    Ok(sum / count)
}

/// Exports vectors as CSV: `player_id,match_id,position` then one column
/// per slot, headed by the slot abbreviations.
pub fn write_vectors_csv(
    path: &Path,
    vectors: &[PlayerMatchVector],
    layout: &VectorLayout,
) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    let mut header = vec!["player_id".to_string(), "match_id".to_string(), "position".to_string()];
    header.extend(layout.slot_names().iter().map(|s| s.abbr.clone()));
    w.write_record(&header)?;
    for v in vectors {
        let mut row = vec![
            v.key.player_id.clone(),
            v.key.match_id.clone(),
            v.position.as_str().to_string(),
        ];
        row.extend(v.values.iter().map(|x| format!("{x}")));
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::{array, Array2};

    #[test]
    fn default_layout_is_44_dimensional() {
        let layout = VectorLayout::default();
        assert_eq!(layout.total_dim(), 44);
        assert_eq!(layout.slot_names().len(), 44);
        assert_eq!(layout.entries.len(), 10);
    }

    #[test]
    fn default_slot_ranges_follow_the_table() {
        let layout = VectorLayout::default();
        assert_eq!(layout.slot_range(ActionCategory::Shot), Some((0, 4)));
        assert_eq!(layout.slot_range(ActionCategory::Cross), Some((4, 4)));
        assert_eq!(layout.slot_range(ActionCategory::Dribble), Some((8, 5)));
        assert_eq!(layout.slot_range(ActionCategory::Pass), Some((13, 5)));
        assert_eq!(layout.slot_range(ActionCategory::LongPass), Some((18, 5)));
        assert_eq!(layout.slot_range(ActionCategory::KeyPass), Some((23, 4)));
        assert_eq!(layout.slot_range(ActionCategory::Interception), Some((27, 4)));
        assert_eq!(layout.slot_range(ActionCategory::Clearance), Some((31, 4)));
        assert_eq!(layout.slot_range(ActionCategory::Header), Some((35, 5)));
        assert_eq!(layout.slot_range(ActionCategory::Recovery), Some((40, 4)));
    }

    fn toy_model(category: ActionCategory, k: usize, columns: &[PlayerMatchKey], fill: f64) -> CategoryModel {
        let h = Array2::from_shape_fn((k, columns.len()), |(i, j)| fill + i as f64 + 10.0 * j as f64);
        CategoryModel {
            category,
            model: FactorModel {
                w: Array2::zeros((6, k)),
                h,
                k,
                objective_trace: vec![],
                seed: 0,
                degenerate: false,
            },
            columns: columns.to_vec(),
        }
    }

    fn full_models(columns: &[PlayerMatchKey]) -> BTreeMap<ActionCategory, CategoryModel> {
        DEFAULT_COMPONENT_COUNTS
            .iter()
            .enumerate()
            .map(|(i, &(category, k))| (category, toy_model(category, k, columns, i as f64 * 100.0)))
            .collect()
    }

    #[test]
    fn assembled_vectors_have_44_entries_and_exact_slices() {
        let layout = VectorLayout::default();
        let columns = vec![PlayerMatchKey::new("m1", "p1"), PlayerMatchKey::new("m1", "p2")];
        let models = full_models(&columns);
        let positions: BTreeMap<PlayerMatchKey, PositionLabel> = columns
            .iter()
            .map(|k| (k.clone(), PositionLabel::Striker))
            .collect();

        let vectors = assemble(&models, &layout, &positions).unwrap();
        assert_eq!(vectors.len(), 2);
        for (col, v) in vectors.iter().enumerate() {
            assert_eq!(v.values.len(), 44);
            for entry in &layout.entries {
                let (start, len) = layout.slot_range(entry.category).unwrap();
                let slice = v.values.slice(ndarray::s![start..start + len]);
                let expected = models[&entry.category].model.h.column(col);
                assert_eq!(slice.to_vec(), expected.to_vec(), "category {}", entry.category);
            }
        }
    }

    #[test]
    fn missing_position_skips_the_player_match() {
        let layout = VectorLayout::default();
        let columns = vec![PlayerMatchKey::new("m1", "p1"), PlayerMatchKey::new("m1", "p2")];
        let models = full_models(&columns);
        let positions: BTreeMap<PlayerMatchKey, PositionLabel> =
            [(columns[0].clone(), PositionLabel::CenterBack)].into_iter().collect();
        let vectors = assemble(&models, &layout, &positions).unwrap();
        assert_eq!(vectors.len(), 1);
        assert_eq!(vectors[0].key, columns[0]);
    }

    #[test]
    fn mismatched_column_indexes_are_rejected() {
        let layout = VectorLayout::default();
        let columns = vec![PlayerMatchKey::new("m1", "p1")];
        let other = vec![PlayerMatchKey::new("m1", "p2")];
        let mut models = full_models(&columns);
        models.insert(
            ActionCategory::Header,
            toy_model(ActionCategory::Header, 5, &other, 0.0),
        );
        let positions = BTreeMap::new();
        assert!(matches!(
            assemble(&models, &layout, &positions),
            Err(Error::ColumnIndexMismatch(_))
        ));
    }

    #[test]
    fn zero_activity_everywhere_gives_the_zero_vector() {
        let layout = VectorLayout::default();
        let columns = vec![PlayerMatchKey::new("m1", "p1")];
        let models: BTreeMap<ActionCategory, CategoryModel> = DEFAULT_COMPONENT_COUNTS
            .iter()
            .map(|&(category, k)| {
                (
                    category,
                    CategoryModel {
                        category,
                        model: FactorModel {
                            w: Array2::zeros((6, k)),
                            h: Array2::zeros((k, 1)),
                            k,
                            objective_trace: vec![],
                            seed: 0,
                            degenerate: false,
                        },
                        columns: columns.clone(),
                    },
                )
            })
            .collect();
        let positions: BTreeMap<PlayerMatchKey, PositionLabel> =
            [(columns[0].clone(), PositionLabel::CentralMidfielder)].into_iter().collect();
        let vectors = assemble(&models, &layout, &positions).unwrap();
        assert_eq!(vectors[0].values.len(), 44);
        assert!(vectors[0].values.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn season_vector_is_the_entrywise_mean() {
        let u = array![1.0, 2.0, 3.0];
        let w = array![3.0, 2.0, 1.0];
        let season = season_vector([&u, &w]).unwrap();
        assert_eq!(season, array![2.0, 2.0, 2.0]);

        let single = season_vector([&u]).unwrap();
        assert_eq!(single, u);

        let repeated = season_vector([&u, &u, &u, &u]).unwrap();
        for (a, b) in repeated.iter().zip(u.iter()) {
            assert!((a - b).abs() < 1e-12);
        }

        assert!(matches!(
            season_vector(std::iter::empty::<&Array1<f64>>()),
            Err(Error::EmptyInput(_))
        ));
    }

    #[test]
    fn season_vector_is_reorder_invariant() {
        let u = array![1.0, 2.0];
        let v = array![5.0, 1.0];
        let w = array![2.0, 9.0];
        let a = season_vector([&u, &v, &w]).unwrap();
        let b = season_vector([&w, &u, &v]).unwrap();
        for (x, y) in a.iter().zip(b.iter()) {
            assert!((x - y).abs() < 1e-12);
        }
    }

    #[test]
    fn custom_counts_generate_names() {
        let layout = VectorLayout::from_counts(&[
            (ActionCategory::Shot, 2),
            (ActionCategory::Pass, 5),
        ])
        .unwrap();
        assert_eq!(layout.total_dim(), 7);
        assert_eq!(layout.entries[0].slots[0].abbr, "SHOT1");
        // Canonical count keeps canonical names.
        assert_eq!(layout.entries[1].slots[3].abbr, "CP");
    }
}
