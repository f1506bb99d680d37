//! Per-match position detection from average action coordinates: k-means
//! over (x, y) means, silhouette-driven choice of k, side-switch filtering,
//! and the merge of mirrored side clusters down to five position labels.

use std::collections::{BTreeMap, BTreeSet};
use std::ops::RangeInclusive;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::events::{CategoryMapping, MatchEvent, PitchPoint, PlayerMatchKey, PlayerMatchRecord};
use crate::kmeans::{kmeans, silhouette_mean, KmeansFit, KmeansOptions};

/// The five merged on-pitch roles.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum PositionLabel {
    #[serde(rename = "ST")]
    Striker,
    #[serde(rename = "L/RW")]
    WingForward,
    #[serde(rename = "CM")]
    CentralMidfielder,
    #[serde(rename = "L/RFB")]
    FullBack,
    #[serde(rename = "CB")]
    CenterBack,
}

impl PositionLabel {
    pub const ALL: [PositionLabel; 5] = [
        PositionLabel::Striker,
        PositionLabel::WingForward,
        PositionLabel::CentralMidfielder,
        PositionLabel::FullBack,
        PositionLabel::CenterBack,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            PositionLabel::Striker => "ST",
            PositionLabel::WingForward => "L/RW",
            PositionLabel::CentralMidfielder => "CM",
            PositionLabel::FullBack => "L/RFB",
            PositionLabel::CenterBack => "CB",
        }
    }

    pub fn parse(s: &str) -> Option<PositionLabel> {
        PositionLabel::ALL.iter().copied().find(|p| p.as_str() == s)
    }
}

impl std::fmt::Display for PositionLabel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Mean action location of one eligible player-match, with per-half lateral
/// means for side-switch detection.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AvgPositionSample {
    pub key: PlayerMatchKey,
    pub mean: PitchPoint,
    /// Mean y of categorized actions in halves 1 and 2; None when the player
    /// had no categorized action in that half.
    pub half_mean_y: [Option<f64>; 2],
}

impl AvgPositionSample {
    pub fn point(&self) -> [f64; 2] {
        [self.mean.x, self.mean.y]
    }
}

/// Averages every categorized on-ball action per eligible player-match.
/// Player-matches with no categorized action are skipped and counted.
pub fn average_positions(
    events: &[MatchEvent],
    eligible: &[PlayerMatchRecord],
    mapping: &CategoryMapping,
) -> Result<(Vec<AvgPositionSample>, u64)> {
    let eligible_keys: BTreeSet<PlayerMatchKey> = eligible.iter().map(|r| r.key()).collect();

    struct Acc {
        sum_x: f64,
        sum_y: f64,
        count: u64,
        half_sum_y: [f64; 2],
        half_count: [u64; 2],
    }
    let mut acc: BTreeMap<PlayerMatchKey, Acc> = BTreeMap::new();

    for e in events {
        let key = PlayerMatchKey::new(&e.match_id, &e.player_id);
        if !eligible_keys.contains(&key) {
            continue;
        }
        if mapping.categories(&e.raw_type)?.is_empty() {
            continue;
        }
        let entry = acc.entry(key).or_insert(Acc {
            sum_x: 0.0,
            sum_y: 0.0,
            count: 0,
            half_sum_y: [0.0; 2],
            half_count: [0; 2],
        });
        entry.sum_x += e.location.x;
        entry.sum_y += e.location.y;
        entry.count += 1;
        let h = (e.half as usize - 1).min(1);
        entry.half_sum_y[h] += e.location.y;
        entry.half_count[h] += 1;
    }

    let mut samples = Vec::with_capacity(acc.len());
    for (key, a) in acc {
        let half_mean_y = [0, 1].map(|h| {
            (a.half_count[h] > 0).then(|| a.half_sum_y[h] / a.half_count[h] as f64)
        });
        samples.push(AvgPositionSample {
            key,
            mean: PitchPoint {
                x: a.sum_x / a.count as f64,
                y: a.sum_y / a.count as f64,
            },
            half_mean_y,
        });
    }
    let skipped = eligible_keys.len() as u64 - samples.len() as u64;
    Ok((samples, skipped))
}

/// True when the per-half lateral means lie on opposite sides of the
/// midline and differ by more than `threshold`. Missing halves never flag.
pub fn detect_side_switch(sample: &AvgPositionSample, threshold: f64) -> bool {
    match sample.half_mean_y {
        [Some(y1), Some(y2)] => {
            let opposite = (y1 - 50.0) * (y2 - 50.0) < 0.0;
            opposite && (y1 - y2).abs() > threshold
        }
        _ => false,
    }
}

/// Fitted position model: centroids, their merged labels, and the score
/// that selected k.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PositionModel {
    pub k: usize,
    pub centroids: Vec<PitchPoint>,
    pub silhouette: f64,
    /// Cluster id → merged position label.
    pub merge_map: Vec<PositionLabel>,
}

impl PositionModel {
    pub fn label_of(&self, cluster: usize) -> PositionLabel {
        self.merge_map[cluster]
    }

    /// Nearest-centroid cluster of a point.
    pub fn assign(&self, point: &PitchPoint) -> usize {
        let mut best = 0;
        let mut best_d = f64::INFINITY;
        for (c, centroid) in self.centroids.iter().enumerate() {
            let d = centroid.distance(point);
            if d < best_d {
                best_d = d;
                best = c;
            }
        }
        best
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct KScore {
    pub k: usize,
    pub silhouette: f64,
}

/// Result of the silhouette sweep over the k range.
#[derive(Debug, Clone)]
pub struct KSelection {
    pub k: usize,
    pub fit: KmeansFit,
    pub silhouette: f64,
    pub per_k: Vec<KScore>,
}

/// Per-k seed so parallel fits stay reproducible regardless of scheduling.
fn seed_for_k(base: u64, k: usize) -> u64 {
    crate::artifacts::derive_seed(base, &format!("kmeans.k{k}"))
}

/// Fits every k in the range and keeps the one with the best mean
/// silhouette; ties go to the smaller k.
pub fn select_k(
    samples: &[AvgPositionSample],
    k_range: RangeInclusive<usize>,
    opts: &KmeansOptions,
) -> Result<KSelection> {
    let points: Vec<[f64; 2]> = samples.iter().map(|s| s.point()).collect();
    let ks: Vec<usize> = k_range.collect();
    if ks.is_empty() {
        return Err(Error::Config("empty k range".into()));
    }

    let fits: Vec<Result<(usize, KmeansFit, f64)>> = ks
        .par_iter()
        .map(|&k| {
            let k_opts = KmeansOptions {
                seed: seed_for_k(opts.seed, k),
                ..*opts
            };
            let fit = kmeans(&points, k, &k_opts)?;
            let score = silhouette_mean(&points, &fit.assignments)?;
            Ok((k, fit, score))
        })
        .collect();

    let mut per_k = Vec::with_capacity(ks.len());
    let mut best: Option<(usize, KmeansFit, f64)> = None;
    for fit in fits {
        let (k, fit, score) = fit?;
        per_k.push(KScore { k, silhouette: score });
        let better = match &best {
            None => true,
            Some((_, _, best_score)) => score > *best_score,
        };
        if better {
            best = Some((k, fit, score));
        }
    }
    let (k, fit, silhouette) = best.unwrap();
    Ok(KSelection {
        k,
        fit,
        silhouette,
        per_k,
    })
}

/// Geometry thresholds for the automatic mirror merge.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct MergeParams {
    /// A centroid is "wide" when its |y − 50| exceeds this.
    pub min_lateral: f64,
    /// Max distance between a wide centroid's mirror image and its partner.
    pub mirror_tol: f64,
}

impl Default for MergeParams {
    fn default() -> Self {
        MergeParams {
            min_lateral: 15.0,
            mirror_tol: 10.0,
        }
    }
}

/// Pairs mirrored wide clusters and maps every cluster to one of the five
/// labels: the mirrored high-x pair becomes L/RW, the low-x pair L/RFB; the
/// central clusters split into ST (highest x), CB (lowest x), CM (the rest).
pub fn merge_side_clusters(
    centroids: &[PitchPoint],
    params: &MergeParams,
) -> Result<Vec<PositionLabel>> {
    let wide: Vec<usize> = (0..centroids.len())
        .filter(|&c| (centroids[c].y - 50.0).abs() > params.min_lateral)
        .collect();
    let central: Vec<usize> = (0..centroids.len()).filter(|c| !wide.contains(c)).collect();

    // Greedy mutual pairing by mirror distance.
    let mut candidates: Vec<(f64, usize, usize)> = Vec::new();
    for (ai, &a) in wide.iter().enumerate() {
        for &b in wide.iter().skip(ai + 1) {
            let d = centroids[a].mirrored().distance(&centroids[b]);
            if d <= params.mirror_tol {
                candidates.push((d, a, b));
            }
        }
    }
    candidates.sort_by(|x, y| x.0.total_cmp(&y.0).then(x.1.cmp(&y.1)).then(x.2.cmp(&y.2)));
    let mut paired: BTreeMap<usize, usize> = BTreeMap::new();
    let mut used: BTreeSet<usize> = BTreeSet::new();
    for (_, a, b) in candidates {
        if !used.contains(&a) && !used.contains(&b) {
            used.insert(a);
            used.insert(b);
            paired.insert(a, b);
        }
    }

    let unpaired: Vec<usize> = wide.iter().copied().filter(|c| !used.contains(c)).collect();
    if !unpaired.is_empty() {
        return Err(Error::NoMirrorPairing(format!(
            "wide clusters {unpaired:?} have no mirror partner"
        )));
    }
    if paired.len() != 2 {
        return Err(Error::NoMirrorPairing(format!(
            "expected 2 mirrored side pairs, found {}",
            paired.len()
        )));
    }
    if central.len() < 3 {
        return Err(Error::NoMirrorPairing(format!(
            "need at least 3 central clusters, found {}",
            central.len()
        )));
    }

    let mut merge_map = vec![PositionLabel::CentralMidfielder; centroids.len()];

    let mut pairs: Vec<(f64, usize, usize)> = paired
        .iter()
        .map(|(&a, &b)| ((centroids[a].x + centroids[b].x) / 2.0, a, b))
        .collect();
    pairs.sort_by(|x, y| y.0.total_cmp(&x.0));
    let (_, wa, wb) = pairs[0];
    merge_map[wa] = PositionLabel::WingForward;
    merge_map[wb] = PositionLabel::WingForward;
    let (_, fa, fb) = pairs[1];
    merge_map[fa] = PositionLabel::FullBack;
    merge_map[fb] = PositionLabel::FullBack;

    let mut by_x = central.clone();
    by_x.sort_by(|&a, &b| centroids[a].x.total_cmp(&centroids[b].x));
    merge_map[*by_x.last().unwrap()] = PositionLabel::Striker;
    merge_map[by_x[0]] = PositionLabel::CenterBack;
    // Everything central in between keeps CentralMidfielder.

    validate_merge_map(&merge_map, centroids.len())?;
    Ok(merge_map)
}

/// Checks a merge map (user-supplied or derived) is total and covers all
/// five labels.
pub fn validate_merge_map(merge_map: &[PositionLabel], k: usize) -> Result<()> {
    if merge_map.len() != k {
        return Err(Error::InvalidMergeMap(format!(
            "merge map covers {} clusters, model has {k}",
            merge_map.len()
        )));
    }
    let labels: BTreeSet<PositionLabel> = merge_map.iter().copied().collect();
    if labels.len() != PositionLabel::ALL.len() {
        let missing: Vec<&str> = PositionLabel::ALL
            .iter()
            .filter(|l| !labels.contains(l))
            .map(|l| l.as_str())
            .collect();
        return Err(Error::InvalidMergeMap(format!(
            "labels {missing:?} never produced"
        )));
    }
    Ok(())
}

/// Positions every sample: cluster assignment composed with the merge map.
pub fn label_samples(
    model: &PositionModel,
    samples: &[AvgPositionSample],
    assignments: &[usize],
) -> Vec<(PlayerMatchKey, PositionLabel)> {
    samples
        .iter()
        .zip(assignments)
        .map(|(s, &c)| (s.key.clone(), model.label_of(c)))
        .collect()
}
