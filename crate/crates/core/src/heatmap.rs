//! Smoothed action-location heatmaps and their vectorized matrix form.
//!
//! One heatmap covers one (player, match, action category) triple: events are
//! binned on an `m × n` grid (m cells along pitch length, n along width),
//! convolved with a truncated Gaussian, and L1-normalized so each non-empty
//! map is a probability distribution over cells.

use std::collections::BTreeMap;

use ndarray::{Array1, Array2};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::events::{ActionCategory, CategoryMapping, MatchEvent, PitchPoint, PlayerMatchKey};

/// How a raw binned grid is scaled after smoothing.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Normalization {
    /// Cells sum to 1 (each map is a distribution). The default.
    #[default]
    UnitSum,
    /// Maximum cell equals 1.
    UnitMax,
    /// Smoothed counts are kept as-is.
    RawCount,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    /// Cells along pitch length (the x axis).
    pub m: usize,
    /// Cells along pitch width (the y axis).
    pub n: usize,
    /// Gaussian smoothing radius in cells; 0 disables smoothing.
    pub sigma: f64,
    #[serde(default)]
    pub normalization: Normalization,
}

impl Default for GridSpec {
    fn default() -> Self {
        // ~2 m cells on a 105 × 68 m pitch.
        GridSpec {
            m: 50,
            n: 34,
            sigma: 1.5,
            normalization: Normalization::UnitSum,
        }
    }
}

impl GridSpec {
    pub fn new(m: usize, n: usize, sigma: f64) -> Result<Self> {
        let spec = GridSpec {
            m,
            n,
            sigma,
            normalization: Normalization::UnitSum,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if self.m < 2 || self.n < 2 {
            return Err(Error::InvalidGridSpec(format!(
                "grid must be at least 2×2, got {}×{}",
                self.m, self.n
            )));
        }
        if !(self.sigma >= 0.0) {
            return Err(Error::InvalidGridSpec(format!("sigma must be ≥ 0, got {}", self.sigma)));
        }
        Ok(())
    }

    pub fn cells(&self) -> usize {
        self.m * self.n
    }

    /// Grid cell of a pitch point; boundary coordinates land in the last cell.
    pub fn cell_of(&self, p: &PitchPoint) -> (usize, usize) {
        let i = ((p.x / 100.0) * self.m as f64).floor() as usize;
        let j = ((p.y / 100.0) * self.n as f64).floor() as usize;
        (i.min(self.m - 1), j.min(self.n - 1))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Heatmap {
    /// m × n grid; rows follow pitch length, columns pitch width.
    pub grid: Array2<f64>,
    pub player_id: String,
    pub match_id: String,
    pub category: ActionCategory,
    /// Raw event count before smoothing and normalization.
    pub event_count: usize,
}

impl Heatmap {
    pub fn key(&self) -> PlayerMatchKey {
        PlayerMatchKey::new(&self.match_id, &self.player_id)
    }
}

/// Normalized truncated Gaussian, radius `ceil(3σ)`. σ = 0 gives a delta.
fn gaussian_kernel(sigma: f64) -> Vec<f64> {
    if sigma <= 0.0 {
        return vec![1.0];
    }
    let radius = (3.0 * sigma).ceil() as usize;
    let mut kernel = Vec::with_capacity(2 * radius + 1);
    for offset in -(radius as isize)..=(radius as isize) {
        let d = offset as f64;
        kernel.push((-d * d / (2.0 * sigma * sigma)).exp());
    }
    let total: f64 = kernel.iter().sum();
    for v in &mut kernel {
        *v /= total;
    }
    kernel
}

/// Mirrors an index into `0..len`, folding repeatedly for large overshoots.
fn reflect(mut i: isize, len: usize) -> usize {
    let len = len as isize;
    loop {
        if i < 0 {
            i = -i - 1;
        } else if i >= len {
            i = 2 * len - 1 - i;
        } else {
            return i as usize;
        }
    }
}

/// Separable convolution with reflective boundaries. With a unit-sum kernel
/// this preserves total mass exactly (up to float rounding).
fn smooth(grid: &Array2<f64>, kernel: &[f64]) -> Array2<f64> {
    if kernel.len() == 1 {
        return grid.clone();
    }
    let (m, n) = grid.dim();
    let radius = (kernel.len() / 2) as isize;

    let mut pass1 = Array2::zeros((m, n));
    for i in 0..m {
        for j in 0..n {
            let mut acc = 0.0;
            for (t, &w) in kernel.iter().enumerate() {
                let src = reflect(i as isize + t as isize - radius, m);
                acc += w * grid[(src, j)];
            }
            pass1[(i, j)] = acc;
        }
    }
    let mut pass2 = Array2::zeros((m, n));
    for i in 0..m {
        for j in 0..n {
            let mut acc = 0.0;
            for (t, &w) in kernel.iter().enumerate() {
                let src = reflect(j as isize + t as isize - radius, n);
                acc += w * pass1[(i, src)];
            }
            pass2[(i, j)] = acc;
        }
    }
    pass2
}

/// Builds the heatmap for one (player, match, category) from event locations.
/// An empty point list yields an all-zero map.
pub fn build_heatmap(
    player_id: &str,
    match_id: &str,
    category: ActionCategory,
    points: &[PitchPoint],
    spec: &GridSpec,
) -> Heatmap {
    let mut grid = Array2::zeros((spec.m, spec.n));
    for p in points {
        let (i, j) = spec.cell_of(p);
        grid[(i, j)] += 1.0;
    }
    if !points.is_empty() {
        grid = smooth(&grid, &gaussian_kernel(spec.sigma));
        match spec.normalization {
            Normalization::UnitSum => {
                let total = grid.sum();
                if total > 0.0 {
                    grid.mapv_inplace(|v| v / total);
                }
            }
            Normalization::UnitMax => {
                let max = grid.iter().copied().fold(0.0, f64::max);
                if max > 0.0 {
                    grid.mapv_inplace(|v| v / max);
                }
            }
            Normalization::RawCount => {}
        }
    }
    Heatmap {
        grid,
        player_id: player_id.to_string(),
        match_id: match_id.to_string(),
        category,
        event_count: points.len(),
    }
}

/// Row-major flattening of the grid into a vector of length `m·n`.
pub fn vectorize(h: &Heatmap) -> Array1<f64> {
    Array1::from_iter(h.grid.iter().copied())
}

/// Column-stacked heatmap vectors for one action category.
#[derive(Debug, Clone)]
pub struct HeatmapMatrix {
    /// `mn × l`; column j is the vectorized heatmap of `columns[j]`.
    pub matrix: Array2<f64>,
    pub columns: Vec<PlayerMatchKey>,
    pub category: ActionCategory,
    pub spec: GridSpec,
}

/// Stacks heatmaps of one category into the `mn × l` matrix, columns ordered
/// by `(match_id, player_id)`. Zero heatmaps are kept as zero columns.
pub fn build_matrix(heatmaps: &[Heatmap], spec: &GridSpec) -> Result<HeatmapMatrix> {
    let first = heatmaps
        .first()
        .ok_or_else(|| Error::EmptyInput("no heatmaps to stack".into()))?;
    let category = first.category;
    for h in heatmaps {
        if h.category != category {
            return Err(Error::MixedHeatmaps(format!(
                "expected {category}, found {}",
                h.category
            )));
        }
        if h.grid.dim() != (spec.m, spec.n) {
            return Err(Error::MixedHeatmaps(format!(
                "grid {:?} does not match spec {}×{}",
                h.grid.dim(),
                spec.m,
                spec.n
            )));
        }
    }

    let mut order: Vec<usize> = (0..heatmaps.len()).collect();
    order.sort_by(|&a, &b| heatmaps[a].key().cmp(&heatmaps[b].key()));
    for pair in order.windows(2) {
        let (a, b) = (&heatmaps[pair[0]], &heatmaps[pair[1]]);
        if a.key() == b.key() {
            return Err(Error::DuplicateColumn {
                match_id: a.match_id.clone(),
                player_id: a.player_id.clone(),
            });
        }
    }

    let mn = spec.cells();
    let mut matrix = Array2::zeros((mn, heatmaps.len()));
    let mut columns = Vec::with_capacity(heatmaps.len());
    for (col, &idx) in order.iter().enumerate() {
        let v = vectorize(&heatmaps[idx]);
        matrix.column_mut(col).assign(&v);
        columns.push(heatmaps[idx].key());
    }
    Ok(HeatmapMatrix {
        matrix,
        columns,
        category,
        spec: *spec,
    })
}

/// Groups categorized events into per-(player, match, category) point lists.
/// An event contributes to every category the mapping assigns it (a key pass
/// counts for both `Pass` and `KeyPass` under the default table).
pub fn collect_points(
    events: &[MatchEvent],
    mapping: &CategoryMapping,
) -> Result<BTreeMap<(PlayerMatchKey, ActionCategory), Vec<PitchPoint>>> {
    let mut out: BTreeMap<(PlayerMatchKey, ActionCategory), Vec<PitchPoint>> = BTreeMap::new();
    for e in events {
        for category in mapping.categories(&e.raw_type)? {
            out.entry((PlayerMatchKey::new(&e.match_id, &e.player_id), category))
                .or_default()
                .push(e.location);
        }
    }
    Ok(out)
}
