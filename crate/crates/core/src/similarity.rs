//! Player-to-player similarity: Manhattan distance between season vectors,
//! rescaled to a percentage against the population's maximal pairwise
//! distance.

use std::collections::BTreeMap;

use ndarray::Array1;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Σ|uᵢ − wᵢ| over equal-length vectors.
pub fn manhattan(u: &Array1<f64>, w: &Array1<f64>) -> Result<f64> {
    if u.len() != w.len() {
        return Err(Error::DimensionMismatch {
            expected: format!("{}", u.len()),
            got: format!("{}", w.len()),
        });
    }
    Ok(u.iter().zip(w.iter()).map(|(a, b)| (a - b).abs()).sum())
}

/// Distance rescaled to a percentage: identical vectors score 100, the
/// most distant pair in the population scores 0. A degenerate population
/// (`d_max = 0`, all players identical) scores 100 everywhere.
pub fn similarity_percent(d_ij: f64, d_max: f64) -> Result<f64> {
    if d_ij < 0.0 || d_max < 0.0 {
        return Err(Error::NegativeDistance(d_ij.min(d_max)));
    }
    if d_ij > d_max {
        return Err(Error::DistanceAboveMax { d_ij, d_max });
    }
    if d_max == 0.0 {
        return Ok(100.0);
    }
    Ok((d_max - d_ij) / d_max * 100.0)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimilarityResult {
    pub player_a: String,
    pub player_b: String,
    pub manhattan: f64,
    pub percent: f64,
}

/// Maximal pairwise Manhattan distance over the population.
pub fn pairwise_max_distance(population: &BTreeMap<String, Array1<f64>>) -> f64 {
    let entries: Vec<&Array1<f64>> = population.values().collect();
    let n = entries.len();
    if n < 2 {
        return 0.0;
    }
    (0..n - 1)
        .into_par_iter()
        .map(|i| {
            let mut local_max = 0.0f64;
            for j in i + 1..n {
                let d: f64 = entries[i]
                    .iter()
                    .zip(entries[j].iter())
                    .map(|(a, b)| (a - b).abs())
                    .sum();
                local_max = local_max.max(d);
            }
            local_max
        })
        .reduce(|| 0.0, f64::max)
}

/// Players ranked by ascending distance to the query, self excluded, ties
/// broken by player id. `top_n` greater than the population is clamped.
pub fn most_similar(
    player: &str,
    population: &BTreeMap<String, Array1<f64>>,
    top_n: usize,
) -> Result<Vec<SimilarityResult>> {
    let query = population
        .get(player)
        .ok_or_else(|| Error::PlayerNotFound(player.to_string()))?;
    let d_max = pairwise_max_distance(population);

    let mut ranked: Vec<(String, f64)> = population
        .iter()
        .filter(|(id, _)| id.as_str() != player)
        .map(|(id, v)| Ok((id.clone(), manhattan(query, v)?)))
        .collect::<Result<Vec<_>>>()?;
    ranked.sort_by(|a, b| a.1.total_cmp(&b.1).then(a.0.cmp(&b.0)));
    ranked.truncate(top_n);

    ranked
        .into_iter()
        .map(|(id, d)| {
            Ok(SimilarityResult {
                player_a: player.to_string(),
                player_b: id,
                manhattan: d,
                percent: similarity_percent(d, d_max)?,
            })
        })
        .collect()
}
