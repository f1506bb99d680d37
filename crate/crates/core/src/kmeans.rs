//! Lloyd's k-means with k-means++ seeding and mean-silhouette scoring, on 2D
//! points (average pitch positions).

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type Point = [f64; 2];

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct KmeansOptions {
    /// Restarts with fresh seeding; the best fit by WCSS wins.
    pub n_init: usize,
    pub max_iter: usize,
    pub seed: u64,
}

impl Default for KmeansOptions {
    fn default() -> Self {
        KmeansOptions {
            n_init: 10,
            max_iter: 300,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct KmeansFit {
    pub centroids: Vec<Point>,
    pub assignments: Vec<usize>,
    /// Within-cluster sum of squared distances.
    pub wcss: f64,
    pub iterations: usize,
}

fn sq_dist(a: &Point, b: &Point) -> f64 {
    let dx = a[0] - b[0];
    let dy = a[1] - b[1];
    dx * dx + dy * dy
}

fn nearest(centroids: &[Point], p: &Point) -> (usize, f64) {
    let mut best = 0;
    let mut best_d = f64::INFINITY;
    for (c, centroid) in centroids.iter().enumerate() {
        let d = sq_dist(centroid, p);
        if d < best_d {
            best_d = d;
            best = c;
        }
    }
    (best, best_d)
}

/// k-means++ seeding: first centroid uniform, the rest proportional to the
/// squared distance to the nearest chosen centroid.
fn seed_centroids(points: &[Point], k: usize, rng: &mut ChaCha8Rng) -> Vec<Point> {
    let mut centroids = Vec::with_capacity(k);
    centroids.push(points[rng.random_range(0..points.len())]);
    let mut dist2: Vec<f64> = points.iter().map(|p| sq_dist(p, &centroids[0])).collect();

    while centroids.len() < k {
        let total: f64 = dist2.iter().sum();
        let next = if total > 0.0 {
            let mut t = rng.random::<f64>() * total;
            let mut chosen = points.len() - 1;
            for (i, &d) in dist2.iter().enumerate() {
                t -= d;
                if t <= 0.0 {
                    chosen = i;
                    break;
                }
            }
            chosen
        } else {
            rng.random_range(0..points.len())
        };
        centroids.push(points[next]);
        for (i, p) in points.iter().enumerate() {
            dist2[i] = dist2[i].min(sq_dist(p, centroids.last().unwrap()));
        }
    }
    centroids
}

/// One Lloyd run. Returns the fit and the per-iteration WCSS trace.
pub(crate) fn lloyd(
    points: &[Point],
    mut centroids: Vec<Point>,
    max_iter: usize,
) -> (KmeansFit, Vec<f64>) {
    let k = centroids.len();
    let mut assignments = vec![0usize; points.len()];
    let mut trace = Vec::new();
    let mut iterations = 0;

    for _ in 0..max_iter {
        iterations += 1;
        let mut changed = false;
        let mut wcss = 0.0;
        for (i, p) in points.iter().enumerate() {
            let (c, d) = nearest(&centroids, p);
            wcss += d;
            if assignments[i] != c {
                assignments[i] = c;
                changed = true;
            }
        }
        trace.push(wcss);

        let mut sums = vec![[0.0f64; 2]; k];
        let mut counts = vec![0usize; k];
        for (i, p) in points.iter().enumerate() {
            let c = assignments[i];
            sums[c][0] += p[0];
            sums[c][1] += p[1];
            counts[c] += 1;
        }
        for c in 0..k {
            if counts[c] > 0 {
                centroids[c] = [sums[c][0] / counts[c] as f64, sums[c][1] / counts[c] as f64];
            } else {
                // Re-seat an empty cluster on the point farthest from its
                // centroid (deterministic: first index on ties).
                let far = points
                    .iter()
                    .enumerate()
                    .max_by(|a, b| {
                        let da = sq_dist(a.1, &centroids[assignments[a.0]]);
                        let db = sq_dist(b.1, &centroids[assignments[b.0]]);
                        da.total_cmp(&db).then(b.0.cmp(&a.0))
                    })
                    .map(|(i, _)| i)
                    .unwrap();
                centroids[c] = points[far];
                changed = true;
            }
        }
        if !changed {
            break;
        }
    }

    // Final assignment against the converged centroids.
    let mut wcss = 0.0;
    for (i, p) in points.iter().enumerate() {
        let (c, d) = nearest(&centroids, p);
        assignments[i] = c;
        wcss += d;
    }
    trace.push(wcss);

    (
        KmeansFit {
            centroids,
            assignments,
            wcss,
            iterations,
        },
        trace,
    )
}

fn distinct_count(points: &[Point]) -> usize {
    let mut seen: Vec<(u64, u64)> = points
        .iter()
        .map(|p| (p[0].to_bits(), p[1].to_bits()))
        .collect();
    seen.sort_unstable();
    seen.dedup();
    seen.len()
}

/// Best-of-`n_init` k-means. Deterministic for a fixed seed; restarts draw
/// from one seeded stream and ties in WCSS keep the earlier restart.
pub fn kmeans(points: &[Point], k: usize, opts: &KmeansOptions) -> Result<KmeansFit> {
    if k == 0 {
        return Err(Error::TooFewDistinctPoints { k, distinct: 0 });
    }
    let distinct = distinct_count(points);
    if distinct < k {
        return Err(Error::TooFewDistinctPoints { k, distinct });
    }

    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut best: Option<KmeansFit> = None;
    for _ in 0..opts.n_init.max(1) {
        let centroids = seed_centroids(points, k, &mut rng);
        let (fit, _) = lloyd(points, centroids, opts.max_iter);
        if best.as_ref().map_or(true, |b| fit.wcss < b.wcss) {
            best = Some(fit);
        }
    }
    Ok(best.unwrap())
}

/// Mean silhouette over all samples, Euclidean distance.
///
/// Per sample, `a` is the mean distance to its own cluster's other members
/// and `b` the smallest mean distance to another cluster; the sample scores
/// `(b − a) / max(a, b)`. Singletons score 0.
pub fn silhouette_mean(points: &[Point], assignments: &[usize]) -> Result<f64> {
    if points.len() != assignments.len() {
        return Err(Error::DimensionMismatch {
            expected: format!("{} assignments", points.len()),
            got: format!("{}", assignments.len()),
        });
    }
    if points.is_empty() {
        return Err(Error::EmptyInput("silhouette of an empty sample set".into()));
    }
    let n_clusters = assignments.iter().copied().max().unwrap() + 1;
    let mut counts = vec![0usize; n_clusters];
    for &a in assignments {
        counts[a] += 1;
    }
    if counts.iter().filter(|&&c| c > 0).count() < 2 {
        return Err(Error::SingleCluster);
    }

    let n = points.len();
    let mut total = 0.0;
    let mut sums = vec![0.0f64; n_clusters];
    for i in 0..n {
        for s in sums.iter_mut() {
            *s = 0.0;
        }
        for j in 0..n {
            if i != j {
                sums[assignments[j]] += sq_dist(&points[i], &points[j]).sqrt();
            }
        }
        let own = assignments[i];
        if counts[own] <= 1 {
            continue; // singleton contributes s(i) = 0
        }
        let a = sums[own] / (counts[own] - 1) as f64;
        let mut b = f64::INFINITY;
        for c in 0..n_clusters {
            if c != own && counts[c] > 0 {
                b = b.min(sums[c] / counts[c] as f64);
            }
        }
        let denom = a.max(b);
        if denom > 0.0 {
            total += (b - a) / denom;
        }
    }
    Ok(total / n as f64)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn blob(center: Point, spread: f64, count: usize, seed: u64) -> Vec<Point> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..count)
            .map(|_| {
                [
                    center[0] + (rng.random::<f64>() - 0.5) * 2.0 * spread,
                    center[1] + (rng.random::<f64>() - 0.5) * 2.0 * spread,
                ]
            })
            .collect()
    }

    #[test]
    fn recovers_three_separated_blobs() {
        let centers: [Point; 3] = [[10.0, 10.0], [50.0, 50.0], [90.0, 10.0]];
        let mut points = Vec::new();
        let mut truth = Vec::new();
        for (c, center) in centers.iter().enumerate() {
            let pts = blob(*center, 1.0, 40, c as u64 + 1);
            truth.extend(std::iter::repeat_n(c, pts.len()));
            points.extend(pts);
        }
        let fit = kmeans(&points, 3, &KmeansOptions::default()).unwrap();

        // Majority label per planted blob must be exclusive (permutation ok).
        let mut map = [usize::MAX; 3];
        for c in 0..3 {
            let mut votes = [0usize; 3];
            for (i, &t) in truth.iter().enumerate() {
                if t == c {
                    votes[fit.assignments[i]] += 1;
                }
            }
            map[c] = votes.iter().enumerate().max_by_key(|(_, &v)| v).unwrap().0;
        }
        assert_eq!(
            {
                let mut m = map;
                m.sort();
                m
            },
            [0, 1, 2]
        );
        for (i, &t) in truth.iter().enumerate() {
            assert_eq!(fit.assignments[i], map[t], "point {i} misassigned");
        }
    }

    #[test]
    fn identical_points_with_k1() {
        let points = vec![[3.0, 4.0]; 12];
        let fit = kmeans(&points, 1, &KmeansOptions::default()).unwrap();
        assert_eq!(fit.centroids, vec![[3.0, 4.0]]);
        assert_eq!(fit.wcss, 0.0);
    }

    #[test]
    fn two_points_two_clusters() {
        let points = vec![[0.0, 0.0], [10.0, 0.0]];
        let fit = kmeans(&points, 2, &KmeansOptions::default()).unwrap();
        assert_eq!(fit.wcss, 0.0);
        let mut centroids = fit.centroids.clone();
        centroids.sort_by(|a, b| a[0].total_cmp(&b[0]));
        assert_eq!(centroids, vec![[0.0, 0.0], [10.0, 0.0]]);
    }

    #[test]
    fn too_few_distinct_points_is_an_error() {
        let points = vec![[1.0, 1.0], [1.0, 1.0], [2.0, 2.0]];
        assert!(matches!(
            kmeans(&points, 3, &KmeansOptions::default()),
            Err(Error::TooFewDistinctPoints { k: 3, distinct: 2 })
        ));
    }

    #[test]
    fn wcss_never_increases_within_a_run() {
        let mut points = blob([20.0, 20.0], 8.0, 60, 3);
        points.extend(blob([60.0, 70.0], 8.0, 60, 4));
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let centroids = seed_centroids(&points, 4, &mut rng);
        let (_, trace) = lloyd(&points, centroids, 100);
        for pair in trace.windows(2) {
            assert!(pair[1] <= pair[0] + 1e-9, "WCSS increased: {pair:?}");
        }
    }

    #[test]
    fn deterministic_under_fixed_seed() {
        let mut points = blob([20.0, 20.0], 5.0, 50, 7);
        points.extend(blob([80.0, 60.0], 5.0, 50, 8));
        let opts = KmeansOptions {
            seed: 99,
            ..Default::default()
        };
        let a = kmeans(&points, 2, &opts).unwrap();
        let b = kmeans(&points, 2, &opts).unwrap();
        assert_eq!(a.centroids, b.centroids);
        assert_eq!(a.assignments, b.assignments);
    }

    #[test]
    fn silhouette_of_two_tight_far_pairs_is_high() {
        let points = vec![[0.0, 0.0], [0.0, 0.1], [10.0, 10.0], [10.0, 10.1]];
        let s = silhouette_mean(&points, &[0, 0, 1, 1]).unwrap();
        assert!(s > 0.9, "score {s}");
    }

    #[test]
    fn equidistant_sample_scores_zero() {
        // Sample 1 sits exactly between its own cluster mate and the other
        // cluster: a = b = 2 → s(1) = 0. Sample 0: a = 2, b = 4 → s = 0.5.
        // Sample 2 is a singleton → 0. Mean = 0.5 / 3.
        let points = vec![[0.0, 0.0], [2.0, 0.0], [4.0, 0.0]];
        let s = silhouette_mean(&points, &[0, 0, 1]).unwrap();
        assert!((s - 0.5 / 3.0).abs() < 1e-12, "score {s}");
    }

    /// Literal O(n²) transcription of s(i) = (b−a)/max{a,b}.
    fn brute_force_silhouette(points: &[Point], assignments: &[usize]) -> f64 {
        let n = points.len();
        let k = assignments.iter().copied().max().unwrap() + 1;
        let dist = |a: &Point, b: &Point| ((a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2)).sqrt();
        let mut total = 0.0;
        for i in 0..n {
            let own = assignments[i];
            let own_members: Vec<usize> = (0..n).filter(|&j| j != i && assignments[j] == own).collect();
            if own_members.is_empty() {
                continue;
            }
            let a: f64 = own_members.iter().map(|&j| dist(&points[i], &points[j])).sum::<f64>()
                / own_members.len() as f64;
            let mut b = f64::INFINITY;
            for c in 0..k {
                if c == own {
                    continue;
                }
                let members: Vec<usize> = (0..n).filter(|&j| assignments[j] == c).collect();
                if members.is_empty() {
                    continue;
                }
                let mean = members.iter().map(|&j| dist(&points[i], &points[j])).sum::<f64>()
                    / members.len() as f64;
                b = b.min(mean);
            }
            if a.max(b) > 0.0 {
                total += (b - a) / a.max(b);
            }
        }
        total / n as f64
    }

    #[test]
    fn silhouette_needs_two_clusters() {
        let points = vec![[0.0, 0.0], [1.0, 1.0]];
        assert!(matches!(
            silhouette_mean(&points, &[0, 0]),
            Err(Error::SingleCluster)
        ));
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #![proptest_config(ProptestConfig::with_cases(40))]

            /// The library silhouette equals the brute-force formula on
            /// random fixtures.
            #[test]
            fn silhouette_matches_brute_force(
                seed in 0u64..1000,
                n in 4usize..60,
                k in 2usize..5,
            ) {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                let points: Vec<Point> = (0..n)
                    .map(|_| [rng.random::<f64>() * 100.0, rng.random::<f64>() * 100.0])
                    .collect();
                // Guarantee at least two non-empty clusters.
                let assignments: Vec<usize> = (0..n).map(|i| if i < 2 { i % k } else { rng.random_range(0..k) }).collect();
                prop_assume!(assignments.iter().collect::<std::collections::BTreeSet<_>>().len() >= 2);
                let lib = silhouette_mean(&points, &assignments).unwrap();
                let brute = brute_force_silhouette(&points, &assignments);
                prop_assert!((lib - brute).abs() < 1e-12);
                prop_assert!((-1.0..=1.0).contains(&lib));
            }
        }
    }
}
