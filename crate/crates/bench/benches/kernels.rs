use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use ndarray::Array2;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use player_vectors::events::{ActionCategory, PitchPoint};
use player_vectors::heatmap::{build_heatmap, GridSpec};
use player_vectors::kmeans::{kmeans, silhouette_mean, KmeansOptions};
use player_vectors::nmf::{nmf_fit, NmfOptions};

fn bench_nmf(c: &mut Criterion) {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let w = Array2::from_shape_fn((425, 4), |_| rng.random::<f64>());
    let h = Array2::from_shape_fn((4, 600), |_| rng.random::<f64>());
    let m = w.dot(&h);
    let opts = NmfOptions {
        max_iter: 50,
        tol: 0.0,
        seed: 3,
    };
    c.bench_function("nmf_fit 425x600 k4 50it", |b| {
        b.iter(|| nmf_fit(black_box(&m.view()), 4, &opts).unwrap())
    });
}

fn bench_heatmap(c: &mut Criterion) {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let points: Vec<PitchPoint> = (0..40)
        .map(|_| PitchPoint {
            x: rng.random::<f64>() * 100.0,
            y: rng.random::<f64>() * 100.0,
        })
        .collect();
    let spec = GridSpec::default();
    c.bench_function("build_heatmap 50x34 sigma1.5", |b| {
        b.iter(|| build_heatmap("p", "m", ActionCategory::Pass, black_box(&points), &spec))
    });
}

fn bench_clustering(c: &mut Criterion) {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let centers = [[80.0, 50.0], [68.0, 78.0], [68.0, 22.0], [45.0, 50.0], [25.0, 50.0]];
    let points: Vec<[f64; 2]> = (0..2000)
        .map(|i| {
            let c = centers[i % centers.len()];
            [c[0] + rng.random::<f64>() * 4.0, c[1] + rng.random::<f64>() * 4.0]
        })
        .collect();
    let opts = KmeansOptions::default();
    c.bench_function("kmeans k5 n2000", |b| {
        b.iter(|| kmeans(black_box(&points), 5, &opts).unwrap())
    });
    let fit = kmeans(&points, 5, &opts).unwrap();
    c.bench_function("silhouette n2000", |b| {
        b.iter(|| silhouette_mean(black_box(&points), &fit.assignments).unwrap())
    });
}

criterion_group!(benches, bench_nmf, bench_heatmap, bench_clustering);
criterion_main!(benches);
