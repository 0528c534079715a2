//! Short-term feature extraction and feature selection, on the default rayon
//! pool and on a one-thread pool.

use cough_core::dataset::Scenario;
use cough_core::features::{ExtractionConfig, FeatureExtractor};
use cough_core::par;
use cough_core::selection::{select_features, LabeledShortTermSet, SelectionConfig};
use cough_core::synth::{synthesize_recording, SynthConfig};
use cough_core::Matrix;
use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion, Throughput};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

const POOLS: [(&str, usize); 2] = [("rayon", 0), ("one-thread", 1)];

fn extraction(c: &mut Criterion) {
    let synth = SynthConfig {
        patients: 1,
        coughs_per_scenario: 30,
        ..SynthConfig::default()
    };
    let rec = synthesize_recording(&synth, 0, Scenario::Part2, 1).unwrap();
    let extractor = FeatureExtractor::new(&ExtractionConfig::default()).unwrap();
    let mut group = c.benchmark_group("extract");
    group.sample_size(10);
    group.throughput(Throughput::Elements(rec.signal.len() as u64));
    for (name, threads) in POOLS {
        group.bench_with_input(BenchmarkId::new(name, rec.signal.len()), &threads, |b, &t| {
            b.iter(|| par::with_threads(t, || extractor.extract(&rec.signal).unwrap()))
        });
    }
    group.finish();
}

fn planted(n: usize, seed: u64) -> [LabeledShortTermSet; 3] {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let names: Vec<String> = (0..117).map(|j| format!("f{j}")).collect();
    Scenario::ALL.map(|s| {
        let labels: Vec<bool> = (0..n).map(|i| i % 4 == 0).collect();
        let data: Vec<f64> = labels
            .iter()
            .flat_map(|&y| (0..117).map(move |j| if y && j < 29 { 1.5 } else { 0.0 }))
            .map(|m: f64| {
                let z: f64 = StandardNormal.sample(&mut rng);
                m + z
            })
            .collect();
        LabeledShortTermSet::new(Matrix::new(n, 117, data).unwrap(), labels, s, names.clone()).unwrap()
    })
}

fn selection(c: &mut Criterion) {
    let sets = planted(5000, 2);
    let config = SelectionConfig::default();
    let mut group = c.benchmark_group("select");
    group.sample_size(10);
    for (name, threads) in POOLS {
        group.bench_function(name, |b| {
            b.iter(|| par::with_threads(threads, || select_features(&sets, &config, 3).unwrap()))
        });
    }
    group.finish();
}

criterion_group!(benches, extraction, selection);
criterion_main!(benches);
