use cough_core::representation::{avgsd, encode_groups, label_group, Codebook, Encoder, KMeans, KMeansConfig};
use cough_core::Matrix;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

fn blobs(centres: &[[f64; 2]], per: usize, seed: u64) -> Matrix {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let rows: Vec<Vec<f64>> = centres
        .iter()
        .flat_map(|c| {
            (0..per)
                .map(|_| {
                    c.iter()
                        .map(|m| {
                            let z: f64 = StandardNormal.sample(&mut rng);
                            m + z
                        })
                        .collect::<Vec<f64>>()
                })
                .collect::<Vec<_>>()
        })
        .collect();
    Matrix::from_rows(&rows).unwrap()
}

fn random_matrix(n: usize, d: usize, seed: u64) -> Matrix {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let rows: Vec<Vec<f64>> = (0..n)
        .map(|_| (0..d).map(|_| rng.random_range(-3.0..3.0)).collect())
        .collect();
    Matrix::from_rows(&rows).unwrap()
}

#[test]
fn avgsd_examples() {
    let v = [1.0, -2.0, 0.5];
    assert_eq!(avgsd(&[v; 5]).unwrap(), vec![1.0, -2.0, 0.5, 0.0, 0.0, 0.0]);
    let g: Vec<[f64; 1]> = (1..=5).map(|i| [i as f64]).collect();
    let out = avgsd(&g).unwrap();
    assert_eq!(out[0], 3.0);
    assert!((out[1] - 2f64.sqrt()).abs() < 1e-15);
    assert!(avgsd(&[[1.0]; 4]).is_err());
    assert!(avgsd(&[&[1.0][..], &[1.0], &[1.0], &[1.0], &[1.0, 2.0]]).is_err());
}

#[test]
fn group_labels_by_majority() {
    assert!(label_group(&[true, true, true, false, false]).unwrap());
    assert!(!label_group(&[false; 5]).unwrap());
    assert!(label_group(&[true, false, true, false, true]).unwrap());
    assert!(label_group(&[true; 4]).is_err());
}

#[test]
fn kmeans_single_cluster_is_mean() {
    let x = random_matrix(100, 3, 1);
    let km = KMeans::fit(&x, 1, 0, &KMeansConfig::default()).unwrap();
    for j in 0..3 {
        let mean = x.column(j).iter().sum::<f64>() / 100.0;
        assert!((km.centroids.get(0, j) - mean).abs() < 1e-12);
    }
}

#[test]
fn kmeans_recovers_two_blobs() {
    let x = blobs(&[[0.0, 0.0], [10.0, 10.0]], 500, 2);
    let km = KMeans::fit(&x, 2, 9, &KMeansConfig::default()).unwrap();
    let mut c: Vec<[f64; 2]> = km.centroids.iter_rows().map(|r| [r[0], r[1]]).collect();
    c.sort_by(|a, b| a[0].total_cmp(&b[0]));
    for (got, want) in c.iter().zip([[0.0, 0.0], [10.0, 10.0]]) {
        for k in 0..2 {
            assert!((got[k] - want[k]).abs() < 0.2, "{got:?}");
        }
    }
}

#[test]
fn kmeans_beats_random_assignment_and_is_local_optimum() {
    let x = random_matrix(400, 4, 3);
    let km = KMeans::fit(&x, 8, 5, &KMeansConfig::default()).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let assign: Vec<usize> = (0..400).map(|_| rng.random_range(0..8)).collect();
    let mut sums = vec![vec![0.0; 4]; 8];
    let mut counts = vec![0.0; 8];
    for (i, &c) in assign.iter().enumerate() {
        counts[c] += 1.0;
        for j in 0..4 {
            sums[c][j] += x.get(i, j);
        }
    }
    let random_obj: f64 = assign
        .iter()
        .enumerate()
        .map(|(i, &c)| {
            (0..4)
                .map(|j| (x.get(i, j) - sums[c][j] / counts[c]).powi(2))
                .sum::<f64>()
        })
        .sum();
    assert!(km.objective <= random_obj);
    // nearest-centroid assignment everywhere
    for i in 0..400 {
        let d = |c: usize| {
            (0..4)
                .map(|j| (x.get(i, j) - km.centroids.get(c, j)).powi(2))
                .sum::<f64>()
        };
        let own = d(km.assignments[i]);
        assert!((0..8).all(|c| d(c) >= own));
    }
}

#[test]
fn kmeans_needs_distinct_points() {
    let x = Matrix::from_rows(&vec![[1.0, 1.0]; 20]).unwrap();
    assert!(KMeans::fit(&x, 2, 0, &KMeansConfig::default()).is_err());
}

#[test]
fn codebook_shape_and_symmetry() {
    let pos = random_matrix(200, 29, 10);
    let neg = random_matrix(300, 29, 11);
    let cfg = KMeansConfig::default();
    let cb = Codebook::build(&pos, &neg, 16, 16, 7, &cfg).unwrap();
    assert_eq!(cb.len(), 32);
    assert!(cb.words.all_finite());
    let rows: Vec<&[f64]> = cb.words.iter_rows().collect();
    for a in 0..32 {
        for b in a + 1..32 {
            assert_ne!(rows[a], rows[b]);
        }
    }
    let swapped = Codebook::build(&neg, &pos, 16, 16, 7, &cfg).unwrap();
    for w in 0..16 {
        for j in 0..29 {
            assert!((cb.words.get(w, j) - swapped.words.get(w + 16, j)).abs() < 1e-9);
            assert!((cb.words.get(w + 16, j) - swapped.words.get(w, j)).abs() < 1e-9);
        }
    }
    let same = Codebook::build(&pos, &pos, 16, 16, 7, &cfg).unwrap();
    for w in 0..16 {
        assert_eq!(same.words.row(w), same.words.row(w + 16));
    }
}

#[test]
fn boaw_reproduces_kmeans_assignments() {
    // both halves trained on the same points: ties resolve to the first half
    let pos = random_matrix(150, 5, 20);
    let cb = Codebook::build(&pos, &pos, 4, 4, 3, &KMeansConfig::default()).unwrap();
    let zpos = cb.standardizer.transform(&pos).unwrap();
    let km = KMeans::fit(&zpos, 4, 3, &KMeansConfig::default()).unwrap();
    for i in 0..150 {
        assert_eq!(cb.quantize(pos.row(i)).unwrap(), km.assignments[i]);
    }
}

#[test]
fn boaw_at_word_locations_matches_brute_force() {
    let pos = random_matrix(100, 3, 30);
    let neg = random_matrix(100, 3, 31);
    let cb = Codebook::build(&pos, &neg, 4, 4, 1, &KMeansConfig::default()).unwrap();
    // map words back to raw space and encode groups placed on them
    let raw_word = |w: usize| -> Vec<f64> {
        (0..3)
            .map(|j| cb.words.get(w, j) * cb.standardizer.sd()[j] + cb.standardizer.mean()[j])
            .collect()
    };
    for (group, expected) in [
        ([7usize; 5], {
            let mut e = vec![0.0; 8];
            e[7] = 5.0;
            e
        }),
        ([0, 3, 3, 5, 0], {
            let mut e = vec![0.0; 8];
            e[0] = 2.0;
            e[3] = 2.0;
            e[5] = 1.0;
            e
        }),
    ] {
        let frames: Vec<Vec<f64>> = group.iter().map(|&w| raw_word(w)).collect();
        let brute: Vec<f64> = {
            let mut h = vec![0.0; 8];
            for f in &frames {
                let z = cb.standardizer.transform_row(f).unwrap();
                let best = (0..8)
                    .min_by(|&a, &b| {
                        let d = |w: usize| (0..3).map(|j| (z[j] - cb.words.get(w, j)).powi(2)).sum::<f64>();
                        d(a).total_cmp(&d(b)).then(a.cmp(&b))
                    })
                    .unwrap();
                h[best] += 1.0;
            }
            h
        };
        let hist = Encoder::Boaw(&cb).encode(&frames).unwrap();
        assert_eq!(hist, brute);
        assert_eq!(hist, expected);
    }
}

#[test]
fn codebook_roundtrip_is_exact() {
    let cb = Codebook::build(
        &random_matrix(60, 4, 40),
        &random_matrix(60, 4, 41),
        3,
        5,
        2,
        &KMeansConfig::default(),
    )
    .unwrap();
    let bytes = cb.to_bytes();
    assert_eq!(Codebook::from_bytes(&bytes).unwrap(), cb);
    let mut bad = bytes.clone();
    bad[20] ^= 1;
    assert!(Codebook::from_bytes(&bad).is_err());
}

#[test]
fn encode_groups_dimensions() {
    let frames = random_matrix(21, 29, 50);
    let labels: Vec<bool> = (0..21).map(|i| i < 8).collect();
    let block = encode_groups(&frames, &labels, &Encoder::AvgSd).unwrap();
    assert_eq!(block.matrix.rows(), 5);
    assert_eq!(block.matrix.cols(), 58);
    assert_eq!(block.labels, vec![true, true, false, false, false]);
    let cb = Codebook::build(
        &random_matrix(60, 29, 51),
        &random_matrix(60, 29, 52),
        16,
        16,
        0,
        &KMeansConfig::default(),
    )
    .unwrap();
    let b = encode_groups(&frames, &labels, &Encoder::Boaw(&cb)).unwrap();
    assert_eq!(b.matrix.cols(), 32);
    for r in b.matrix.iter_rows() {
        assert_eq!(r.iter().sum::<f64>(), 5.0);
        assert!(r.iter().all(|v| v.fract() == 0.0 && *v >= 0.0));
    }
}

proptest! {
    #[test]
    fn avgsd_order_free_and_bounded(rows in prop::collection::vec(prop::collection::vec(-5.0f64..5.0, 4), 5), perm in Just(vec![0usize, 1, 2, 3, 4]).prop_shuffle()) {
        let a = avgsd(&rows).unwrap();
        let shuffled: Vec<Vec<f64>> = perm.iter().map(|&i| rows[i].clone()).collect();
        let b = avgsd(&shuffled).unwrap();
        for (x, y) in a.iter().zip(&b) {
            prop_assert!((x - y).abs() < 1e-12);
        }
        for j in 0..4 {
            let lo = rows.iter().map(|r| r[j]).fold(f64::INFINITY, f64::min);
            let hi = rows.iter().map(|r| r[j]).fold(f64::NEG_INFINITY, f64::max);
            prop_assert!(a[j] >= lo - 1e-12 && a[j] <= hi + 1e-12);
            prop_assert!(a[4 + j] >= 0.0);
        }
    }

    #[test]
    fn boaw_histogram_sums_to_five(seed in 0u64..50, perm in Just(vec![0usize, 1, 2, 3, 4]).prop_shuffle()) {
        let cb = Codebook::build(&random_matrix(40, 3, seed), &random_matrix(40, 3, seed + 1000), 4, 4, seed, &KMeansConfig::default()).unwrap();
        let frames = random_matrix(5, 3, seed + 2000);
        let rows: Vec<&[f64]> = frames.iter_rows().collect();
        let h = Encoder::Boaw(&cb).encode(&rows).unwrap();
        prop_assert_eq!(h.iter().sum::<f64>(), 5.0);
        let shuffled: Vec<&[f64]> = perm.iter().map(|&i| rows[i]).collect();
        prop_assert_eq!(Encoder::Boaw(&cb).encode(&shuffled).unwrap(), h);
    }
}
