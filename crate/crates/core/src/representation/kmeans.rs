//! Lloyd's k-means with farthest-point seeding.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::par;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct KMeansConfig {
    pub max_iterations: usize,
    /// Relative change of the objective that counts as converged.
    pub tolerance: f64,
}

impl Default for KMeansConfig {
    fn default() -> Self {
        Self {
            max_iterations: 300,
            tolerance: 1e-6,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct KMeans {
    pub centroids: Matrix,
    /// Nearest centroid of every training point under the final centroids.
    pub assignments: Vec<usize>,
    /// Sum of squared distances to the assigned centroids.
    pub objective: f64,
    pub iterations: usize,
}

pub(crate) fn squared_distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).powi(2)).sum()
}

/// Index of the nearest row of `centroids` to `x`; ties go to the lower index.
pub fn nearest_centroid(centroids: &Matrix, x: &[f64]) -> (usize, f64) {
    let mut best = (0, f64::INFINITY);
    for (c, row) in centroids.iter_rows().enumerate() {
        let d = squared_distance(x, row);
        if d < best.1 {
            best = (c, d);
        }
    }
    best
}

fn assign(data: &Matrix, centroids: &Matrix) -> (Vec<usize>, Vec<f64>) {
    par::map_range(data.rows(), |i| nearest_centroid(centroids, data.row(i)))
        .into_iter()
        .unzip()
}

fn count_distinct(data: &Matrix) -> usize {
    let mut rows: Vec<&[f64]> = data.iter_rows().collect();
    rows.sort_by(|a, b| {
        a.iter()
            .zip(*b)
            .map(|(x, y)| x.total_cmp(y))
            .find(|o| o.is_ne())
            .unwrap_or(std::cmp::Ordering::Equal)
    });
    rows.dedup();
    rows.len()
}

impl KMeans {
    /// Clusters the rows of `data` into `k` groups.
    ///
    /// The first seed is a random row; each further seed is the row farthest
    /// from the seeds chosen so far. An empty cluster takes over the point
    /// farthest from its current centroid.
    pub fn fit(data: &Matrix, k: usize, seed: u64, config: &KMeansConfig) -> Result<Self> {
        if k == 0 {
            return Err(Error::InvalidArgument("k-means needs k >= 1".into()));
        }
        if !data.all_finite() {
            return Err(Error::NonFinite("k-means input"));
        }
        let distinct = count_distinct(data);
        if distinct < k {
            return Err(Error::TooFewDistinct { distinct, required: k });
        }
        let (n, d) = (data.rows(), data.cols());
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut chosen = vec![rng.random_range(0..n)];
        let mut min_d: Vec<f64> = (0..n)
            .map(|i| squared_distance(data.row(i), data.row(chosen[0])))
            .collect();
        while chosen.len() < k {
            let (far, _) = min_d.iter().enumerate().fold(
                (0, f64::NEG_INFINITY),
                |acc, (i, &v)| if v > acc.1 { (i, v) } else { acc },
            );
            chosen.push(far);
            for (i, m) in min_d.iter_mut().enumerate() {
                *m = m.min(squared_distance(data.row(i), data.row(far)));
            }
        }
        let mut centroids = data.select_rows(&chosen);
        let (mut labels, mut dist) = assign(data, &centroids);
        let mut objective: f64 = dist.iter().sum();
        let mut iterations = 0;
        while iterations < config.max_iterations {
            iterations += 1;
            let mut sums = Matrix::zeros(k, d);
            let mut counts = vec![0usize; k];
            for (i, &c) in labels.iter().enumerate() {
                counts[c] += 1;
                for (s, v) in sums.row_mut(c).iter_mut().zip(data.row(i)) {
                    *s += v;
                }
            }
            for c in 0..k {
                if counts[c] == 0 {
                    let (far, _) =
                        dist.iter().enumerate().fold(
                            (0, f64::NEG_INFINITY),
                            |acc, (i, &v)| if v > acc.1 { (i, v) } else { acc },
                        );
                    log::debug!("k-means: re-seeding empty cluster {c} from point {far}");
                    centroids.row_mut(c).copy_from_slice(data.row(far));
                    dist[far] = 0.0;
                } else {
                    let inv = 1.0 / counts[c] as f64;
                    for (dst, s) in centroids.row_mut(c).iter_mut().zip(sums.row(c)) {
                        *dst = s * inv;
                    }
                }
            }
            let (new_labels, new_dist) = assign(data, &centroids);
            let new_objective: f64 = new_dist.iter().sum();
            let unchanged = new_labels == labels;
            let rel = (objective - new_objective).abs() / objective.max(f64::MIN_POSITIVE);
            labels = new_labels;
            dist = new_dist;
            objective = new_objective;
            if unchanged || rel < config.tolerance {
                break;
            }
        }
        Ok(Self {
            centroids,
            assignments: labels,
            objective,
            iterations,
        })
    }
}
