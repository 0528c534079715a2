//! ReliefF feature weighting for two classes.

use serde::{Deserialize, Serialize};

use crate::dataset::Scenario;
use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::par;

/// Features ranked by ReliefF weight, best first.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankedFeatureSet {
    pub scenario: Scenario,
    /// Feature indices, best first; ties go to the lower index.
    pub ranking: Vec<usize>,
    /// Weight of every feature, indexed by feature.
    pub weights: Vec<f64>,
}

impl RankedFeatureSet {
    /// Ranks all features of `weights`.
    pub fn from_weights(scenario: Scenario, weights: Vec<f64>) -> Self {
        let mut ranking: Vec<usize> = (0..weights.len()).collect();
        ranking.sort_by(|&a, &b| weights[b].total_cmp(&weights[a]).then(a.cmp(&b)));
        Self {
            scenario,
            ranking,
            weights,
        }
    }

    /// The best `n` features.
    pub fn top(&self, n: usize) -> &[usize] {
        &self.ranking[..n.min(self.ranking.len())]
    }

    /// Weights in ranking order.
    pub fn ranked_weights(&self) -> Vec<f64> {
        self.ranking.iter().map(|&f| self.weights[f]).collect()
    }

    /// 1-based rank of `feature`.
    pub fn rank_of(&self, feature: usize) -> Option<usize> {
        self.ranking.iter().position(|&f| f == feature).map(|p| p + 1)
    }
}

/// Min-max scales every column to `[0, 1]`; constant columns become 0.
pub fn min_max_scale(data: &Matrix) -> Matrix {
    let (n, d) = (data.rows(), data.cols());
    let mut lo = vec![f64::INFINITY; d];
    let mut hi = vec![f64::NEG_INFINITY; d];
    for row in data.iter_rows() {
        for (j, &v) in row.iter().enumerate() {
            lo[j] = lo[j].min(v);
            hi[j] = hi[j].max(v);
        }
    }
    let mut out = Matrix::zeros(n, d);
    for i in 0..n {
        let src = data.row(i);
        for (j, o) in out.row_mut(i).iter_mut().enumerate() {
            let span = hi[j] - lo[j];
            *o = if span > 0.0 { (src[j] - lo[j]) / span } else { 0.0 };
        }
    }
    out
}

fn manhattan(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).sum()
}

/// `k` nearest members of `pool` to row `i`, by distance then index.
fn nearest(scaled: &Matrix, i: usize, pool: &[usize], k: usize) -> Vec<usize> {
    let xi = scaled.row(i);
    let mut cand: Vec<(f64, usize)> = pool
        .iter()
        .filter(|&&j| j != i)
        .map(|&j| (manhattan(xi, scaled.row(j)), j))
        .collect();
    let cmp = |a: &(f64, usize), b: &(f64, usize)| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1));
    if k < cand.len() {
        cand.select_nth_unstable_by(k - 1, cmp);
        cand.truncate(k);
    }
    cand.sort_unstable_by(cmp);
    cand.into_iter().map(|(_, j)| j).collect()
}

/// ReliefF weights with `k` hits and misses per instance, every instance
/// sampled once. Features are min-max scaled inside, so weights lie in
/// `[-1, 1]` and constant features weigh 0.
pub fn relieff_weights(data: &Matrix, labels: &[bool], k: usize) -> Result<Vec<f64>> {
    let n = data.rows();
    if labels.len() != n {
        return Err(Error::DimensionMismatch {
            context: "ReliefF labels",
            expected: n,
            actual: labels.len(),
        });
    }
    if k == 0 {
        return Err(Error::InvalidArgument("ReliefF needs k >= 1".into()));
    }
    if !data.all_finite() {
        return Err(Error::NonFinite("ReliefF input"));
    }
    let pos: Vec<usize> = (0..n).filter(|&i| labels[i]).collect();
    let neg: Vec<usize> = (0..n).filter(|&i| !labels[i]).collect();
    for (class, members) in [("cough", &pos), ("other", &neg)] {
        if members.len() < k + 1 {
            return Err(Error::ClassTooSmall {
                class,
                count: members.len(),
                required: k + 1,
            });
        }
    }
    let scaled = min_max_scale(data);
    let d = data.cols();
    let norm = (n * k) as f64;
    let contributions = par::map_range(n, |i| {
        let (same, other) = if labels[i] { (&pos, &neg) } else { (&neg, &pos) };
        let xi = scaled.row(i);
        let mut c = vec![0.0; d];
        for h in nearest(&scaled, i, same, k) {
            for (cj, (a, b)) in c.iter_mut().zip(xi.iter().zip(scaled.row(h))) {
                *cj -= (a - b).abs();
            }
        }
        for m in nearest(&scaled, i, other, k) {
            for (cj, (a, b)) in c.iter_mut().zip(xi.iter().zip(scaled.row(m))) {
                *cj += (a - b).abs();
            }
        }
        c
    });
    let mut w = vec![0.0; d];
    for c in contributions {
        for (wj, cj) in w.iter_mut().zip(c) {
            *wj += cj;
        }
    }
    w.iter_mut().for_each(|v| *v /= norm);
    Ok(w)
}

/// ReliefF ranking of every feature.
pub fn relieff_rank(data: &Matrix, labels: &[bool], scenario: Scenario, k: usize) -> Result<RankedFeatureSet> {
    Ok(RankedFeatureSet::from_weights(
        scenario,
        relieff_weights(data, labels, k)?,
    ))
}
