//! Maximum-likelihood intrinsic dimension (Levina-Bickel).

use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::par;

fn euclidean(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).powi(2)).sum::<f64>().sqrt()
}

/// Levina-Bickel estimate averaged over `k_min..=k_max`.
///
/// Zero neighbour distances (duplicate points) are skipped, so each point
/// uses its nearest non-zero distances. Points with fewer than `k` such
/// neighbours, or with all `k` distances equal, contribute nothing at `k`.
pub fn intrinsic_dimension_mle(data: &Matrix, k_min: usize, k_max: usize) -> Result<f64> {
    if k_min < 2 || k_max < k_min {
        return Err(Error::InvalidArgument(format!(
            "invalid neighbour range {k_min}..={k_max}"
        )));
    }
    let n = data.rows();
    if n < k_max + 1 {
        return Err(Error::ClassTooSmall {
            class: "observations",
            count: n,
            required: k_max + 1,
        });
    }
    let neighbours: Vec<Vec<f64>> = par::map_range(n, |i| {
        let xi = data.row(i);
        let mut d: Vec<f64> = (0..n)
            .filter(|&j| j != i)
            .map(|j| euclidean(xi, data.row(j)))
            .filter(|&d| d > 0.0)
            .collect();
        let keep = k_max.min(d.len());
        if keep > 0 && keep < d.len() {
            d.select_nth_unstable_by(keep - 1, f64::total_cmp);
        }
        d.truncate(keep);
        d.sort_unstable_by(f64::total_cmp);
        d
    });
    let mut per_k = Vec::new();
    for k in k_min..=k_max {
        let (mut sum, mut count) = (0.0, 0usize);
        for d in neighbours.iter().filter(|d| d.len() >= k) {
            let tk = d[k - 1];
            let s: f64 = d[..k - 1].iter().map(|&tj| (tk / tj).ln()).sum();
            if s > 0.0 {
                sum += (k - 1) as f64 / s;
                count += 1;
            }
        }
        if count > 0 {
            per_k.push(sum / count as f64);
        }
    }
    if per_k.is_empty() {
        return Err(Error::TooFewDistinct {
            distinct: neighbours.iter().map(|d| d.len()).max().unwrap_or(0) + 1,
            required: k_min + 1,
        });
    }
    Ok(per_k.iter().sum::<f64>() / per_k.len() as f64)
}
