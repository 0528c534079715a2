//! Sparse filterbanks over a one-sided power spectrum.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Scale {
    Mel,
    Bark,
    Octave,
}

/// HTK mel scale.
pub fn hz_to_mel(hz: f64) -> f64 {
    2595.0 * (1.0 + hz / 700.0).log10()
}

pub fn mel_to_hz(mel: f64) -> f64 {
    700.0 * (10f64.powf(mel / 2595.0) - 1.0)
}

/// Traunmüller's Bark approximation.
pub fn hz_to_bark(hz: f64) -> f64 {
    26.81 * hz / (1960.0 + hz) - 0.53
}

pub fn bark_to_hz(bark: f64) -> f64 {
    1960.0 * (bark + 0.53) / (26.28 - bark)
}

/// `n` equally spaced points from `lo` to `hi` inclusive.
pub(crate) fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![lo];
    }
    (0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64).collect()
}

/// Non-zero weights of one filter, starting at bin `start`.
#[derive(Debug, Clone, PartialEq)]
pub struct Filter {
    pub start: usize,
    pub weights: Vec<f64>,
}

impl Filter {
    fn from_dense(dense: Vec<f64>) -> Option<Self> {
        let start = dense.iter().position(|&w| w > 0.0)?;
        let end = dense.iter().rposition(|&w| w > 0.0)? + 1;
        Some(Self {
            start,
            weights: dense[start..end].to_vec(),
        })
    }

    pub fn bins(&self) -> std::ops::Range<usize> {
        self.start..self.start + self.weights.len()
    }

    /// Weighted sum of `power` over the filter support.
    pub fn apply(&self, power: &[f64]) -> f64 {
        self.weights.iter().zip(&power[self.bins()]).map(|(w, p)| w * p).sum()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FilterBank {
    pub scale: Scale,
    pub range: (f64, f64),
    pub filters: Vec<Filter>,
}

impl FilterBank {
    fn build(scale: Scale, range: (f64, f64), freqs: &[f64], dense: impl Iterator<Item = Vec<f64>>) -> Result<Self> {
        let filters = dense
            .enumerate()
            .map(|(m, d)| {
                Filter::from_dense(d).ok_or_else(|| {
                    Error::InvalidArgument(format!(
                        "{scale:?} filter {} has no support on a {}-bin grid",
                        m + 1,
                        freqs.len()
                    ))
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { scale, range, filters })
    }

    /// Triangular filters equally spaced on the mel scale over `[lo, hi]`.
    pub fn mel(n_filters: usize, lo: f64, hi: f64, freqs: &[f64]) -> Result<Self> {
        let pts: Vec<f64> = linspace(hz_to_mel(lo), hz_to_mel(hi), n_filters + 2)
            .into_iter()
            .map(mel_to_hz)
            .collect();
        let dense = (0..n_filters).map(|m| {
            let (l, c, r) = (pts[m], pts[m + 1], pts[m + 2]);
            freqs
                .iter()
                .map(|&f| {
                    if f > l && f <= c {
                        (f - l) / (c - l)
                    } else if f > c && f < r {
                        (r - f) / (r - c)
                    } else {
                        0.0
                    }
                })
                .collect::<Vec<f64>>()
        });
        Self::build(Scale::Mel, (lo, hi), freqs, dense)
    }

    /// Triangular filters `width` Bark wide, centres equally spaced in Bark
    /// so that every filter lies inside `[lo, hi]`.
    pub fn bark(n_filters: usize, width: f64, lo: f64, hi: f64, freqs: &[f64]) -> Result<Self> {
        let half = width / 2.0;
        let (zlo, zhi) = (hz_to_bark(lo), hz_to_bark(hi));
        if zhi - zlo <= width {
            return Err(Error::InvalidArgument("Bark range narrower than one filter".into()));
        }
        let centres = linspace(zlo + half, zhi - half, n_filters);
        let dense = centres.into_iter().map(|zc| {
            freqs
                .iter()
                .map(|&f| {
                    if f < lo || f > hi {
                        0.0
                    } else {
                        (1.0 - (hz_to_bark(f) - zc).abs() / half).max(0.0)
                    }
                })
                .collect::<Vec<f64>>()
        });
        Self::build(Scale::Bark, (lo, hi), freqs, dense)
    }

    /// Rectangular bands with logarithmically spaced edges over `[lo, hi)`.
    pub fn log_bands(n_bands: usize, lo: f64, hi: f64, freqs: &[f64]) -> Result<Self> {
        let ratio = (hi / lo).powf(1.0 / n_bands as f64);
        let edges: Vec<f64> = (0..=n_bands).map(|b| lo * ratio.powi(b as i32)).collect();
        let dense = (0..n_bands).map(|b| {
            freqs
                .iter()
                .map(|&f| if f >= edges[b] && f < edges[b + 1] { 1.0 } else { 0.0 })
                .collect::<Vec<f64>>()
        });
        Self::build(Scale::Octave, (lo, hi), freqs, dense)
    }

    pub fn len(&self) -> usize {
        self.filters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.filters.is_empty()
    }

    /// Filter outputs for one power spectrum.
    pub fn apply(&self, power: &[f64]) -> Vec<f64> {
        self.filters.iter().map(|f| f.apply(power)).collect()
    }
}

/// Orthonormal DCT-II of `x`, coefficients `first..first + count`.
pub fn dct2(x: &[f64], first: usize, count: usize) -> Vec<f64> {
    let n = x.len() as f64;
    (first..first + count)
        .map(|k| {
            let norm = if k == 0 { (1.0 / n).sqrt() } else { (2.0 / n).sqrt() };
            norm * x
                .iter()
                .enumerate()
                .map(|(i, v)| v * (std::f64::consts::PI * k as f64 * (i as f64 + 0.5) / n).cos())
                .sum::<f64>()
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid() -> Vec<f64> {
        (0..=512).map(|k| k as f64 * 11_025.0 / 1024.0).collect()
    }

    #[test]
    fn scale_roundtrips() {
        for f in [0.0, 100.0, 1000.0, 4000.0] {
            assert!((mel_to_hz(hz_to_mel(f)) - f).abs() < 1e-9);
            assert!((bark_to_hz(hz_to_bark(f)) - f).abs() < 1e-9);
        }
    }

    #[test]
    fn mel_partition_of_unity() {
        let freqs = grid();
        let fb = FilterBank::mel(30, 0.0, 4000.0, &freqs).unwrap();
        assert_eq!(fb.len(), 30);
        let mut sums = vec![0.0; freqs.len()];
        for f in &fb.filters {
            assert!(f.weights.iter().all(|&w| w >= 0.0));
            for (k, w) in f.bins().zip(&f.weights) {
                sums[k] += w;
            }
        }
        for (k, &f) in freqs.iter().enumerate() {
            if f > 0.0 && f < 4000.0 {
                assert!(sums[k] > 0.0 && sums[k] <= 2.0, "bin {k}: {}", sums[k]);
            }
        }
    }

    #[test]
    fn log_bands_cover_range() {
        let freqs = grid();
        let fb = FilterBank::log_bands(13, 62.5, 4000.0, &freqs).unwrap();
        assert_eq!(fb.len(), 13);
        for w in fb.filters.windows(2) {
            assert_eq!(w[0].bins().end, w[1].bins().start);
        }
    }

    #[test]
    fn bark_filters_have_support() {
        let freqs = grid();
        let fb = FilterBank::bark(30, 3.0, 0.0, 4000.0, &freqs).unwrap();
        assert_eq!(fb.len(), 30);
        assert!(fb.filters.iter().all(|f| !f.weights.is_empty()));
    }

    #[test]
    fn too_fine_bank_is_rejected() {
        let coarse: Vec<f64> = (0..8).map(|k| k as f64 * 700.0).collect();
        assert!(FilterBank::mel(30, 0.0, 4000.0, &coarse).is_err());
    }

    #[test]
    fn dct_of_constant() {
        let c = dct2(&[2.0; 8], 0, 3);
        assert!((c[0] - 2.0 * 8f64.sqrt()).abs() < 1e-12);
        assert!(c[1].abs() < 1e-12 && c[2].abs() < 1e-12);
    }
}
