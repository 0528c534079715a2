//! Direct-formula reference implementations shared by integration tests.
#![allow(dead_code)]

use std::f64::consts::PI;
use std::ops::Range;

use cough_core::classifier::SvmModel;
use cough_core::Matrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal, StandardNormal};

pub const BAND_EDGES: [f64; 6] = [0.0, 500.0, 1000.0, 1500.0, 2000.0, 5512.5];

/// `|a - b|` within `rel` of the larger magnitude, or within `abs` near zero.
pub fn close(a: f64, b: f64, rel: f64, abs: f64) -> bool {
    (a - b).abs() <= rel * a.abs().max(b.abs()) || (a - b).abs() <= abs
}

/// A synthetic spectrum: every band holds `min_bins..=max_bins` bins spread
/// evenly inside its edges, with log-normal PSD values and some exact zeros.
pub struct SyntheticSpectrum {
    pub psd: Vec<f64>,
    pub freqs: Vec<f64>,
    pub bands: Vec<Range<usize>>,
}

pub fn random_band_psd(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    let scale = 10f64.powf(rng.random_range(-6.0..2.0));
    (0..n)
        .map(|_| {
            if rng.random_bool(0.08) {
                0.0
            } else {
                let z: f64 = rng.random_range(-3.0..3.0);
                scale * z.exp()
            }
        })
        .collect()
}

pub fn random_spectrum(rng: &mut ChaCha8Rng, min_bins: usize, max_bins: usize) -> SyntheticSpectrum {
    let mut psd = Vec::new();
    let mut freqs = Vec::new();
    let mut bands = Vec::new();
    for j in 0..5 {
        let n = rng.random_range(min_bins..=max_bins);
        let (lo, hi) = (BAND_EDGES[j], BAND_EDGES[j + 1]);
        let start = psd.len();
        // Last band includes its upper edge, others stop short of it.
        let step = if j == 4 {
            (hi - lo) / (n - 1) as f64
        } else {
            (hi - lo) / n as f64
        };
        for i in 0..n {
            freqs.push(lo + step * i as f64);
        }
        let mut band = random_band_psd(rng, n);
        if band.iter().all(|&p| p == 0.0) {
            band[0] = 1.0;
        }
        psd.extend(band);
        bands.push(start..psd.len());
    }
    SyntheticSpectrum { psd, freqs, bands }
}

pub fn oracle_centroid(p: &[f64], f: &[f64]) -> f64 {
    let mut num = 0.0;
    let mut den = 0.0;
    for k in 0..p.len() {
        num += f[k] * p[k];
        den += p[k];
    }
    num / den
}

/// Second moment about the origin minus the squared mean.
pub fn oracle_bandwidth(p: &[f64], f: &[f64]) -> f64 {
    let total: f64 = p.iter().sum();
    let c = oracle_centroid(p, f);
    let m2: f64 = (0..p.len()).map(|k| p[k] / total * f[k] * f[k]).sum();
    m2 - c * c
}

pub fn oracle_crest(p: &[f64]) -> f64 {
    let mean = p.iter().sum::<f64>() / p.len() as f64;
    p.iter().cloned().fold(0.0, f64::max) / mean
}

pub fn oracle_flatness(p: &[f64]) -> f64 {
    let n = p.len() as f64;
    let log2_gm = p.iter().map(|&v| v.max(1e-12).log2()).sum::<f64>() / n;
    log2_gm.exp2() / (p.iter().sum::<f64>() / n)
}

pub fn oracle_flux(cur: &[f64], prev: &[f64]) -> f64 {
    let mut s = 0.0;
    for k in 0..cur.len() {
        let d = cur[k] - prev[k];
        s += d * d;
    }
    s
}

fn first_reaching(p: &[f64], fraction: f64) -> usize {
    let total: f64 = p.iter().sum();
    let mut prefix = vec![0.0; p.len()];
    let mut acc = 0.0;
    for k in 0..p.len() {
        acc += p[k];
        prefix[k] = acc;
    }
    prefix
        .iter()
        .position(|&c| c >= fraction * total)
        .unwrap_or(p.len() - 1)
}

pub fn oracle_rolloff(p: &[f64], f: &[f64]) -> f64 {
    f[first_reaching(p, 0.85)]
}

pub fn oracle_f50f90(p: &[f64], f: &[f64]) -> f64 {
    let f90 = f[first_reaching(p, 0.9)];
    if f90 == 0.0 {
        0.0
    } else {
        f[first_reaching(p, 0.5)] / f90
    }
}

/// Base-10 entropy over strict interior peaks, assuming no plateaus.
pub fn oracle_peak_entropy(p: &[f64]) -> f64 {
    let peaks: Vec<f64> = (1..p.len().saturating_sub(1))
        .filter(|&k| p[k - 1] < p[k] && p[k] > p[k + 1])
        .map(|k| p[k])
        .collect();
    let mass: f64 = peaks.iter().sum();
    if peaks.is_empty() {
        return 0.0;
    }
    -peaks.iter().map(|v| v / mass).map(|q| q * q.ln()).sum::<f64>() / 10f64.ln()
}

pub fn oracle_renyi4(p: &[f64]) -> f64 {
    let total: f64 = p.iter().sum();
    let s: f64 = p
        .iter()
        .map(|v| {
            let q = v / total;
            q * q * q * q
        })
        .sum();
    -s.ln() / 3.0
}

/// Skewness and kurtosis from raw central moments.
pub fn oracle_moments(p: &[f64]) -> (f64, f64) {
    let n = p.len() as f64;
    let mean = p.iter().sum::<f64>() / n;
    let m = |e: i32| p.iter().map(|v| (v - mean).powi(e)).sum::<f64>() / n;
    let (m2, m3, m4) = (m(2), m(3), m(4));
    (m3 / m2.powf(1.5), m4 / (m2 * m2))
}

pub fn oracle_spectral_entropy(rp: &[f64]) -> f64 {
    rp.iter().filter(|&&r| r > 0.0).map(|&r| -r * r.ln()).sum::<f64>() / 2f64.ln()
}

/// The 61 band values in column order (descriptor-major, then spectral entropy).
pub fn oracle_band_vector(s: &SyntheticSpectrum, prev: &[f64]) -> Vec<f64> {
    let total: f64 = s.psd.iter().sum();
    let mut per_band = Vec::new();
    let mut rp = Vec::new();
    for r in &s.bands {
        let p = &s.psd[r.clone()];
        let f = &s.freqs[r.clone()];
        let share = p.iter().sum::<f64>() / total;
        rp.push(share);
        let (skew, kurt) = oracle_moments(p);
        per_band.push([
            oracle_centroid(p, f),
            oracle_bandwidth(p, f),
            oracle_crest(p),
            oracle_flatness(p),
            oracle_flux(p, &prev[r.clone()]),
            oracle_rolloff(p, f),
            oracle_f50f90(p, f),
            oracle_peak_entropy(p),
            oracle_renyi4(p),
            kurt,
            skew,
            share,
        ]);
    }
    let mut out = vec![0.0; 61];
    for (j, vals) in per_band.iter().enumerate() {
        for (d, v) in vals.iter().enumerate() {
            out[d * 5 + j] = *v;
        }
    }
    out[60] = oracle_spectral_entropy(&rp);
    out
}

pub fn hamming(n: usize) -> Vec<f64> {
    (0..n)
        .map(|i| 0.54 - 0.46 * (2.0 * PI * i as f64 / (n - 1) as f64).cos())
        .collect()
}

/// One-sided `|X[k]|^2` of the Hamming-windowed frame zero-padded to `nfft`,
/// by direct summation.
pub fn direct_power_spectrum(frame: &[f64], nfft: usize) -> Vec<f64> {
    let w = hamming(frame.len());
    (0..=nfft / 2)
        .map(|k| {
            let (mut re, mut im) = (0.0, 0.0);
            for (i, x) in frame.iter().enumerate() {
                let a = -2.0 * PI * (k * i % nfft) as f64 / nfft as f64;
                re += x * w[i] * a.cos();
                im += x * w[i] * a.sin();
            }
            re * re + im * im
        })
        .collect()
}

pub fn orthonormal_dct(x: &[f64], k: usize) -> f64 {
    let n = x.len() as f64;
    let scale = if k == 0 { 1.0 / n } else { 2.0 / n };
    scale.sqrt()
        * x.iter()
            .enumerate()
            .map(|(i, v)| v * (PI * k as f64 * (2 * i + 1) as f64 / (2.0 * n)).cos())
            .sum::<f64>()
}

fn mel(hz: f64) -> f64 {
    1127.0 * (1.0 + hz / 700.0).ln()
}

fn inv_mel(m: f64) -> f64 {
    700.0 * ((m / 1127.0).exp() - 1.0)
}

/// Root-compressed 30-filter HTK mel energies over [0, 4000] Hz, DCT-II coefficients 2..=14.
pub fn oracle_root_mfcc(power: &[f64], fs: f64, nfft: usize) -> Vec<f64> {
    let n_filters = 30;
    let (mlo, mhi) = (mel(0.0), mel(4000.0));
    let pts: Vec<f64> = (0..n_filters + 2)
        .map(|i| inv_mel(mlo + (mhi - mlo) * i as f64 / (n_filters + 1) as f64))
        .collect();
    let energies: Vec<f64> = (0..n_filters)
        .map(|m| {
            let (l, c, r) = (pts[m], pts[m + 1], pts[m + 2]);
            let mut e = 0.0;
            for (k, p) in power.iter().enumerate() {
                let f = k as f64 * fs / nfft as f64;
                let w = if f > l && f <= c {
                    (f - l) / (c - l)
                } else if f > c && f < r {
                    (r - f) / (r - c)
                } else {
                    0.0
                };
                e += w * p;
            }
            e.sqrt()
        })
        .collect();
    (1..14).map(|k| orthonormal_dct(&energies, k)).collect()
}

fn bark(hz: f64) -> f64 {
    26.81 * hz / (1960.0 + hz) - 0.53
}

/// Subband spectral centroid histogram over 30 triangular 3-Bark filters on
/// [0, 4000] Hz into 38 equal Bark bins, DCT-II coefficients 2..=14.
pub fn oracle_ssch(power: &[f64], fs: f64, nfft: usize) -> (Vec<f64>, Vec<f64>) {
    let (zlo, zhi) = (bark(0.0), bark(4000.0));
    let (n_filters, half, n_bins) = (30usize, 1.5, 38usize);
    let mut hist = vec![0.0; n_bins];
    for m in 0..n_filters {
        let zc = zlo + half + (zhi - zlo - 2.0 * half) * m as f64 / (n_filters - 1) as f64;
        let (mut num, mut den) = (0.0, 0.0);
        for (k, p) in power.iter().enumerate() {
            let f = k as f64 * fs / nfft as f64;
            if f > 4000.0 {
                break;
            }
            let w = 1.0 - (bark(f) - zc).abs() / half;
            if w > 0.0 {
                num += w * p * f;
                den += w * p;
            }
        }
        if den > 1e-15 {
            let pos = (bark(num / den) - zlo) / (zhi - zlo) * n_bins as f64;
            hist[(pos.floor().max(0.0) as usize).min(n_bins - 1)] += 1.0;
        }
    }
    let coeffs = (1..14).map(|k| orthonormal_dct(&hist, k)).collect();
    (hist, coeffs)
}

pub fn tone(freq: f64, amp: f64, n: usize, fs: f64) -> Vec<f64> {
    (0..n).map(|i| amp * (2.0 * PI * freq * i as f64 / fs).sin()).collect()
}

pub fn white_noise(rng: &mut ChaCha8Rng, n: usize, amp: f64) -> Vec<f64> {
    (0..n).map(|_| rng.random_range(-amp..amp)).collect()
}

pub fn blobs(n: usize, sep: f64, seed: u64) -> (Matrix, Vec<bool>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let noise = Normal::new(0.0, 0.5).unwrap();
    let mut rows = Vec::new();
    let mut y = Vec::new();
    for i in 0..n {
        let pos = i % 2 == 0;
        let c = if pos { sep } else { -sep };
        rows.push(vec![c + noise.sample(&mut rng), c + noise.sample(&mut rng)]);
        y.push(pos);
    }
    (Matrix::from_rows(&rows).unwrap(), y)
}

/// Independent KKT check on the training set.
pub fn kkt_residual(m: &SvmModel, x: &Matrix, y: &[bool]) -> f64 {
    let f = m.decision_batch(x).unwrap();
    let mut alpha = vec![0.0; y.len()];
    for (k, &i) in m.sv_indices.iter().enumerate() {
        alpha[i] = m.dual_coef[k].abs();
    }
    let mut worst: f64 = 0.0;
    for i in 0..y.len() {
        let yf = if y[i] { f[i] } else { -f[i] };
        let c = m.bound(y[i]);
        let v = if alpha[i] <= 0.0 {
            (1.0 - yf).max(0.0)
        } else if alpha[i] >= c {
            (yf - 1.0).max(0.0)
        } else {
            (yf - 1.0).abs()
        };
        worst = worst.max(v);
    }
    worst
}

/// Cyclic Jacobi eigenvalues of a symmetric matrix.
pub fn jacobi_eigenvalues(mut a: Vec<Vec<f64>>) -> Vec<f64> {
    let n = a.len();
    for _ in 0..100 {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| a[i][j].powi(2))
            .sum();
        if off < 1e-22 {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                if a[p][q].abs() < 1e-300 {
                    continue;
                }
                let theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let (akp, akq) = (a[k][p], a[k][q]);
                    a[k][p] = c * akp - s * akq;
                    a[k][q] = s * akp + c * akq;
                }
                for k in 0..n {
                    let (apk, aqk) = (a[p][k], a[q][k]);
                    a[p][k] = c * apk - s * aqk;
                    a[q][k] = s * apk + c * aqk;
                }
            }
        }
    }
    (0..n).map(|i| a[i][i]).collect()
}

/// Probability that a random positive outranks a random negative, ties counting half.
pub fn pair_auc(scores: &[f64], labels: &[bool]) -> f64 {
    let (mut num, mut den) = (0.0, 0.0);
    for i in 0..scores.len() {
        for j in 0..scores.len() {
            if labels[i] && !labels[j] {
                den += 1.0;
                if scores[i] > scores[j] {
                    num += 1.0;
                } else if scores[i] == scores[j] {
                    num += 0.5;
                }
            }
        }
    }
    num / den
}

pub fn embed(points: &[Vec<f64>], ambient: usize, rng: &mut ChaCha8Rng) -> Matrix {
    // random orthonormal-ish embedding: random Gaussian projection
    let d = points[0].len();
    let proj: Vec<Vec<f64>> = (0..d)
        .map(|_| (0..ambient).map(|_| StandardNormal.sample(rng)).collect())
        .collect();
    let rows: Vec<Vec<f64>> = points
        .iter()
        .map(|p| (0..ambient).map(|a| (0..d).map(|k| p[k] * proj[k][a]).sum()).collect())
        .collect();
    Matrix::from_rows(&rows).unwrap()
}

pub fn relief_data(seed: u64) -> (Matrix, Vec<bool>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let labels: Vec<bool> = (0..500).map(|i| i % 2 == 0).collect();
    let rows: Vec<Vec<f64>> = labels
        .iter()
        .map(|&y| {
            let mut r: Vec<f64> = (0..10).map(|_| rng.random_range(0.0..1.0)).collect();
            r[4] = if y {
                1.0 + rng.random_range(0.0..0.5)
            } else {
                rng.random_range(-0.5..0.0)
            };
            r
        })
        .collect();
    (Matrix::from_rows(&rows).unwrap(), labels)
}
