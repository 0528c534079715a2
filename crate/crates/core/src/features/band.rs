//! Band-specific spectral descriptors computed on the Welch PSD.
//!
//! Every descriptor takes the PSD values of one band and, where needed, the
//! matching bin frequencies. A band whose total power is at most
//! [`SILENCE_THRESHOLD`] is degenerate: every descriptor of that band is 0.

use crate::dsp::{BandSpectrum, N_BANDS};
use crate::error::{Error, Result};

/// Band power at or below this value marks the band as silent.
pub const SILENCE_THRESHOLD: f64 = 1e-15;
/// Floor applied to PSD values before taking logarithms.
pub const FLATNESS_FLOOR: f64 = 1e-12;
/// Relative standard deviation below which moments are undefined.
pub const MOMENT_TOLERANCE: f64 = 1e-12;
/// Order of the Rényi entropy.
pub const RENYI_ORDER: f64 = 4.0;
pub const ROLLOFF_FRACTION: f64 = 0.85;

/// Relative slack on cumulative-energy thresholds, so that sums landing on
/// the threshold up to rounding count as reaching it.
const CUMULATIVE_SLACK: f64 = 1e-12;

/// Descriptor names in column order.
pub const DESCRIPTORS: [&str; 12] = [
    "centroid",
    "bandwidth",
    "crest",
    "flatness",
    "flux",
    "rolloff",
    "f50f90",
    "peak_entropy",
    "renyi",
    "kurtosis",
    "skewness",
    "rel_power",
];

pub const SPECTRAL_ENTROPY_NAME: &str = "spec_entropy";
/// 12 descriptors x 5 bands + spectral entropy.
pub const BAND_FEATURE_DIM: usize = DESCRIPTORS.len() * N_BANDS + 1;

fn total(psd: &[f64]) -> f64 {
    psd.iter().sum()
}

fn is_silent(psd: &[f64]) -> bool {
    !(total(psd) > SILENCE_THRESHOLD)
}

/// Power-weighted mean frequency.
pub fn spectral_centroid(psd: &[f64], freqs: &[f64]) -> f64 {
    let sum = total(psd);
    if !(sum > SILENCE_THRESHOLD) {
        return 0.0;
    }
    psd.iter().zip(freqs).map(|(p, f)| p * f).sum::<f64>() / sum
}

/// Power-weighted variance of frequency around `centroid` (Hz²).
pub fn spectral_bandwidth(psd: &[f64], freqs: &[f64], centroid: f64) -> f64 {
    let sum = total(psd);
    if !(sum > SILENCE_THRESHOLD) {
        return 0.0;
    }
    psd.iter()
        .zip(freqs)
        .map(|(p, f)| (f - centroid).powi(2) * p)
        .sum::<f64>()
        / sum
}

/// Peak-to-mean ratio of the band PSD.
///
/// The normaliser counts bins rather than Hz, so a flat band scores 1 and a
/// single-bin band scores the number of bins.
pub fn spectral_crest_factor(psd: &[f64]) -> f64 {
    let sum = total(psd);
    if !(sum > SILENCE_THRESHOLD) {
        return 0.0;
    }
    let max = psd.iter().copied().fold(f64::MIN, f64::max);
    max * psd.len() as f64 / sum
}

/// Geometric over arithmetic mean, with values floored at [`FLATNESS_FLOOR`].
pub fn spectral_flatness(psd: &[f64]) -> f64 {
    let sum = total(psd);
    if !(sum > SILENCE_THRESHOLD) {
        return 0.0;
    }
    let n = psd.len() as f64;
    let mean_log = psd.iter().map(|&p| p.max(FLATNESS_FLOOR).ln()).sum::<f64>() / n;
    (mean_log.exp() / (sum / n)).min(1.0)
}

/// Squared difference between consecutive band spectra.
pub fn spectral_flux(current: &[f64], previous: &[f64]) -> Result<f64> {
    if current.len() != previous.len() {
        return Err(Error::DimensionMismatch {
            context: "spectral flux bins",
            expected: previous.len(),
            actual: current.len(),
        });
    }
    Ok(current.iter().zip(previous).map(|(c, p)| (c - p).powi(2)).sum())
}

/// First bin at which the cumulative PSD reaches `fraction` of the total.
pub fn cumulative_bin(psd: &[f64], fraction: f64) -> usize {
    let sum = total(psd);
    let target = fraction * sum - CUMULATIVE_SLACK * sum;
    let mut cum = 0.0;
    for (k, &p) in psd.iter().enumerate() {
        cum += p;
        if cum >= target {
            return k;
        }
    }
    psd.len() - 1
}

/// Frequency below which 85% of the band energy lies.
pub fn spectral_rolloff(psd: &[f64], freqs: &[f64]) -> f64 {
    if is_silent(psd) {
        return 0.0;
    }
    freqs[cumulative_bin(psd, ROLLOFF_FRACTION)]
}

/// Ratio of the 50% and 90% cumulative-energy frequencies.
pub fn f50_f90_ratio(psd: &[f64], freqs: &[f64]) -> f64 {
    if is_silent(psd) {
        return 0.0;
    }
    let f90 = freqs[cumulative_bin(psd, 0.9)];
    if f90 <= 0.0 {
        return 0.0;
    }
    freqs[cumulative_bin(psd, 0.5)] / f90
}

/// Indices of strict interior local maxima. A plateau counts once, at its
/// first bin, when both sides descend.
pub fn local_maxima(psd: &[f64]) -> Vec<usize> {
    let n = psd.len();
    let mut peaks = Vec::new();
    let mut k = 1;
    while k + 1 < n {
        if psd[k] > psd[k - 1] {
            let mut j = k + 1;
            while j < n && psd[j] == psd[k] {
                j += 1;
            }
            if j < n && psd[j] < psd[k] {
                peaks.push(k);
            }
            k = j;
        } else {
            k += 1;
        }
    }
    peaks
}

/// Shannon entropy (base 10) of the normalised local-maximum masses.
pub fn spectral_peak_entropy(psd: &[f64]) -> f64 {
    if is_silent(psd) {
        return 0.0;
    }
    let peaks = local_maxima(psd);
    let mass: f64 = peaks.iter().map(|&k| psd[k]).sum();
    if peaks.is_empty() || !(mass > 0.0) {
        return 0.0;
    }
    -peaks
        .iter()
        .map(|&k| psd[k] / mass)
        .filter(|&p| p > 0.0)
        .map(|p| p * p.log10())
        .sum::<f64>()
}

/// Rényi entropy of order `q` of the normalised band PSD (natural log).
pub fn spectral_renyi_entropy(psd: &[f64], q: f64) -> f64 {
    let sum = total(psd);
    if !(sum > SILENCE_THRESHOLD) {
        return 0.0;
    }
    let s: f64 = psd.iter().map(|p| (p / sum).powf(q)).sum();
    s.ln() / (1.0 - q)
}

/// Mean, population standard deviation, and standardised third and fourth
/// moments of the PSD values, or `None` when the values are (near) constant.
fn standardized_moments(psd: &[f64]) -> Option<(f64, f64)> {
    let n = psd.len() as f64;
    let mean = total(psd) / n;
    let var = psd.iter().map(|p| (p - mean).powi(2)).sum::<f64>() / n;
    let sd = var.sqrt();
    if !(sd > MOMENT_TOLERANCE * mean.abs()) || sd == 0.0 {
        return None;
    }
    let (m3, m4) = psd.iter().fold((0.0, 0.0), |(a, b), p| {
        let z = (p - mean) / sd;
        (a + z.powi(3), b + z.powi(4))
    });
    Some((m3 / n, m4 / n))
}

/// Standardised fourth moment of the PSD values.
pub fn spectral_kurtosis(psd: &[f64]) -> f64 {
    if is_silent(psd) {
        return 0.0;
    }
    standardized_moments(psd).map_or(0.0, |(_, k)| k)
}

/// Standardised third moment of the PSD values.
pub fn spectral_skewness(psd: &[f64]) -> f64 {
    if is_silent(psd) {
        return 0.0;
    }
    standardized_moments(psd).map_or(0.0, |(s, _)| s)
}

/// Share of the frame power falling in each band.
pub fn relative_power(spectrum: &BandSpectrum) -> [f64; N_BANDS] {
    let full = spectrum.total_power();
    let mut rp = [0.0; N_BANDS];
    if !(full > SILENCE_THRESHOLD) {
        return rp;
    }
    for (j, r) in rp.iter_mut().enumerate() {
        *r = total(spectrum.band(j).0) / full;
    }
    rp
}

/// Base-2 entropy of the relative band powers; zero shares are skipped.
pub fn spectral_entropy(rp: &[f64]) -> f64 {
    -rp.iter().filter(|&&r| r > 0.0).map(|&r| r * r.log2()).sum::<f64>()
}

/// The twelve descriptors of one band.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct BandDescriptors {
    pub centroid: f64,
    pub bandwidth: f64,
    pub crest_factor: f64,
    pub flatness: f64,
    pub flux: f64,
    pub rolloff: f64,
    pub f50f90_ratio: f64,
    pub peak_entropy: f64,
    pub renyi_entropy: f64,
    pub kurtosis: f64,
    pub skewness: f64,
    pub relative_power: f64,
}

impl BandDescriptors {
    /// Descriptors of one band; `previous` is the same band of the prior frame.
    pub fn compute(psd: &[f64], freqs: &[f64], previous: Option<&[f64]>, relative_power: f64) -> Result<Self> {
        if is_silent(psd) {
            return Ok(Self::default());
        }
        let flux = match previous {
            Some(prev) => spectral_flux(psd, prev)?,
            None => psd.iter().map(|p| p * p).sum(),
        };
        let centroid = spectral_centroid(psd, freqs);
        let (skewness, kurtosis) = standardized_moments(psd).unwrap_or((0.0, 0.0));
        Ok(Self {
            centroid,
            bandwidth: spectral_bandwidth(psd, freqs, centroid),
            crest_factor: spectral_crest_factor(psd),
            flatness: spectral_flatness(psd),
            flux,
            rolloff: spectral_rolloff(psd, freqs),
            f50f90_ratio: f50_f90_ratio(psd, freqs),
            peak_entropy: spectral_peak_entropy(psd),
            renyi_entropy: spectral_renyi_entropy(psd, RENYI_ORDER),
            kurtosis,
            skewness,
            relative_power,
        })
    }

    /// Values in [`DESCRIPTORS`] order.
    pub fn values(&self) -> [f64; 12] {
        [
            self.centroid,
            self.bandwidth,
            self.crest_factor,
            self.flatness,
            self.flux,
            self.rolloff,
            self.f50f90_ratio,
            self.peak_entropy,
            self.renyi_entropy,
            self.kurtosis,
            self.skewness,
            self.relative_power,
        ]
    }
}

/// All band descriptors of one frame.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct BandFeatureVector {
    pub bands: [BandDescriptors; N_BANDS],
    pub spectral_entropy: f64,
    /// At least one band was silent and got sentinel values.
    pub degenerate: bool,
}

impl BandFeatureVector {
    /// Computes the descriptors of `current`; `previous` is the prior frame's
    /// spectrum, or `None` at the start of a recording.
    pub fn compute(current: &BandSpectrum, previous: Option<&BandSpectrum>) -> Result<Self> {
        if let Some(prev) = previous {
            if prev.psd.len() != current.psd.len() {
                return Err(Error::DimensionMismatch {
                    context: "spectral flux bins",
                    expected: prev.psd.len(),
                    actual: current.psd.len(),
                });
            }
        }
        let rp = relative_power(current);
        let mut out = Self {
            spectral_entropy: spectral_entropy(&rp),
            ..Self::default()
        };
        for j in 0..N_BANDS {
            let (psd, freqs) = current.band(j);
            out.degenerate |= is_silent(psd);
            out.bands[j] = BandDescriptors::compute(psd, freqs, previous.map(|p| p.band(j).0), rp[j])?;
        }
        Ok(out)
    }

    /// Writes the 61 values in column order into `out`.
    pub fn write_into(&self, out: &mut [f64]) {
        debug_assert_eq!(out.len(), BAND_FEATURE_DIM);
        for (j, band) in self.bands.iter().enumerate() {
            for (d, v) in band.values().into_iter().enumerate() {
                out[d * N_BANDS + j] = v;
            }
        }
        out[BAND_FEATURE_DIM - 1] = self.spectral_entropy;
    }

    pub fn to_vec(&self) -> Vec<f64> {
        let mut v = vec![0.0; BAND_FEATURE_DIM];
        self.write_into(&mut v);
        v
    }
}

/// Column names, descriptor-major: `centroid_b1..centroid_b5`, `bandwidth_b1`, ...,
/// then `spec_entropy`.
pub fn band_feature_names() -> Vec<String> {
    let mut names: Vec<String> = DESCRIPTORS
        .iter()
        .flat_map(|d| (1..=N_BANDS).map(move |j| format!("{d}_b{j}")))
        .collect();
    names.push(SPECTRAL_ENTROPY_NAME.to_string());
    names
}
