//! Complementary short-term descriptors: harmonic ratio, root MFCC,
//! audio spectrum flatness, normalised audio spectrum envelope, tonal index,
//! chromatic entropy and subband spectral centroid histograms.
//!
//! All but the harmonic ratio work on the power spectrum of the whole
//! Hamming-windowed frame (one FFT, zero-padded to `nfft`).

use std::sync::Arc;

use rustfft::num_complex::Complex;
use rustfft::{Fft, FftPlanner};
use serde::{Deserialize, Serialize};

use super::band::{FLATNESS_FLOOR, SILENCE_THRESHOLD};
use super::filterbank::{dct2, hz_to_bark, FilterBank};
use crate::dsp::{hamming, SAMPLE_RATE};
use crate::error::{Error, Result};

/// 1 + 13 + 13 + 14 + 1 + 1 + 13.
pub const AUX_FEATURE_DIM: usize = 56;

/// Constants of the auxiliary descriptors.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct AuxConfig {
    pub nfft: usize,
    pub hr_min_lag_ms: f64,
    pub hr_max_lag_ms: f64,
    pub mfcc_filters: usize,
    pub mfcc_range_hz: (f64, f64),
    pub mfcc_root: f64,
    /// First retained DCT coefficient (0-based) and count: 2nd to 14th.
    pub dct_first: usize,
    pub dct_count: usize,
    pub mpeg7_range_hz: (f64, f64),
    pub mpeg7_bands: usize,
    pub chroma_tuning_hz: f64,
    pub chroma_range_hz: (f64, f64),
    pub tonal_range_hz: (f64, f64),
    pub ssch_filters: usize,
    pub ssch_width_bark: f64,
    pub ssch_range_hz: (f64, f64),
    pub ssch_bins: usize,
}

impl Default for AuxConfig {
    fn default() -> Self {
        Self {
            nfft: 1024,
            hr_min_lag_ms: 2.5,
            hr_max_lag_ms: 20.0,
            mfcc_filters: 30,
            mfcc_range_hz: (0.0, 4000.0),
            mfcc_root: 0.5,
            dct_first: 1,
            dct_count: 13,
            mpeg7_range_hz: (62.5, 4000.0),
            mpeg7_bands: 13,
            chroma_tuning_hz: 440.0,
            chroma_range_hz: (62.5, 4000.0),
            tonal_range_hz: (62.5, 4000.0),
            ssch_filters: 30,
            ssch_width_bark: 3.0,
            ssch_range_hz: (0.0, 4000.0),
            ssch_bins: 38,
        }
    }
}

/// One-sided power spectrum `|X[k]|^2` of a windowed frame.
#[derive(Debug, Clone, PartialEq)]
pub struct FrameSpectrum {
    pub power: Vec<f64>,
    pub freqs: Arc<[f64]>,
}

/// The seven auxiliary descriptors of one frame.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct AuxFeatureVector {
    pub harmonic_ratio: f64,
    pub root_mfcc: Vec<f64>,
    pub asf: Vec<f64>,
    /// 13 normalised envelope values followed by the envelope norm.
    pub nase: Vec<f64>,
    pub tonal_index: f64,
    pub chroma_entropy: f64,
    pub ssch: Vec<f64>,
}

impl AuxFeatureVector {
    pub fn dim(&self) -> usize {
        3 + self.root_mfcc.len() + self.asf.len() + self.nase.len() + self.ssch.len()
    }

    pub fn write_into(&self, out: &mut [f64]) {
        debug_assert_eq!(out.len(), self.dim());
        let mut i = 0;
        let mut push = |v: f64| {
            out[i] = v;
            i += 1;
        };
        push(self.harmonic_ratio);
        self.root_mfcc.iter().for_each(|&v| push(v));
        self.asf.iter().for_each(|&v| push(v));
        self.nase.iter().for_each(|&v| push(v));
        push(self.tonal_index);
        push(self.chroma_entropy);
        self.ssch.iter().for_each(|&v| push(v));
    }

    pub fn to_vec(&self) -> Vec<f64> {
        let mut v = vec![0.0; self.dim()];
        self.write_into(&mut v);
        v
    }
}

/// Column names: `hr`, `rmfcc_1..13`, `asf_1..13`, `nase_1..14`, `ti`, `chroen`, `ssch_1..13`.
pub fn aux_feature_names() -> Vec<String> {
    let mut names = vec!["hr".to_string()];
    names.extend((1..=13).map(|i| format!("rmfcc_{i}")));
    names.extend((1..=13).map(|i| format!("asf_{i}")));
    names.extend((1..=14).map(|i| format!("nase_{i}")));
    names.push("ti".into());
    names.push("chroen".into());
    names.extend((1..=13).map(|i| format!("ssch_{i}")));
    names
}

/// Maximum normalised autocorrelation over lags `min_lag..=max_lag`,
/// clamped to `[0, 1]`.
pub fn harmonic_ratio(frame: &[f64], min_lag: usize, max_lag: usize) -> f64 {
    let n = frame.len();
    if n < 2 || min_lag >= n {
        return 0.0;
    }
    // prefix[i] = sum of x[..i]^2
    let mut prefix = Vec::with_capacity(n + 1);
    prefix.push(0.0);
    for &x in frame {
        prefix.push(prefix.last().unwrap() + x * x);
    }
    if !(prefix[n] > 0.0) {
        return 0.0;
    }
    let mut best: f64 = 0.0;
    for lag in min_lag..=max_lag.min(n - 1) {
        let head = prefix[n - lag];
        let tail = prefix[n] - prefix[lag];
        let denom = (head * tail).sqrt();
        if !(denom > 0.0) {
            continue;
        }
        let cross: f64 = frame[..n - lag].iter().zip(&frame[lag..]).map(|(a, b)| a * b).sum();
        best = best.max(cross / denom);
    }
    best.clamp(0.0, 1.0)
}

/// Geometric over arithmetic mean of `power` restricted to each filter's
/// support (rectangular bands).
fn band_flatness(bank: &FilterBank, power: &[f64]) -> Vec<f64> {
    bank.filters
        .iter()
        .map(|f| {
            let vals = &power[f.bins()];
            let sum: f64 = vals.iter().sum();
            if !(sum > SILENCE_THRESHOLD) {
                return 0.0;
            }
            let n = vals.len() as f64;
            let gm = (vals.iter().map(|&p| p.max(FLATNESS_FLOOR).ln()).sum::<f64>() / n).exp();
            (gm / (sum / n)).min(1.0)
        })
        .collect()
}

/// Band powers normalised to unit Euclidean norm, followed by the norm.
pub fn normalized_envelope(band_power: &[f64]) -> Vec<f64> {
    let norm = band_power.iter().map(|p| p * p).sum::<f64>().sqrt();
    let mut out: Vec<f64> = if norm > SILENCE_THRESHOLD {
        band_power.iter().map(|p| p / norm).collect()
    } else {
        vec![0.0; band_power.len()]
    };
    out.push(if norm > SILENCE_THRESHOLD { norm } else { 0.0 });
    out
}

/// Peak-to-median power ratio in dB over the given bins.
pub fn tonal_index(power: &[f64]) -> f64 {
    if power.is_empty() {
        return 0.0;
    }
    let peak = power.iter().copied().fold(0.0, f64::max);
    if !(peak > SILENCE_THRESHOLD) {
        return 0.0;
    }
    let mut sorted = power.to_vec();
    sorted.sort_by(f64::total_cmp);
    let mid = sorted.len() / 2;
    let median = if sorted.len().is_multiple_of(2) {
        0.5 * (sorted[mid - 1] + sorted[mid])
    } else {
        sorted[mid]
    };
    10.0 * (peak / median.max(peak * 1e-12)).log10()
}

/// Natural-log Shannon entropy of a non-negative distribution.
pub fn shannon_entropy(weights: &[f64]) -> f64 {
    let sum: f64 = weights.iter().sum();
    if !(sum > SILENCE_THRESHOLD) {
        return 0.0;
    }
    -weights
        .iter()
        .filter(|&&w| w > 0.0)
        .map(|w| {
            let p = w / sum;
            p * p.ln()
        })
        .sum::<f64>()
}

/// Precomputed filterbanks and FFT plan for the auxiliary descriptors.
pub struct AuxExtractor {
    config: AuxConfig,
    sample_rate: u32,
    fft: Arc<dyn Fft<f64>>,
    window: Vec<f64>,
    freqs: Arc<[f64]>,
    mel: FilterBank,
    mpeg7: FilterBank,
    bark: FilterBank,
    /// (bin, pitch class) pairs within the chroma range.
    chroma_bins: Vec<(usize, usize)>,
    tonal_bins: std::ops::Range<usize>,
    hr_lags: (usize, usize),
}

impl std::fmt::Debug for AuxExtractor {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("AuxExtractor").field("config", &self.config).finish()
    }
}

impl AuxExtractor {
    pub fn new(config: AuxConfig, frame_len: usize, sample_rate: u32) -> Result<Self> {
        if config.nfft < frame_len {
            return Err(Error::InvalidArgument(format!(
                "aux nfft {} shorter than frame {frame_len}",
                config.nfft
            )));
        }
        let fs = sample_rate as f64;
        let freqs: Arc<[f64]> = (0..=config.nfft / 2)
            .map(|k| k as f64 * fs / config.nfft as f64)
            .collect();
        let mel = FilterBank::mel(
            config.mfcc_filters,
            config.mfcc_range_hz.0,
            config.mfcc_range_hz.1,
            &freqs,
        )?;
        let mpeg7 = FilterBank::log_bands(
            config.mpeg7_bands,
            config.mpeg7_range_hz.0,
            config.mpeg7_range_hz.1,
            &freqs,
        )?;
        let bark = FilterBank::bark(
            config.ssch_filters,
            config.ssch_width_bark,
            config.ssch_range_hz.0,
            config.ssch_range_hz.1,
            &freqs,
        )?;
        let (clo, chi) = config.chroma_range_hz;
        let chroma_bins = freqs
            .iter()
            .enumerate()
            .filter(|(_, &f)| f >= clo && f < chi)
            .map(|(k, &f)| {
                let semis = (12.0 * (f / config.chroma_tuning_hz).log2()).round() as i64;
                (k, semis.rem_euclid(12) as usize)
            })
            .collect();
        let (tlo, thi) = config.tonal_range_hz;
        let tonal_bins = freqs.partition_point(|&f| f < tlo)..freqs.partition_point(|&f| f < thi);
        // Lags stay inside the configured pitch-period range.
        let hr_lags = (
            ((config.hr_min_lag_ms * 1e-3 * fs).ceil() as usize).max(1),
            (config.hr_max_lag_ms * 1e-3 * fs).floor() as usize,
        );
        let fft = FftPlanner::new().plan_fft_forward(config.nfft);
        Ok(Self {
            window: hamming(frame_len),
            config,
            sample_rate,
            fft,
            freqs,
            mel,
            mpeg7,
            bark,
            chroma_bins,
            tonal_bins,
            hr_lags,
        })
    }

    pub fn default_for(frame_len: usize) -> Result<Self> {
        Self::new(AuxConfig::default(), frame_len, SAMPLE_RATE)
    }

    pub fn config(&self) -> &AuxConfig {
        &self.config
    }

    pub fn sample_rate(&self) -> u32 {
        self.sample_rate
    }

    pub fn freqs(&self) -> &Arc<[f64]> {
        &self.freqs
    }

    pub fn mel_bank(&self) -> &FilterBank {
        &self.mel
    }

    pub fn mpeg7_bank(&self) -> &FilterBank {
        &self.mpeg7
    }

    pub fn bark_bank(&self) -> &FilterBank {
        &self.bark
    }

    pub fn hr_lags(&self) -> (usize, usize) {
        self.hr_lags
    }

    pub fn frame_len(&self) -> usize {
        self.window.len()
    }

    /// Power spectrum of the Hamming-windowed frame.
    pub fn spectrum(&self, frame: &[f64]) -> Result<FrameSpectrum> {
        if frame.len() != self.window.len() {
            return Err(Error::DimensionMismatch {
                context: "aux frame length",
                expected: self.window.len(),
                actual: frame.len(),
            });
        }
        let mut buf = vec![Complex::new(0.0, 0.0); self.config.nfft];
        for (b, (x, w)) in buf.iter_mut().zip(frame.iter().zip(&self.window)) {
            *b = Complex::new(x * w, 0.0);
        }
        self.fft.process(&mut buf);
        Ok(FrameSpectrum {
            power: buf[..self.freqs.len()].iter().map(|c| c.norm_sqr()).collect(),
            freqs: self.freqs.clone(),
        })
    }

    pub fn harmonic_ratio(&self, frame: &[f64]) -> f64 {
        harmonic_ratio(frame, self.hr_lags.0, self.hr_lags.1)
    }

    /// Root-compressed mel energies followed by a DCT-II.
    pub fn root_mfcc(&self, spec: &FrameSpectrum) -> Vec<f64> {
        let energies: Vec<f64> = self
            .mel
            .apply(&spec.power)
            .into_iter()
            .map(|e| e.max(0.0).powf(self.config.mfcc_root))
            .collect();
        dct2(&energies, self.config.dct_first, self.config.dct_count)
    }

    pub fn audio_spectrum_flatness(&self, spec: &FrameSpectrum) -> Vec<f64> {
        band_flatness(&self.mpeg7, &spec.power)
    }

    pub fn nase(&self, spec: &FrameSpectrum) -> Vec<f64> {
        normalized_envelope(&self.mpeg7.apply(&spec.power))
    }

    pub fn tonal_index(&self, spec: &FrameSpectrum) -> f64 {
        tonal_index(&spec.power[self.tonal_bins.clone()])
    }

    /// Twelve-bin pitch-class power profile.
    pub fn chroma(&self, spec: &FrameSpectrum) -> [f64; 12] {
        let mut chroma = [0.0; 12];
        for &(k, class) in &self.chroma_bins {
            chroma[class] += spec.power[k];
        }
        chroma
    }

    pub fn chroma_entropy(&self, spec: &FrameSpectrum) -> f64 {
        shannon_entropy(&self.chroma(spec))
    }

    /// Power-weighted centroid frequency (Hz) of each Bark filter; `None`
    /// where the filter sees no power.
    pub fn subband_centroids(&self, spec: &FrameSpectrum) -> Vec<Option<f64>> {
        self.bark
            .filters
            .iter()
            .map(|f| {
                let (mut num, mut den) = (0.0, 0.0);
                for (k, w) in f.bins().zip(&f.weights) {
                    let wp = w * spec.power[k];
                    num += wp * self.freqs[k];
                    den += wp;
                }
                (den > SILENCE_THRESHOLD).then(|| num / den)
            })
            .collect()
    }

    /// Histogram of subband centroids over equal-width Bark bins spanning the
    /// SSCH range.
    pub fn ssch_histogram(&self, spec: &FrameSpectrum) -> Vec<f64> {
        let (lo, hi) = self.config.ssch_range_hz;
        let (zlo, zhi) = (hz_to_bark(lo), hz_to_bark(hi));
        let bins = self.config.ssch_bins;
        let mut hist = vec![0.0; bins];
        for c in self.subband_centroids(spec).into_iter().flatten() {
            let pos = (hz_to_bark(c) - zlo) / (zhi - zlo) * bins as f64;
            let b = (pos.floor().max(0.0) as usize).min(bins - 1);
            hist[b] += 1.0;
        }
        hist
    }

    pub fn ssch(&self, spec: &FrameSpectrum) -> Vec<f64> {
        let hist = self.ssch_histogram(spec);
        if hist.iter().all(|&h| h == 0.0) {
            return vec![0.0; self.config.dct_count];
        }
        dct2(&hist, self.config.dct_first, self.config.dct_count)
    }

    /// All auxiliary descriptors of one frame.
    pub fn compute(&self, frame: &[f64]) -> Result<AuxFeatureVector> {
        let spec = self.spectrum(frame)?;
        Ok(AuxFeatureVector {
            harmonic_ratio: self.harmonic_ratio(frame),
            root_mfcc: self.root_mfcc(&spec),
            asf: self.audio_spectrum_flatness(&spec),
            nase: self.nase(&spec),
            tonal_index: self.tonal_index(&spec),
            chroma_entropy: self.chroma_entropy(&spec),
            ssch: self.ssch(&spec),
        })
    }
}
