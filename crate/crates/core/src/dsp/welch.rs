use std::ops::Range;
use std::sync::Arc;

use rustfft::num_complex::Complex;
use rustfft::{Fft, FftPlanner};
use serde::{Deserialize, Serialize};

use super::{hamming, SAMPLE_RATE};
use crate::error::{Error, Result};

pub const N_BANDS: usize = 5;

/// Welch estimator geometry.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WelchConfig {
    pub subframe_len: usize,
    pub n_subframes: usize,
    pub nfft: usize,
}

impl Default for WelchConfig {
    fn default() -> Self {
        Self {
            subframe_len: 275,
            n_subframes: 3,
            nfft: 512,
        }
    }
}

/// Partition of the PSD bins into the five analysis bands.
#[derive(Debug, Clone, PartialEq)]
pub struct BandLayout {
    edges: [f64; N_BANDS + 1],
    slices: [Range<usize>; N_BANDS],
}

impl BandLayout {
    /// Default band edges in Hz: 0, 0.5, 1, 1.5, 2 kHz and the Nyquist frequency.
    pub const DEFAULT_EDGES: [f64; N_BANDS + 1] = [0.0, 500.0, 1000.0, 1500.0, 2000.0, 5512.5];

    /// Bins are assigned half-open, `[lo, hi)`, except the last band which
    /// also takes the Nyquist bin.
    pub fn new(edges: [f64; N_BANDS + 1], freqs: &[f64]) -> Result<Self> {
        if edges.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidArgument("band edges must increase".into()));
        }
        let mut slices: [Range<usize>; N_BANDS] = Default::default();
        for (j, slice) in slices.iter_mut().enumerate() {
            let lo = freqs.partition_point(|&f| f < edges[j]);
            let hi = if j + 1 == N_BANDS {
                freqs.partition_point(|&f| f <= edges[j + 1])
            } else {
                freqs.partition_point(|&f| f < edges[j + 1])
            };
            if lo >= hi {
                return Err(Error::InvalidArgument(format!("band {} contains no bins", j + 1)));
            }
            *slice = lo..hi;
        }
        if slices[0].start != 0 || slices[N_BANDS - 1].end != freqs.len() {
            return Err(Error::InvalidArgument(
                "band edges do not cover the whole spectrum".into(),
            ));
        }
        Ok(Self { edges, slices })
    }

    pub fn edges(&self) -> &[f64; N_BANDS + 1] {
        &self.edges
    }

    pub fn slice(&self, band: usize) -> Range<usize> {
        self.slices[band].clone()
    }

    pub fn slices(&self) -> &[Range<usize>; N_BANDS] {
        &self.slices
    }

    /// Band index holding `bin`.
    pub fn band_of(&self, bin: usize) -> Option<usize> {
        self.slices.iter().position(|s| s.contains(&bin))
    }
}

/// One-sided Welch PSD of a frame, split into bands.
#[derive(Debug, Clone, PartialEq)]
pub struct BandSpectrum {
    pub psd: Vec<f64>,
    freqs: Arc<[f64]>,
    layout: Arc<BandLayout>,
}

impl BandSpectrum {
    pub fn new(psd: Vec<f64>, freqs: Arc<[f64]>, layout: Arc<BandLayout>) -> Result<Self> {
        if psd.len() != freqs.len() {
            return Err(Error::DimensionMismatch {
                context: "psd bins",
                expected: freqs.len(),
                actual: psd.len(),
            });
        }
        Ok(Self { psd, freqs, layout })
    }

    pub fn freqs(&self) -> &[f64] {
        &self.freqs
    }

    pub fn layout(&self) -> &BandLayout {
        &self.layout
    }

    /// PSD values and bin frequencies of band `j` (zero-based).
    pub fn band(&self, j: usize) -> (&[f64], &[f64]) {
        let r = self.layout.slice(j);
        (&self.psd[r.clone()], &self.freqs[r])
    }

    pub fn total_power(&self) -> f64 {
        self.psd.iter().sum()
    }

    /// Frequency spacing between bins.
    pub fn bin_width(&self) -> f64 {
        self.freqs[1] - self.freqs[0]
    }
}

/// Reusable Welch estimator holding the FFT plan and window.
pub struct WelchEstimator {
    config: WelchConfig,
    fft: Arc<dyn Fft<f64>>,
    window: Vec<f64>,
    /// 1 / (fs * sum(w^2)), density scaling of one periodogram.
    scale: f64,
    freqs: Arc<[f64]>,
    layout: Arc<BandLayout>,
}

impl std::fmt::Debug for WelchEstimator {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("WelchEstimator")
            .field("config", &self.config)
            .field("layout", &self.layout)
            .finish()
    }
}

impl Default for WelchEstimator {
    fn default() -> Self {
        Self::new(WelchConfig::default(), SAMPLE_RATE, BandLayout::DEFAULT_EDGES)
            .expect("default Welch layout is valid")
    }
}

impl WelchEstimator {
    pub fn new(config: WelchConfig, sample_rate: u32, edges: [f64; N_BANDS + 1]) -> Result<Self> {
        if config.subframe_len < 2 || config.n_subframes == 0 || config.nfft < config.subframe_len {
            return Err(Error::InvalidArgument(format!("invalid Welch geometry {config:?}")));
        }
        let fs = sample_rate as f64;
        let window = hamming(config.subframe_len);
        let s2: f64 = window.iter().map(|w| w * w).sum();
        let n_bins = config.nfft / 2 + 1;
        let freqs: Arc<[f64]> = (0..n_bins).map(|k| k as f64 * fs / config.nfft as f64).collect();
        let layout = Arc::new(BandLayout::new(edges, &freqs)?);
        let fft = FftPlanner::new().plan_fft_forward(config.nfft);
        Ok(Self {
            config,
            fft,
            window,
            scale: 1.0 / (fs * s2),
            freqs,
            layout,
        })
    }

    pub fn config(&self) -> &WelchConfig {
        &self.config
    }

    pub fn freqs(&self) -> &Arc<[f64]> {
        &self.freqs
    }

    pub fn layout(&self) -> &Arc<BandLayout> {
        &self.layout
    }

    pub fn frame_len(&self) -> usize {
        self.config.subframe_len * self.config.n_subframes
    }

    /// Averages the windowed periodograms of consecutive, non-overlapping
    /// sub-frames.
    pub fn estimate(&self, frame: &[f64]) -> Result<BandSpectrum> {
        if frame.len() != self.frame_len() {
            return Err(Error::DimensionMismatch {
                context: "Welch frame length",
                expected: self.frame_len(),
                actual: frame.len(),
            });
        }
        let nfft = self.config.nfft;
        let n_bins = self.freqs.len();
        let mut psd = vec![0.0; n_bins];
        let mut buf = vec![Complex::new(0.0, 0.0); nfft];
        let mut scratch = vec![Complex::new(0.0, 0.0); self.fft.get_inplace_scratch_len()];
        for sub in frame.chunks_exact(self.config.subframe_len) {
            for (b, (x, w)) in buf.iter_mut().zip(sub.iter().zip(&self.window)) {
                *b = Complex::new(x * w, 0.0);
            }
            buf[self.config.subframe_len..].fill(Complex::new(0.0, 0.0));
            self.fft.process_with_scratch(&mut buf, &mut scratch);
            for (p, c) in psd.iter_mut().zip(&buf) {
                *p += c.norm_sqr();
            }
        }
        let avg = self.scale / self.config.n_subframes as f64;
        let nyquist = if nfft.is_multiple_of(2) { Some(n_bins - 1) } else { None };
        for (k, p) in psd.iter_mut().enumerate() {
            let one_sided = if k == 0 || Some(k) == nyquist { 1.0 } else { 2.0 };
            *p *= avg * one_sided;
        }
        BandSpectrum::new(psd, self.freqs.clone(), self.layout.clone())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn tone(freq: f64, amp: f64) -> Vec<f64> {
        (0..825)
            .map(|i| amp * (2.0 * PI * freq * i as f64 / 11_025.0).sin())
            .collect()
    }

    #[test]
    fn band_layout_defaults() {
        let est = WelchEstimator::default();
        let layout = est.layout();
        let freqs = est.freqs();
        assert_eq!(freqs.len(), 257);
        assert!((freqs[256] - 5512.5).abs() < 1e-9);
        assert_eq!(layout.slice(0).start, 0);
        for j in 0..N_BANDS - 1 {
            assert_eq!(layout.slice(j).end, layout.slice(j + 1).start);
        }
        assert_eq!(layout.slice(4).end, 257);
        assert_eq!(layout.band_of(0), Some(0));
    }

    #[test]
    fn boundary_bin_goes_to_upper_band() {
        let freqs: Vec<f64> = (0..=20).map(|k| k as f64 * 250.0).collect();
        let layout = BandLayout::new([0.0, 500.0, 1000.0, 1500.0, 2000.0, 5000.0], &freqs).unwrap();
        assert_eq!(layout.band_of(2), Some(1));
        assert_eq!(layout.band_of(20), Some(4));
    }

    #[test]
    fn zero_frame_gives_zero_psd() {
        let est = WelchEstimator::default();
        let s = est.estimate(&[0.0; 825]).unwrap();
        assert!(s.psd.iter().all(|&p| p == 0.0));
    }

    #[test]
    fn wrong_length_is_rejected() {
        let est = WelchEstimator::default();
        assert!(est.estimate(&[0.0; 824]).is_err());
    }

    #[test]
    fn sign_and_scale() {
        let est = WelchEstimator::default();
        let x: Vec<f64> = (0..825).map(|i| ((i * 7919) % 101) as f64 / 50.0 - 1.0).collect();
        let neg: Vec<f64> = x.iter().map(|v| -v).collect();
        let scaled: Vec<f64> = x.iter().map(|v| 3.0 * v).collect();
        let p = est.estimate(&x).unwrap();
        let pn = est.estimate(&neg).unwrap();
        let ps = est.estimate(&scaled).unwrap();
        for k in 0..p.psd.len() {
            assert!((p.psd[k] - pn.psd[k]).abs() <= 1e-9 * p.psd[k].abs().max(1e-300));
            assert!((ps.psd[k] - 9.0 * p.psd[k]).abs() <= 1e-9 * ps.psd[k].abs().max(1e-300));
        }
    }

    #[test]
    fn tone_peak_matches_direct_dft() {
        // Direct DFT of one windowed sub-frame, evaluated on the same bin grid.
        let est = WelchEstimator::default();
        let x = tone(500.0, 1.0);
        let spec = est.estimate(&x).unwrap();
        let argmax = |v: &[f64]| {
            v.iter()
                .enumerate()
                .fold((0, f64::MIN), |b, (i, &p)| if p > b.1 { (i, p) } else { b })
                .0
        };
        let w = hamming(275);
        let direct: Vec<f64> = (0..257)
            .map(|k| {
                let (mut re, mut im) = (0.0, 0.0);
                for n in 0..275 {
                    let a = -2.0 * PI * k as f64 * n as f64 / 512.0;
                    re += x[n] * w[n] * a.cos();
                    im += x[n] * w[n] * a.sin();
                }
                re * re + im * im
            })
            .collect();
        let peak = argmax(&spec.psd);
        assert_eq!(peak, argmax(&direct));
        let nearest = (500.0_f64 / (11_025.0 / 512.0)).round() as usize;
        assert_eq!(peak, nearest);
    }
}
