//! Short-term feature extraction: 61 band descriptors and 56 auxiliary
//! descriptors per frame.

pub mod auxiliary;
pub mod band;
mod export;
pub mod filterbank;

pub use auxiliary::{aux_feature_names, AuxConfig, AuxExtractor, AuxFeatureVector, AUX_FEATURE_DIM};
pub use band::{band_feature_names, BandDescriptors, BandFeatureVector, BAND_FEATURE_DIM};
pub use export::{FeatureTable, UNLABELED};

use serde::{Deserialize, Serialize};

use crate::dsp::{frame_count, AudioSignal, BandLayout, FrameLayout, WelchConfig, WelchEstimator, N_BANDS};
use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::par;

/// Full short-term dimension.
pub const SHORT_TERM_DIM: usize = BAND_FEATURE_DIM + AUX_FEATURE_DIM;

/// Column names of the full short-term vector, band features first.
pub fn feature_names() -> Vec<String> {
    let mut names = band_feature_names();
    names.extend(aux_feature_names());
    names
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ExtractionConfig {
    pub frame: FrameLayout,
    pub welch: WelchConfig,
    pub band_edges_hz: [f64; N_BANDS + 1],
    pub aux: AuxConfig,
}

impl Default for ExtractionConfig {
    fn default() -> Self {
        Self {
            frame: FrameLayout::default(),
            welch: WelchConfig::default(),
            band_edges_hz: BandLayout::DEFAULT_EDGES,
            aux: AuxConfig::default(),
        }
    }
}

/// Short-term features of every frame of one recording.
#[derive(Debug, Clone, PartialEq)]
pub struct FrameFeatures {
    pub matrix: Matrix,
    pub start_times: Vec<f64>,
    /// Frames where at least one band was silent.
    pub degenerate: Vec<bool>,
}

/// Computes the 117-dimensional short-term vectors of a recording.
#[derive(Debug)]
pub struct FeatureExtractor {
    layout: FrameLayout,
    welch: WelchEstimator,
    aux: AuxExtractor,
}

impl FeatureExtractor {
    pub fn new(config: &ExtractionConfig) -> Result<Self> {
        let welch = WelchEstimator::new(config.welch, config.frame.sample_rate, config.band_edges_hz)?;
        if welch.frame_len() != config.frame.frame_len {
            return Err(Error::InvalidArgument(format!(
                "Welch sub-frames cover {} samples but frames hold {}",
                welch.frame_len(),
                config.frame.frame_len
            )));
        }
        let aux = AuxExtractor::new(config.aux.clone(), config.frame.frame_len, config.frame.sample_rate)?;
        Ok(Self {
            layout: config.frame,
            welch,
            aux,
        })
    }

    pub fn layout(&self) -> &FrameLayout {
        &self.layout
    }

    pub fn welch(&self) -> &WelchEstimator {
        &self.welch
    }

    pub fn aux(&self) -> &AuxExtractor {
        &self.aux
    }

    /// Extracts every full frame of `signal`, which must be at the layout rate.
    pub fn extract(&self, signal: &AudioSignal) -> Result<FrameFeatures> {
        if signal.sample_rate() != self.layout.sample_rate {
            return Err(Error::InvalidArgument(format!(
                "feature extraction expects {} Hz audio, got {} Hz",
                self.layout.sample_rate,
                signal.sample_rate()
            )));
        }
        let x = signal.samples();
        let n = frame_count(x.len(), &self.layout);
        let spectra = par::map_range(n, |i| self.welch.estimate(&x[self.layout.span(i)]))
            .into_iter()
            .collect::<Result<Vec<_>>>()?;
        let rows = par::map_range(n, |i| -> Result<(Vec<f64>, bool)> {
            let prev = i.checked_sub(1).map(|p| &spectra[p]);
            let band = BandFeatureVector::compute(&spectra[i], prev)?;
            let aux = self.aux.compute(&x[self.layout.span(i)])?;
            let mut row = vec![0.0; SHORT_TERM_DIM];
            band.write_into(&mut row[..BAND_FEATURE_DIM]);
            aux.write_into(&mut row[BAND_FEATURE_DIM..]);
            Ok((row, band.degenerate))
        });
        let mut data = Vec::with_capacity(n * SHORT_TERM_DIM);
        let mut degenerate = Vec::with_capacity(n);
        for r in rows {
            let (row, deg) = r?;
            data.extend_from_slice(&row);
            degenerate.push(deg);
        }
        Ok(FrameFeatures {
            matrix: Matrix::new(n, SHORT_TERM_DIM, data)?,
            start_times: (0..n)
                .map(|i| (i * self.layout.hop_len) as f64 / self.layout.sample_rate as f64)
                .collect(),
            degenerate,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dsp::SAMPLE_RATE;

    #[test]
    fn dimension_contract() {
        assert_eq!(BAND_FEATURE_DIM, 61);
        assert_eq!(AUX_FEATURE_DIM, 56);
        assert_eq!(SHORT_TERM_DIM, 117);
        let names = feature_names();
        assert_eq!(names.len(), 117);
        let mut uniq = names.clone();
        uniq.sort();
        uniq.dedup();
        assert_eq!(uniq.len(), 117);
    }

    #[test]
    fn extracts_all_frames() {
        let ex = FeatureExtractor::new(&ExtractionConfig::default()).unwrap();
        let samples: Vec<f64> = (0..11_025)
            .map(|i| 0.3 * (i as f64 * 0.37).sin() + 0.01 * ((i * 31) % 17) as f64)
            .collect();
        let sig = AudioSignal::new(samples, SAMPLE_RATE, "t").unwrap();
        let f = ex.extract(&sig).unwrap();
        assert_eq!(f.matrix.rows(), frame_count(11_025, ex.layout()));
        assert_eq!(f.matrix.cols(), 117);
        assert!(f.matrix.all_finite());
        assert!((f.start_times[1] - 617.0 / 11_025.0).abs() < 1e-12);
    }

    #[test]
    fn silence_is_finite_and_flagged() {
        let ex = FeatureExtractor::new(&ExtractionConfig::default()).unwrap();
        let sig = AudioSignal::new(vec![0.0; 3000], SAMPLE_RATE, "s").unwrap();
        let f = ex.extract(&sig).unwrap();
        assert!(f.matrix.all_finite());
        assert!(f.degenerate.iter().all(|&d| d));
    }

    #[test]
    fn mismatched_geometry_is_rejected() {
        let mut cfg = ExtractionConfig::default();
        cfg.frame.frame_len = 826;
        assert!(FeatureExtractor::new(&cfg).is_err());
    }
}
