//! Audio ingestion and everything upstream of feature computation.

mod framing;
mod resample;
mod wav;
mod welch;

pub use framing::{
    build_long_term, frame_count, frame_signal, frame_signal_with, long_term_count, FrameLayout, LongTermGroup,
    SignalFrame, GROUP_LEN, GROUP_STRIDE,
};
pub use resample::resample;
pub use wav::{load_wav, read_wav, write_wav};
pub use welch::{BandLayout, BandSpectrum, WelchConfig, WelchEstimator, N_BANDS};

use crate::error::{Error, Result};

/// Analysis rate of the whole pipeline.
pub const SAMPLE_RATE: u32 = 11_025;

/// A mono recording with samples in `[-1, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct AudioSignal {
    samples: Vec<f64>,
    sample_rate: u32,
    source_id: String,
}

impl AudioSignal {
    pub fn new(samples: Vec<f64>, sample_rate: u32, source_id: impl Into<String>) -> Result<Self> {
        if sample_rate == 0 {
            return Err(Error::InvalidArgument("sample rate must be positive".into()));
        }
        if samples.iter().any(|s| !s.is_finite()) {
            return Err(Error::NonFinite("audio samples"));
        }
        Ok(Self {
            samples,
            sample_rate,
            source_id: source_id.into(),
        })
    }

    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    pub fn sample_rate(&self) -> u32 {
        self.sample_rate
    }

    pub fn source_id(&self) -> &str {
        &self.source_id
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    /// Duration in seconds.
    pub fn duration(&self) -> f64 {
        self.samples.len() as f64 / self.sample_rate as f64
    }

    pub fn into_samples(self) -> Vec<f64> {
        self.samples
    }
}

/// Symmetric Hamming window of length `n`.
pub fn hamming(n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![1.0];
    }
    let denom = (n - 1) as f64;
    (0..n)
        .map(|i| 0.54 - 0.46 * (2.0 * std::f64::consts::PI * i as f64 / denom).cos())
        .collect()
}
