use std::ops::Range;

use serde::{Deserialize, Serialize};

use super::{AudioSignal, SAMPLE_RATE};
use crate::error::{Error, Result};

/// Short-term frames per long-term group.
pub const GROUP_LEN: usize = 5;
/// Consecutive groups share one short-term frame.
pub const GROUP_STRIDE: usize = GROUP_LEN - 1;

/// Short-term framing geometry.
///
/// The default is 825 samples (75 ms at 11.025 kHz, rounded down to
/// 3 x 275) advanced by 617 samples (56 ms), i.e. a 19 ms overlap.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FrameLayout {
    pub sample_rate: u32,
    pub frame_len: usize,
    pub hop_len: usize,
}

impl Default for FrameLayout {
    fn default() -> Self {
        Self {
            sample_rate: SAMPLE_RATE,
            frame_len: 825,
            hop_len: 617,
        }
    }
}

impl FrameLayout {
    pub fn hop_seconds(&self) -> f64 {
        self.hop_len as f64 / self.sample_rate as f64
    }

    pub fn frame_seconds(&self) -> f64 {
        self.frame_len as f64 / self.sample_rate as f64
    }

    /// Sample range covered by frame `index`.
    pub fn span(&self, index: usize) -> Range<usize> {
        let start = index * self.hop_len;
        start..start + self.frame_len
    }
}

/// One short-term analysis frame.
#[derive(Debug, Clone, PartialEq)]
pub struct SignalFrame {
    pub index: usize,
    /// Seconds from the start of the recording.
    pub start_time: f64,
    pub samples: Vec<f64>,
}

/// Number of full frames in `n_samples` samples; trailing partial frames are dropped.
pub fn frame_count(n_samples: usize, layout: &FrameLayout) -> usize {
    if n_samples < layout.frame_len {
        0
    } else {
        (n_samples - layout.frame_len) / layout.hop_len + 1
    }
}

/// Splits an 11.025 kHz signal into the default frame layout.
pub fn frame_signal(signal: &AudioSignal) -> Result<Vec<SignalFrame>> {
    frame_signal_with(signal, &FrameLayout::default())
}

pub fn frame_signal_with(signal: &AudioSignal, layout: &FrameLayout) -> Result<Vec<SignalFrame>> {
    if signal.sample_rate() != layout.sample_rate {
        return Err(Error::InvalidArgument(format!(
            "framing expects {} Hz audio, got {} Hz",
            layout.sample_rate,
            signal.sample_rate()
        )));
    }
    let x = signal.samples();
    Ok((0..frame_count(x.len(), layout))
        .map(|index| SignalFrame {
            index,
            start_time: (index * layout.hop_len) as f64 / layout.sample_rate as f64,
            samples: x[layout.span(index)].to_vec(),
        })
        .collect())
}

/// A run of [`GROUP_LEN`] consecutive short-term frames.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct LongTermGroup {
    pub index: usize,
    pub first: usize,
}

impl LongTermGroup {
    pub fn frames(&self) -> Range<usize> {
        self.first..self.first + GROUP_LEN
    }

    pub fn last(&self) -> usize {
        self.first + GROUP_LEN - 1
    }
}

pub fn long_term_count(n_items: usize) -> usize {
    if n_items < GROUP_LEN {
        0
    } else {
        (n_items - GROUP_LEN) / GROUP_STRIDE + 1
    }
}

/// Groups `n_items` short-term items into overlapping long-term groups.
pub fn build_long_term(n_items: usize) -> Vec<LongTermGroup> {
    (0..long_term_count(n_items))
        .map(|index| LongTermGroup {
            index,
            first: index * GROUP_STRIDE,
        })
        .collect()
}
