//! Event SNR from the power of annotated frames against their surroundings.

use std::ops::Range;

use serde::{Deserialize, Serialize};

use crate::dsp::{frame_count, FrameLayout};
use crate::error::{Error, Result};

/// Noise frames taken on each side of an event.
pub const DEFAULT_CONTEXT_FRAMES: usize = 3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SnrFlag {
    Ok,
    /// Noise estimated from one side only.
    OneSided,
    /// Event power did not exceed the noise power; SNR is -inf.
    NotAboveNoise,
    /// No noise frames on either side; SNR is NaN.
    NoContext,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SnrEstimate {
    /// Short-term frame indices of the event.
    pub frames: Range<usize>,
    pub event_power: f64,
    pub noise_power: f64,
    pub snr_db: f64,
    pub flag: SnrFlag,
}

/// Maximal runs of `true` in per-frame labels.
pub fn event_spans(frame_labels: &[bool]) -> Vec<Range<usize>> {
    let mut spans = Vec::new();
    let mut start = None;
    for (i, &l) in frame_labels.iter().enumerate() {
        match (l, start) {
            (true, None) => start = Some(i),
            (false, Some(s)) => {
                spans.push(s..i);
                start = None;
            }
            _ => {}
        }
    }
    if let Some(s) = start {
        spans.push(s..frame_labels.len());
    }
    spans
}

fn frame_power(x: &[f64]) -> f64 {
    x.iter().map(|v| v * v).sum::<f64>() / x.len() as f64
}

/// SNR of each event span, in dB.
///
/// Event power is the mean frame power over the span. Noise power is the
/// mean power of up to `context` frames on each side whose samples do not
/// touch any event. SNR = 10 log10((P_event - P_noise) / P_noise).
pub fn snr_annotate(
    samples: &[f64],
    layout: &FrameLayout,
    spans: &[Range<usize>],
    context: usize,
) -> Result<Vec<SnrEstimate>> {
    let n_frames = frame_count(samples.len(), layout);
    let power: Vec<f64> = (0..n_frames).map(|i| frame_power(&samples[layout.span(i)])).collect();
    let sample_range = |r: &Range<usize>| layout.span(r.start).start..layout.span(r.end - 1).end;
    let event_samples: Vec<Range<usize>> = spans
        .iter()
        .map(|r| {
            if r.is_empty() || r.end > n_frames {
                Err(Error::InvalidArgument(format!(
                    "event frames {}..{} outside recording of {n_frames} frames",
                    r.start, r.end
                )))
            } else {
                Ok(sample_range(r))
            }
        })
        .collect::<Result<_>>()?;
    let clean = |i: usize| {
        let s = layout.span(i);
        event_samples.iter().all(|e| s.end <= e.start || e.end <= s.start)
    };
    Ok(spans
        .iter()
        .map(|r| {
            let before: Vec<usize> = (0..r.start).rev().filter(|&i| clean(i)).take(context).collect();
            let after: Vec<usize> = (r.end..n_frames).filter(|&i| clean(i)).take(context).collect();
            let noise: Vec<f64> = before.iter().chain(&after).map(|&i| power[i]).collect();
            let event_power = power[r.clone()].iter().sum::<f64>() / r.len() as f64;
            let noise_power = noise.iter().sum::<f64>() / noise.len().max(1) as f64;
            let (snr_db, flag) = if noise.is_empty() {
                (f64::NAN, SnrFlag::NoContext)
            } else if event_power <= noise_power {
                (f64::NEG_INFINITY, SnrFlag::NotAboveNoise)
            } else {
                let db = 10.0 * ((event_power - noise_power) / noise_power).log10();
                let flag = if before.is_empty() || after.is_empty() {
                    SnrFlag::OneSided
                } else {
                    SnrFlag::Ok
                };
                (db, flag)
            };
            SnrEstimate {
                frames: r.clone(),
                event_power,
                noise_power: if noise.is_empty() { f64::NAN } else { noise_power },
                snr_db,
                flag,
            }
        })
        .collect())
}
