use std::f64::consts::PI;

use super::AudioSignal;
use crate::error::{Error, Result};

/// Zero crossings of the windowed sinc on each side of its centre, counted at
/// the output rate.
const ZERO_CROSSINGS: usize = 16;

fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

fn sinc(x: f64) -> f64 {
    if x == 0.0 {
        1.0
    } else {
        (PI * x).sin() / (PI * x)
    }
}

/// Blackman-windowed sinc low-pass at the upsampled rate, cut off at the
/// output Nyquist frequency.
fn design_lowpass(up: usize, down: usize) -> Vec<f64> {
    let span = up.max(down);
    let len = 2 * ZERO_CROSSINGS * span + 1;
    let centre = (len - 1) as f64 / 2.0;
    let cutoff = 0.5 / span as f64;
    (0..len)
        .map(|n| {
            let t = n as f64 - centre;
            let w = 0.42 - 0.5 * (2.0 * PI * n as f64 / (len - 1) as f64).cos()
                + 0.08 * (4.0 * PI * n as f64 / (len - 1) as f64).cos();
            2.0 * cutoff * sinc(2.0 * cutoff * t) * w
        })
        .collect()
}

/// Rational polyphase resampling to `target_rate`.
///
/// Only downsampling is supported. Each output sample is normalised by the
/// sum of the filter taps that touched input samples, so DC is preserved
/// exactly, including at the recording edges.
pub fn resample(signal: &AudioSignal, target_rate: u32) -> Result<AudioSignal> {
    if signal.is_empty() {
        return Err(Error::Empty("signal to resample"));
    }
    let source_rate = signal.sample_rate();
    if target_rate == 0 || target_rate >= source_rate {
        return Err(Error::InvalidArgument(format!(
            "target rate {target_rate} Hz must be below the source rate {source_rate} Hz"
        )));
    }
    let g = gcd(source_rate as u64, target_rate as u64);
    let up = (target_rate as u64 / g) as usize;
    let down = (source_rate as u64 / g) as usize;
    let taps = design_lowpass(up, down);
    let x = signal.samples();
    let n = x.len();
    let out_len = (n * up).div_ceil(down);
    let half = (taps.len() - 1) / 2;

    let samples = crate::par::map_range(out_len, |m| {
        // Position on the upsampled grid, shifted so the filter is centred.
        let t = m * down + half;
        let first = t.saturating_sub(taps.len() - 1).div_ceil(up);
        let last = (t / up).min(n - 1);
        let mut acc = 0.0;
        let mut gain = 0.0;
        let mut i = first;
        while i <= last {
            let h = taps[t - i * up];
            acc += h * x[i];
            gain += h;
            i += 1;
        }
        if gain.abs() > f64::EPSILON {
            acc / gain
        } else {
            0.0
        }
    });
    AudioSignal::new(samples, target_rate, signal.source_id())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dsp::SAMPLE_RATE;

    fn sine(freq: f64, rate: u32, secs: f64) -> AudioSignal {
        let n = (rate as f64 * secs) as usize;
        let s = (0..n)
            .map(|i| (2.0 * PI * freq * i as f64 / rate as f64).sin())
            .collect();
        AudioSignal::new(s, rate, "sine").unwrap()
    }

    #[test]
    fn four_to_one_length() {
        let s = AudioSignal::new(vec![0.1; 4 * 44_100], 44_100, "x").unwrap();
        let r = resample(&s, SAMPLE_RATE).unwrap();
        assert_eq!(r.len(), 44_100);
        assert_eq!(r.sample_rate(), SAMPLE_RATE);
    }

    #[test]
    fn dc_is_preserved() {
        let s = AudioSignal::new(vec![0.5; 10_000], 44_100, "dc").unwrap();
        let r = resample(&s, SAMPLE_RATE).unwrap();
        assert!(r.samples().iter().all(|v| (v - 0.5).abs() < 1e-12));
    }

    #[test]
    fn rational_ratio_preserves_duration() {
        let s = sine(300.0, 48_000, 1.0);
        let r = resample(&s, SAMPLE_RATE).unwrap();
        assert!((r.duration() - s.duration()).abs() <= 1.0 / SAMPLE_RATE as f64);
    }

    #[test]
    fn aliasing_tone_is_suppressed() {
        // 7 kHz lies above the 5.5125 kHz output Nyquist and must be removed.
        let s = sine(7_000.0, 44_100, 0.5);
        let r = resample(&s, SAMPLE_RATE).unwrap();
        let inner = &r.samples()[200..r.len() - 200];
        let rms = (inner.iter().map(|v| v * v).sum::<f64>() / inner.len() as f64).sqrt();
        assert!(rms < 1e-3, "alias rms {rms}");
    }

    #[test]
    fn errors() {
        let empty = AudioSignal::new(vec![], 44_100, "e").unwrap();
        assert!(matches!(resample(&empty, SAMPLE_RATE), Err(Error::Empty(_))));
        let s = sine(100.0, SAMPLE_RATE, 0.1);
        assert!(resample(&s, SAMPLE_RATE).is_err());
        assert!(resample(&s, 44_100).is_err());
    }
}
