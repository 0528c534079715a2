use std::path::Path;

use hound::{SampleFormat, WavReader, WavSpec, WavWriter};

use super::{resample, AudioSignal, SAMPLE_RATE};
use crate::error::{Error, Result};

const ACCEPTED_RATES: [u32; 2] = [44_100, SAMPLE_RATE];

fn check_spec(spec: &WavSpec) -> Result<()> {
    if spec.sample_format != SampleFormat::Int {
        return Err(Error::UnsupportedWav {
            field: "sample_format",
            value: format!("{:?}", spec.sample_format),
            detail: "only integer PCM is accepted",
        });
    }
    if spec.bits_per_sample != 16 {
        return Err(Error::UnsupportedWav {
            field: "bits_per_sample",
            value: spec.bits_per_sample.to_string(),
            detail: "only 16-bit PCM is accepted",
        });
    }
    if !(1..=2).contains(&spec.channels) {
        return Err(Error::UnsupportedWav {
            field: "channels",
            value: spec.channels.to_string(),
            detail: "only mono or stereo is accepted",
        });
    }
    if !ACCEPTED_RATES.contains(&spec.sample_rate) {
        return Err(Error::UnsupportedWav {
            field: "sample_rate",
            value: spec.sample_rate.to_string(),
            detail: "only 44100 Hz or 11025 Hz is accepted",
        });
    }
    Ok(())
}

/// Reads a 16-bit PCM WAV file, averaging stereo to mono.
pub fn read_wav(path: &Path) -> Result<AudioSignal> {
    let file = std::fs::File::open(path).map_err(|e| Error::from(e).with_path(path))?;
    let reader = WavReader::new(std::io::BufReader::new(file))?;
    let spec = reader.spec();
    check_spec(&spec)?;
    let channels = spec.channels as usize;
    let raw: Vec<i16> = reader.into_samples::<i16>().collect::<std::result::Result<_, _>>()?;
    let samples = raw
        .chunks_exact(channels)
        .map(|c| c.iter().map(|&s| s as f64 / 32_768.0).sum::<f64>() / channels as f64)
        .collect();
    let id = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    AudioSignal::new(samples, spec.sample_rate, id)
}

/// Reads a WAV file and brings it to the 11.025 kHz analysis rate.
pub fn load_wav(path: &Path) -> Result<AudioSignal> {
    let signal = read_wav(path)?;
    if signal.sample_rate() == SAMPLE_RATE {
        Ok(signal)
    } else {
        resample(&signal, SAMPLE_RATE)
    }
}

/// Writes a mono 16-bit PCM WAV file; samples are clipped to `[-1, 1]`.
pub fn write_wav(path: &Path, signal: &AudioSignal) -> Result<()> {
    let spec = WavSpec {
        channels: 1,
        sample_rate: signal.sample_rate(),
        bits_per_sample: 16,
        sample_format: SampleFormat::Int,
    };
    let mut writer = WavWriter::create(path, spec)?;
    for &s in signal.samples() {
        let v = (s.clamp(-1.0, 1.0) * 32_767.0).round() as i16;
        writer.write_sample(v)?;
    }
    writer.finalize()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn write_raw(path: &Path, spec: WavSpec, n: usize) {
        let mut w = WavWriter::create(path, spec).unwrap();
        for i in 0..n {
            match (spec.sample_format, spec.bits_per_sample) {
                (SampleFormat::Float, _) => w.write_sample(0.1f32).unwrap(),
                (_, 16) => w.write_sample((i % 100) as i16).unwrap(),
                _ => w.write_sample((i % 100) as i32).unwrap(),
            }
        }
        w.finalize().unwrap();
    }

    #[test]
    fn stereo_is_averaged() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("st.wav");
        let spec = WavSpec {
            channels: 2,
            sample_rate: SAMPLE_RATE,
            bits_per_sample: 16,
            sample_format: SampleFormat::Int,
        };
        let mut w = WavWriter::create(&path, spec).unwrap();
        for _ in 0..10 {
            w.write_sample(1000i16).unwrap();
            w.write_sample(3000i16).unwrap();
        }
        w.finalize().unwrap();
        let s = read_wav(&path).unwrap();
        assert_eq!(s.len(), 10);
        assert!((s.samples()[0] - 2000.0 / 32_768.0).abs() < 1e-12);
        assert_eq!(s.source_id(), "st");
    }

    #[test]
    fn rejected_formats_name_the_field() {
        let dir = tempfile::tempdir().unwrap();
        let cases = [
            (1, 11_025, 24, SampleFormat::Int, "bits_per_sample"),
            (1, 11_025, 32, SampleFormat::Float, "sample_format"),
            (1, 16_000, 16, SampleFormat::Int, "sample_rate"),
            (3, 11_025, 16, SampleFormat::Int, "channels"),
        ];
        for (i, (channels, rate, bits, fmt, field)) in cases.into_iter().enumerate() {
            let path = dir.path().join(format!("bad{i}.wav"));
            let spec = WavSpec {
                channels,
                sample_rate: rate,
                bits_per_sample: bits,
                sample_format: fmt,
            };
            write_raw(&path, spec, 30);
            let err = read_wav(&path).unwrap_err();
            assert!(err.to_string().contains(field), "{err}");
        }
    }

    #[test]
    fn roundtrip_and_resample() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("a.wav");
        let sig = AudioSignal::new(vec![0.25; 44_100], 44_100, "a").unwrap();
        write_wav(&path, &sig).unwrap();
        let back = load_wav(&path).unwrap();
        assert_eq!(back.sample_rate(), SAMPLE_RATE);
        assert_eq!(back.len(), 11_025);
        assert!((back.samples()[5000] - 8192.0 / 32_768.0).abs() < 1e-4);
    }
}
