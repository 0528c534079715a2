//! Synthetic annotated corpus for desk-scale experiments.
//!
//! Each recording places cough-like bursts and speech-like distractors at
//! random gaps over a background of white and babble noise. A cough has an
//! explosive broadband onset, a noisy intermediate phase and a voiced tail,
//! all shaped around a resonance near 500 Hz. The background level is set
//! from the mean cough power so that the scenario's nominal SNR holds.

use std::f64::consts::PI;
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::annotation::{Annotations, EventLabel, Segment};
use crate::binio;
use crate::dataset::{DatasetManifest, ManifestEntry, Scenario};
use crate::dsp::{write_wav, AudioSignal, SAMPLE_RATE};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SynthConfig {
    pub patients: usize,
    /// Cough events per scenario, spread over the patients.
    pub coughs_per_scenario: usize,
    pub speech_events_per_recording: usize,
    /// Nominal cough SNR in dB for part1, part2 and part3.
    pub snr_db: [f64; 3],
    pub cough_seconds: [f64; 2],
    pub speech_seconds: [f64; 2],
    /// Silence between consecutive events.
    pub gap_seconds: [f64; 2],
    /// Per-event level spread in dB around the nominal level.
    pub level_spread_db: f64,
}

impl Default for SynthConfig {
    fn default() -> Self {
        Self {
            patients: 4,
            coughs_per_scenario: 200,
            speech_events_per_recording: 12,
            snr_db: [40.0, 10.0, 0.0],
            cough_seconds: [0.28, 0.42],
            speech_seconds: [0.6, 1.5],
            gap_seconds: [0.5, 1.3],
            level_spread_db: 3.0,
        }
    }
}

impl SynthConfig {
    fn validate(&self) -> Result<()> {
        let range_ok = |r: [f64; 2]| r[0] > 0.0 && r[1] >= r[0] && r[1].is_finite();
        if self.patients == 0 || self.coughs_per_scenario < self.patients {
            return Err(Error::InvalidArgument(format!(
                "need at least one cough per patient ({} coughs, {} patients)",
                self.coughs_per_scenario, self.patients
            )));
        }
        if !(range_ok(self.cough_seconds) && range_ok(self.speech_seconds) && range_ok(self.gap_seconds)) {
            return Err(Error::InvalidArgument(
                "synthetic duration ranges must be positive and ordered".into(),
            ));
        }
        if self.snr_db.iter().any(|s| !s.is_finite()) || !(self.level_spread_db >= 0.0) {
            return Err(Error::InvalidArgument("synthetic levels must be finite".into()));
        }
        Ok(())
    }
}

type BurstGenerator = fn(&mut ChaCha8Rng, f64) -> Vec<f64>;

/// One generated recording with its ground truth.
#[derive(Debug, Clone, PartialEq)]
pub struct SynthRecording {
    pub signal: AudioSignal,
    pub annotations: Annotations,
    pub patient_id: String,
    pub scenario: Scenario,
}

fn gauss(rng: &mut ChaCha8Rng) -> f64 {
    StandardNormal.sample(rng)
}

fn power(x: &[f64]) -> f64 {
    x.iter().map(|v| v * v).sum::<f64>() / x.len().max(1) as f64
}

fn scale_to_power(x: &mut [f64], target: f64) {
    let p = power(x);
    if p > 0.0 {
        let g = (target / p).sqrt();
        x.iter_mut().for_each(|v| *v *= g);
    }
}

/// Two-pole resonator in place.
fn resonate(x: &mut [f64], centre_hz: f64, bandwidth_hz: f64) {
    let fs = SAMPLE_RATE as f64;
    let r = (-PI * bandwidth_hz / fs).exp();
    let a1 = 2.0 * r * (2.0 * PI * centre_hz / fs).cos();
    let a2 = -r * r;
    let (mut y1, mut y2) = (0.0, 0.0);
    for v in x.iter_mut() {
        let y = *v + a1 * y1 + a2 * y2;
        y2 = y1;
        y1 = y;
        *v = y;
    }
}

fn seconds(t: f64) -> usize {
    (t * SAMPLE_RATE as f64).round() as usize
}

fn harmonic_tone(rng: &mut ChaCha8Rng, n: usize, f0: f64, envelope: impl Fn(f64) -> f64) -> Vec<f64> {
    let fs = SAMPLE_RATE as f64;
    let vibrato = rng.random_range(3.0..6.0);
    let phase0: Vec<f64> = (0..40).map(|_| rng.random_range(0.0..2.0 * PI)).collect();
    // amplitudes at the nominal pitch; vibrato only bends the frequencies
    let amps: Vec<(f64, f64)> = phase0
        .iter()
        .enumerate()
        .take_while(|(h, _)| f0 * (*h + 1) as f64 <= 4000.0)
        .map(|(h, p)| {
            let a = envelope(f0 * (h + 1) as f64);
            (a * p.cos(), a * p.sin())
        })
        .collect();
    let mut out = vec![0.0; n];
    let mut phase = 0.0f64;
    for (t, o) in out.iter_mut().enumerate() {
        let f = f0 * (1.0 + 0.02 * (2.0 * PI * vibrato * t as f64 / fs).sin());
        phase = (phase + 2.0 * PI * f / fs) % (2.0 * PI);
        // sin(h p) and cos(h p) by the angle-addition recurrence
        let (s1, c1) = phase.sin_cos();
        let (mut sh, mut ch) = (s1, c1);
        let mut s = 0.0;
        for &(ac, as_) in &amps {
            s += sh * ac + ch * as_;
            (sh, ch) = (sh * c1 + ch * s1, ch * c1 - sh * s1);
        }
        *o = s;
    }
    out
}

/// Three-phase cough of unit mean power.
pub fn cough_burst(rng: &mut ChaCha8Rng, duration: f64) -> Vec<f64> {
    let n = seconds(duration).max(16);
    let n1 = n * 12 / 100;
    let n2 = n * 45 / 100;
    let n3 = n - n1 - n2;
    let peak = rng.random_range(430.0..570.0);
    let mut out = Vec::with_capacity(n);

    let mut burst: Vec<f64> = (0..n1).map(|_| gauss(rng)).collect();
    let mut coloured = burst.clone();
    resonate(&mut coloured, peak, 350.0);
    scale_to_power(&mut coloured, 1.0);
    let attack = seconds(0.004).max(1);
    for (t, (b, c)) in burst.iter_mut().zip(&coloured).enumerate() {
        let env = if t < attack {
            t as f64 / attack as f64
        } else {
            (-((t - attack) as f64) / (0.4 * n1 as f64)).exp()
        };
        *b = env * (0.6 * *b + c);
    }
    scale_to_power(&mut burst, 2.5);
    out.extend(burst);

    let mut noisy: Vec<f64> = (0..n2).map(|_| gauss(rng)).collect();
    resonate(&mut noisy, peak * rng.random_range(1.0..1.3), 600.0);
    scale_to_power(&mut noisy, 1.0);
    for (t, v) in noisy.iter_mut().enumerate() {
        *v *= 1.0 - 0.5 * t as f64 / n2 as f64;
    }
    out.extend(noisy);

    let f0 = rng.random_range(250.0..380.0);
    let mut voiced = harmonic_tone(rng, n3, f0, |f| (-((f - peak) / 250.0).powi(2)).exp() + 0.05);
    let mut breath: Vec<f64> = (0..n3).map(|_| gauss(rng)).collect();
    resonate(&mut breath, peak, 800.0);
    scale_to_power(&mut voiced, 1.0);
    scale_to_power(&mut breath, 0.3);
    for (t, (v, b)) in voiced.iter_mut().zip(&breath).enumerate() {
        *v = (*v + b) * (PI * (t as f64 + 0.5) / n3 as f64).sin();
    }
    scale_to_power(&mut voiced, 0.7);
    out.extend(voiced);

    scale_to_power(&mut out, 1.0);
    out
}

/// Voiced speech-like utterance of unit mean power.
pub fn speech_burst(rng: &mut ChaCha8Rng, duration: f64) -> Vec<f64> {
    let n = seconds(duration).max(16);
    let f0 = rng.random_range(100.0..190.0);
    let f1 = rng.random_range(600.0..800.0);
    let f2 = rng.random_range(1100.0..1500.0);
    let formants = move |f: f64| (-((f - f1) / 120.0).powi(2)).exp() + 0.6 * (-((f - f2) / 150.0).powi(2)).exp() + 0.02;
    let mut x = harmonic_tone(rng, n, f0, formants);
    let rate = rng.random_range(3.5..5.5);
    let fs = SAMPLE_RATE as f64;
    for (t, v) in x.iter_mut().enumerate() {
        let syllable = (PI * rate * t as f64 / fs).sin().abs();
        let edge = (PI * (t as f64 + 0.5) / n as f64).sin();
        *v *= syllable * edge;
    }
    scale_to_power(&mut x, 1.0);
    x
}

/// Continuous babble from overlapping talkers, unit mean power.
fn babble(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    let mut out = vec![0.0; n];
    for _ in 0..6 {
        let mut t = rng.random_range(0..seconds(0.8));
        while t < n {
            let d = rng.random_range(0.8..2.0);
            let utter = speech_burst(rng, d);
            for (o, v) in out[t..].iter_mut().zip(&utter) {
                *o += v;
            }
            t += utter.len() + seconds(rng.random_range(0.05..0.4));
        }
    }
    scale_to_power(&mut out, 1.0);
    out
}

fn level(rng: &mut ChaCha8Rng, spread_db: f64) -> f64 {
    if spread_db > 0.0 {
        10f64.powf(rng.random_range(-spread_db..spread_db) / 10.0)
    } else {
        1.0
    }
}

/// Cough count of `patient` when the scenario total is spread evenly.
pub fn coughs_for(config: &SynthConfig, patient: usize) -> usize {
    config.coughs_per_scenario / config.patients + usize::from(patient < config.coughs_per_scenario % config.patients)
}

pub fn patient_id(patient: usize) -> String {
    format!("patient{:02}", patient + 1)
}

/// Generates one recording; the random stream depends only on `seed`, `patient` and `scenario`.
pub fn synthesize_recording(
    config: &SynthConfig,
    patient: usize,
    scenario: Scenario,
    seed: u64,
) -> Result<SynthRecording> {
    config.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream((patient * Scenario::ALL.len() + scenario.index()) as u64);
    let mut kinds = vec![EventLabel::Cough; coughs_for(config, patient)];
    kinds.extend(std::iter::repeat_n(
        EventLabel::Other,
        config.speech_events_per_recording,
    ));
    // shuffle event order
    for i in (1..kinds.len()).rev() {
        kinds.swap(i, rng.random_range(0..=i));
    }
    let fs = SAMPLE_RATE as f64;
    let mut events: Vec<(usize, Vec<f64>, EventLabel)> = Vec::with_capacity(kinds.len());
    let mut t = seconds(rng.random_range(config.gap_seconds[0]..=config.gap_seconds[1]));
    for kind in kinds {
        let (range, wave): ([f64; 2], BurstGenerator) = match kind {
            EventLabel::Cough => (config.cough_seconds, cough_burst),
            EventLabel::Other => (config.speech_seconds, speech_burst),
        };
        let d = rng.random_range(range[0]..=range[1]);
        let mut x = wave(&mut rng, d);
        let g = level(&mut rng, config.level_spread_db).sqrt();
        x.iter_mut().for_each(|v| *v *= g);
        let len = x.len();
        events.push((t, x, kind));
        t += len + seconds(rng.random_range(config.gap_seconds[0]..=config.gap_seconds[1]));
    }
    let n = t;
    let snr = config.snr_db[scenario.index()];
    let cough_power = {
        let c: Vec<f64> = events
            .iter()
            .filter(|e| e.2 == EventLabel::Cough)
            .map(|e| power(&e.1))
            .collect();
        c.iter().sum::<f64>() / c.len() as f64
    };
    let noise_power = cough_power / 10f64.powf(snr / 10.0);
    let mut x: Vec<f64> = (0..n).map(|_| gauss(&mut rng)).collect();
    scale_to_power(&mut x, 1.0);
    let bab = babble(&mut rng, n);
    let white_share = 0.5;
    for (v, b) in x.iter_mut().zip(&bab) {
        *v = (noise_power * white_share).sqrt() * *v + (noise_power * (1.0 - white_share)).sqrt() * b;
    }
    let mut segments = Vec::with_capacity(events.len());
    for (start, wave, label) in &events {
        for (o, v) in x[*start..].iter_mut().zip(wave) {
            *o += v;
        }
        segments.push(Segment {
            start: *start as f64 / fs,
            end: (start + wave.len()) as f64 / fs,
            label: *label,
        });
    }
    let peak = x.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    if peak > 0.0 {
        let g = 0.9 / peak;
        x.iter_mut().for_each(|v| *v *= g);
    }
    let pid = patient_id(patient);
    Ok(SynthRecording {
        signal: AudioSignal::new(x, SAMPLE_RATE, format!("{pid}_{scenario}"))?,
        annotations: Annotations::new(segments)?,
        patient_id: pid,
        scenario,
    })
}

/// Writes every recording, its annotation and `manifest.csv` into `dir`.
pub fn write_corpus(dir: &Path, config: &SynthConfig, seed: u64) -> Result<DatasetManifest> {
    config.validate()?;
    std::fs::create_dir_all(dir).map_err(|e| Error::from(e).with_path(dir))?;
    let jobs: Vec<(usize, Scenario)> = (0..config.patients)
        .flat_map(|p| Scenario::ALL.into_iter().map(move |s| (p, s)))
        .collect();
    let entries = crate::par::map(&jobs, |&(p, s)| -> Result<ManifestEntry> {
        let rec = synthesize_recording(config, p, s, seed)?;
        let stem = rec.signal.source_id().to_string();
        let wav = dir.join(format!("{stem}.wav"));
        let annotation = dir.join(format!("{stem}.csv"));
        write_wav(&wav, &rec.signal)?;
        binio::write_atomic(&annotation, rec.annotations.to_csv().as_bytes())?;
        Ok(ManifestEntry {
            wav,
            annotation,
            patient_id: rec.patient_id,
            scenario: s,
        })
    })
    .into_iter()
    .collect::<Result<Vec<_>>>()?;
    let manifest = DatasetManifest { entries };
    binio::write_atomic(&dir.join("manifest.csv"), manifest.to_csv(dir).as_bytes())?;
    Ok(manifest)
}
