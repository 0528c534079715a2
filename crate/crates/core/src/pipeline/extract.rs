use std::path::PathBuf;

use crate::annotation::Annotations;
use crate::dataset::{DatasetManifest, ManifestEntry};
use crate::dsp::{load_wav, resample, AudioSignal};
use crate::error::{Error, Result};
use crate::features::{feature_names, ExtractionConfig, FeatureExtractor, FeatureTable, UNLABELED};
use crate::par;

/// A manifest entry that could not be processed.
#[derive(Debug)]
pub struct ExtractionFailure {
    pub wav: PathBuf,
    pub error: Error,
}

/// Features of a signal with optional ground truth.
pub fn extract_signal(
    extractor: &FeatureExtractor,
    signal: &AudioSignal,
    annotations: Option<&Annotations>,
) -> Result<FeatureTable> {
    let rate = extractor.layout().sample_rate;
    let resampled;
    let signal = if signal.sample_rate() == rate {
        signal
    } else {
        resampled = resample(signal, rate)?;
        &resampled
    };
    let ff = extractor.extract(signal)?;
    let degenerate = ff.degenerate.iter().filter(|&&d| d).count();
    if degenerate > 0 {
        log::debug!("{}: {degenerate} frames with a silent band", signal.source_id());
    }
    let labels = match annotations {
        Some(a) => a
            .frame_labels(extractor.layout(), signal.len())
            .into_iter()
            .take(ff.matrix.rows())
            .map(u8::from)
            .collect(),
        None => vec![UNLABELED; ff.matrix.rows()],
    };
    let table = FeatureTable {
        recording_id: signal.source_id().to_string(),
        patient_id: String::new(),
        scenario: String::new(),
        names: feature_names(),
        matrix: ff.matrix,
        start_times: ff.start_times,
        labels,
    };
    table.validate()?;
    Ok(table)
}

pub fn extract_entry(extractor: &FeatureExtractor, entry: &ManifestEntry) -> Result<FeatureTable> {
    let signal = load_wav(&entry.wav)?;
    let annotations = Annotations::load(&entry.annotation)?;
    let mut table = extract_signal(extractor, &signal, Some(&annotations)).map_err(|e| e.with_path(&entry.wav))?;
    table.recording_id = entry.recording_id();
    table.patient_id = entry.patient_id.clone();
    table.scenario = entry.scenario.to_string();
    Ok(table)
}

/// Extracts every entry, one file per worker; failures are returned alongside successes.
pub fn extract_manifest(
    manifest: &DatasetManifest,
    config: &ExtractionConfig,
) -> Result<(Vec<FeatureTable>, Vec<ExtractionFailure>)> {
    let extractor = FeatureExtractor::new(config)?;
    let results = par::map(&manifest.entries, |e| extract_entry(&extractor, e));
    let mut tables = Vec::new();
    let mut failures = Vec::new();
    for (r, e) in results.into_iter().zip(&manifest.entries) {
        match r {
            Ok(t) => tables.push(t),
            Err(error) => failures.push(ExtractionFailure {
                wav: e.wav.clone(),
                error,
            }),
        }
    }
    Ok((tables, failures))
}
