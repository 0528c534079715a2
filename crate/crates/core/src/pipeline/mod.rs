//! End-to-end stages wiring extraction, selection, training and evaluation.

mod cv;
mod detector;
mod extract;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

pub use cv::{cross_validate, observations, ObservationRef};
pub use detector::{train_detectors, Detector, DetectorModel, GroupPrediction};
pub use extract::{extract_entry, extract_manifest, extract_signal, ExtractionFailure};

use crate::config::PipelineConfig;
use crate::dataset::Scenario;
use crate::error::{Error, Result};
use crate::features::{FeatureTable, UNLABELED};
use crate::matrix::Matrix;
use crate::selection::{select_features, LabeledShortTermSet, SelectionOutcome};
use crate::standardize::Standardizer;

/// How scenario data is turned into classifiers.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TrainMode {
    /// One model per scenario, each applied to its own scenario.
    PerPart,
    /// One model on the pooled scenarios.
    Single,
    /// One model per scenario, combined by majority vote.
    Ensemble,
}

impl TrainMode {
    pub const ALL: [TrainMode; 3] = [TrainMode::PerPart, TrainMode::Single, TrainMode::Ensemble];

    pub fn as_str(self) -> &'static str {
        match self {
            TrainMode::PerPart => "per-part",
            TrainMode::Single => "single",
            TrainMode::Ensemble => "ensemble",
        }
    }
}

impl fmt::Display for TrainMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for TrainMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "per-part" | "perpart" | "per_part" => Ok(TrainMode::PerPart),
            "single" => Ok(TrainMode::Single),
            "ensemble" => Ok(TrainMode::Ensemble),
            other => Err(Error::InvalidArgument(format!(
                "unknown training mode `{other}` (expected per-part, single or ensemble)"
            ))),
        }
    }
}

/// A labelled recording restricted to the selected short-term columns.
#[derive(Debug, Clone, PartialEq)]
pub struct Recording {
    pub id: String,
    pub patient_id: String,
    pub scenario: Scenario,
    pub frames: Matrix,
    pub labels: Vec<bool>,
    pub start_times: Vec<f64>,
}

impl Recording {
    /// Keeps the named columns of a fully labelled feature table,
    /// optionally z-scored within the recording.
    pub fn from_table(table: &FeatureTable, columns: &[String], normalize: bool) -> Result<Self> {
        table.validate()?;
        let scenario: Scenario = table.scenario.parse().map_err(|_| {
            Error::InvalidArgument(format!(
                "recording `{}` has no valid scenario tag (`{}`)",
                table.recording_id, table.scenario
            ))
        })?;
        if table.labels.contains(&UNLABELED) {
            return Err(Error::InvalidArgument(format!(
                "recording `{}` has unlabelled frames",
                table.recording_id
            )));
        }
        Ok(Self {
            id: table.recording_id.clone(),
            patient_id: table.patient_id.clone(),
            scenario,
            frames: select_columns(table, columns, normalize)?,
            labels: table.labels.iter().map(|&l| l == 1).collect(),
            start_times: table.start_times.clone(),
        })
    }
}

/// Z-scores each column over the rows of one recording; constant columns are centred only.
pub fn normalize_recording(frames: &Matrix) -> Result<Matrix> {
    if frames.rows() == 0 {
        return Ok(frames.clone());
    }
    Standardizer::fit_all(frames)?.transform(frames)
}

/// The named columns of a table, optionally normalised within the recording.
pub fn select_columns(table: &FeatureTable, columns: &[String], normalize: bool) -> Result<Matrix> {
    let m = table.matrix.select_cols(&column_indices(&table.names, columns)?);
    if normalize {
        normalize_recording(&m)
    } else {
        Ok(m)
    }
}

/// Positions of `wanted` within `names`.
pub fn column_indices(names: &[String], wanted: &[String]) -> Result<Vec<usize>> {
    wanted
        .iter()
        .map(|w| {
            names
                .iter()
                .position(|n| n == w)
                .ok_or_else(|| Error::InvalidArgument(format!("feature `{w}` missing from feature table")))
        })
        .collect()
}

/// Pools the labelled frames of each scenario.
pub fn selection_sets(tables: &[FeatureTable], normalize: bool) -> Result<[LabeledShortTermSet; 3]> {
    let names = tables.first().ok_or(Error::Empty("feature tables"))?.names.clone();
    let mut parts: Vec<(Matrix, Vec<bool>)> = (0..3).map(|_| (Matrix::zeros(0, names.len()), Vec::new())).collect();
    for t in tables {
        let rec = Recording::from_table(t, &names, normalize)?;
        let p = &mut parts[rec.scenario.index()];
        p.0.append(&rec.frames)?;
        p.1.extend(rec.labels);
    }
    let mut sets = Vec::with_capacity(3);
    for ((matrix, labels), scenario) in parts.into_iter().zip(Scenario::ALL) {
        if matrix.rows() == 0 {
            return Err(Error::InvalidArgument(format!("no recordings for scenario {scenario}")));
        }
        sets.push(LabeledShortTermSet::new(matrix, labels, scenario, names.clone())?);
    }
    let [a, b, c]: [LabeledShortTermSet; 3] = sets.try_into().map_err(|_| Error::Empty("scenario sets"))?;
    Ok([a, b, c])
}

/// Feature selection over the scenario pools of `tables`.
pub fn run_selection(tables: &[FeatureTable], config: &PipelineConfig) -> Result<SelectionOutcome> {
    select_features(
        &selection_sets(tables, config.normalize_recordings)?,
        &config.selection,
        config.seed,
    )
}
