//! Pipeline configuration in TOML.
//!
//! Every section is optional; missing keys take the documented defaults.
//! Unknown keys are rejected so typos surface early.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::binio;
use crate::classifier::SvmConfig;
use crate::error::{Error, Result};
use crate::evaluation::PartitionScheme;
use crate::features::ExtractionConfig;
use crate::pipeline::TrainMode;
use crate::representation::RepresentationConfig;
use crate::selection::SelectionConfig;
use crate::synth::SynthConfig;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct TrainingConfig {
    pub mode: TrainMode,
}

impl Default for TrainingConfig {
    fn default() -> Self {
        Self {
            mode: TrainMode::Ensemble,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct EvaluationConfig {
    pub scheme: PartitionScheme,
    /// Extra long-term strides dropped from training around each test block.
    pub guard_groups: usize,
    /// Training modes cross-validated side by side.
    pub modes: Vec<TrainMode>,
}

impl Default for EvaluationConfig {
    fn default() -> Self {
        Self {
            scheme: PartitionScheme::Block5,
            guard_groups: 0,
            modes: vec![TrainMode::Ensemble, TrainMode::PerPart, TrainMode::Single],
        }
    }
}

/// Artifact locations, relative to the output directory unless absolute.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PathsConfig {
    pub corpus: PathBuf,
    pub features: PathBuf,
    pub selection: PathBuf,
    pub models: PathBuf,
    pub predictions: PathBuf,
    pub reports: PathBuf,
}

impl Default for PathsConfig {
    fn default() -> Self {
        Self {
            corpus: "corpus".into(),
            features: "features".into(),
            selection: "selection".into(),
            models: "models".into(),
            predictions: "predictions".into(),
            reports: "reports".into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PipelineConfig {
    /// Master seed for sampling, clustering and corpus generation.
    pub seed: u64,
    /// Z-score every short-term column within each recording before
    /// selection and lifting. Off reproduces the reference pipeline.
    pub normalize_recordings: bool,
    pub extraction: ExtractionConfig,
    pub selection: SelectionConfig,
    pub representation: RepresentationConfig,
    pub svm: SvmConfig,
    pub training: TrainingConfig,
    pub evaluation: EvaluationConfig,
    pub synth: SynthConfig,
    pub paths: PathsConfig,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        Self {
            seed: 42,
            normalize_recordings: false,
            extraction: ExtractionConfig::default(),
            selection: SelectionConfig::default(),
            representation: RepresentationConfig::default(),
            svm: SvmConfig::default(),
            training: TrainingConfig::default(),
            evaluation: EvaluationConfig::default(),
            synth: SynthConfig::default(),
            paths: PathsConfig::default(),
        }
    }
}

impl PipelineConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn to_toml(&self) -> Result<String> {
        toml::to_string_pretty(self).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_toml(&binio::read_text(path)?).map_err(|e| match e {
            Error::Config(msg) => Error::Config(format!("{}: {msg}", path.display())),
            other => other,
        })
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        binio::write_atomic(path, self.to_toml()?.as_bytes())
    }

    /// Resolves an artifact path against `output_dir`.
    pub fn resolve(output_dir: &Path, p: &Path) -> PathBuf {
        if p.is_absolute() {
            p.to_path_buf()
        } else {
            output_dir.join(p)
        }
    }
}
