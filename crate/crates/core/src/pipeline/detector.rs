use std::collections::BTreeSet;
use std::path::Path;

use serde::Serialize;

use super::cv::ObservationRef;
use super::{select_columns, Recording, TrainMode};
use crate::binio::{self, Writer};
use crate::classifier::{EnsembleModel, SvmConfig, SvmModel};
use crate::config::PipelineConfig;
use crate::dataset::Scenario;
use crate::dsp::{build_long_term, FrameLayout};
use crate::error::{Error, Result};
use crate::features::FeatureTable;
use crate::matrix::Matrix;
use crate::par;
use crate::representation::{label_group, Codebook, Encoder, RepresentationKind};

const MAGIC: &[u8; 4] = b"CDET";
const VERSION: u16 = 1;

#[derive(Debug, Clone, PartialEq)]
pub enum DetectorModel {
    Single(SvmModel),
    Ensemble(EnsembleModel),
}

/// Everything needed to go from short-term features to long-term decisions.
#[derive(Debug, Clone, PartialEq)]
pub struct Detector {
    /// Short-term columns consumed, in order.
    pub features: Vec<String>,
    pub representation: RepresentationKind,
    /// Whether input columns are z-scored within each recording first.
    pub normalize_recordings: bool,
    pub codebook: Option<Codebook>,
    /// Scenario a per-part model was trained on.
    pub scenario: Option<Scenario>,
    pub model: DetectorModel,
}

/// Decision for one long-term group of a recording.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GroupPrediction {
    pub group: usize,
    pub start_s: f64,
    pub end_s: f64,
    pub score: f64,
    pub label: bool,
    /// Majority frame label when the input carries ground truth.
    pub truth: Option<bool>,
}

/// Short-term frames of the groups in `obs`, each frame once, split by label.
fn class_frames(recs: &[Recording], obs: &[ObservationRef]) -> Result<(Matrix, Matrix)> {
    let frames: BTreeSet<(usize, usize)> = obs
        .iter()
        .flat_map(|o| o.group.frames().map(move |f| (o.rec, f)))
        .collect();
    let dim = recs.first().map_or(0, |r| r.frames.cols());
    let (mut pos, mut neg) = (Vec::new(), Vec::new());
    for (r, f) in frames {
        let row = recs[r].frames.row(f);
        if recs[r].labels[f] {
            pos.extend_from_slice(row)
        } else {
            neg.extend_from_slice(row)
        }
    }
    Ok((
        Matrix::new(pos.len() / dim.max(1), dim, pos)?,
        Matrix::new(neg.len() / dim.max(1), dim, neg)?,
    ))
}

fn encoder_for<'a>(kind: RepresentationKind, codebook: Option<&'a Codebook>) -> Result<Encoder<'a>> {
    match (kind, codebook) {
        (RepresentationKind::AvgSd, _) => Ok(Encoder::AvgSd),
        (RepresentationKind::Boaw, Some(cb)) => Ok(Encoder::Boaw(cb)),
        (RepresentationKind::Boaw, None) => {
            Err(Error::InvalidArgument("bag-of-words detector without codebook".into()))
        }
    }
}

/// Long-term vectors and labels of `obs`.
pub(crate) fn encode_observations(
    recs: &[Recording],
    obs: &[ObservationRef],
    encoder: &Encoder,
) -> Result<(Matrix, Vec<bool>)> {
    let dim = encoder.output_dim(recs.first().map_or(0, |r| r.frames.cols()));
    let rows = par::map(obs, |o| -> Result<(Vec<f64>, bool)> {
        let r = &recs[o.rec];
        let frames: Vec<&[f64]> = o.group.frames().map(|f| r.frames.row(f)).collect();
        Ok((encoder.encode(&frames)?, label_group(&r.labels[o.group.frames()])?))
    });
    let mut data = Vec::with_capacity(obs.len() * dim);
    let mut labels = Vec::with_capacity(obs.len());
    for r in rows {
        let (row, l) = r?;
        data.extend(row);
        labels.push(l);
    }
    Ok((Matrix::new(obs.len(), dim, data)?, labels))
}

fn train_svm(x: &Matrix, y: &[bool], svm: &SvmConfig, what: &str) -> Result<SvmModel> {
    SvmModel::train(x, y, svm).map_err(|e| match e {
        Error::SingleClass(_) => Error::InvalidArgument(format!("{what}: training data holds a single class")),
        other => other,
    })
}

impl Detector {
    /// Trains a single-model or ensemble detector on the observations `obs`.
    ///
    /// The bag-of-words codebook, when used, is built from the frames of
    /// `obs` only and shared by every ensemble member.
    pub fn train(
        recs: &[Recording],
        obs: &[ObservationRef],
        mode: TrainMode,
        features: &[String],
        config: &PipelineConfig,
    ) -> Result<Self> {
        let (representation, svm, seed) = (&config.representation, &config.svm, config.seed);
        if obs.is_empty() {
            return Err(Error::Empty("training observations"));
        }
        let codebook = match representation.kind {
            RepresentationKind::AvgSd => None,
            RepresentationKind::Boaw => {
                let (pos, neg) = class_frames(recs, obs)?;
                Some(Codebook::build(
                    &pos,
                    &neg,
                    representation.k_pos,
                    representation.k_neg,
                    seed,
                    &representation.kmeans,
                )?)
            }
        };
        let encoder = encoder_for(representation.kind, codebook.as_ref())?;
        let (x, y) = encode_observations(recs, obs, &encoder)?;
        let model = match mode {
            TrainMode::Single => DetectorModel::Single(train_svm(&x, &y, svm, "single model")?),
            TrainMode::Ensemble => {
                let members = par::map(&Scenario::ALL, |&s| {
                    let rows: Vec<usize> = (0..obs.len()).filter(|&i| recs[obs[i].rec].scenario == s).collect();
                    if rows.is_empty() {
                        return Err(Error::InvalidArgument(format!("ensemble: no training data for {s}")));
                    }
                    let ys: Vec<bool> = rows.iter().map(|&i| y[i]).collect();
                    train_svm(&x.select_rows(&rows), &ys, svm, &format!("ensemble member {s}"))
                });
                let [a, b, c]: [Result<SvmModel>; 3] =
                    members.try_into().map_err(|_| Error::Empty("ensemble members"))?;
                DetectorModel::Ensemble(EnsembleModel::new([a?, b?, c?], representation.kind)?)
            }
            TrainMode::PerPart => {
                return Err(Error::InvalidArgument(
                    "per-part training yields one detector per scenario; use train_detectors".into(),
                ))
            }
        };
        Ok(Self {
            features: features.to_vec(),
            representation: representation.kind,
            normalize_recordings: config.normalize_recordings,
            codebook,
            scenario: None,
            model,
        })
    }

    pub fn encoder(&self) -> Result<Encoder<'_>> {
        encoder_for(self.representation, self.codebook.as_ref())
    }

    /// Label and score of each row of long-term vectors.
    pub fn score(&self, x: &Matrix) -> Result<Vec<(bool, f64)>> {
        match &self.model {
            DetectorModel::Single(m) => Ok(m.decision_batch(x)?.into_iter().map(|d| (d > 0.0, d)).collect()),
            DetectorModel::Ensemble(e) => Ok(e.decide_batch(x)?.into_iter().map(|d| (d.label, d.score)).collect()),
        }
    }

    /// Scores observations of prepared recordings.
    pub fn score_observations(&self, recs: &[Recording], obs: &[ObservationRef]) -> Result<Vec<(bool, f64)>> {
        if obs.is_empty() {
            return Ok(Vec::new());
        }
        let (x, _) = encode_observations(recs, obs, &self.encoder()?)?;
        self.score(&x)
    }

    /// Decisions for every long-term group of a feature table.
    pub fn predict_table(&self, table: &FeatureTable, layout: &FrameLayout) -> Result<Vec<GroupPrediction>> {
        table.validate()?;
        let missing: Vec<&str> = self
            .features
            .iter()
            .filter(|f| !table.names.contains(f))
            .map(String::as_str)
            .collect();
        if !missing.is_empty() {
            return Err(Error::InvalidArgument(format!(
                "model expects {} features but `{}` has {} columns and lacks {}",
                self.features.len(),
                table.recording_id,
                table.names.len(),
                missing.join(", ")
            )));
        }
        let frames = select_columns(table, &self.features, self.normalize_recordings)?;
        let encoder = self.encoder()?;
        let groups = build_long_term(frames.rows());
        let rows = par::map(&groups, |g| {
            let rows: Vec<&[f64]> = g.frames().map(|f| frames.row(f)).collect();
            encoder.encode(&rows)
        });
        let mut data = Vec::new();
        for r in rows {
            data.extend(r?);
        }
        let x = Matrix::new(groups.len(), encoder.output_dim(frames.cols()), data)?;
        let scored = self.score(&x)?;
        Ok(groups
            .iter()
            .zip(scored)
            .map(|(g, (label, score))| {
                let truth_labels = &table.labels[g.frames()];
                let truth = if truth_labels.iter().all(|&l| l <= 1) {
                    label_group(&truth_labels.iter().map(|&l| l == 1).collect::<Vec<_>>()).ok()
                } else {
                    None
                };
                GroupPrediction {
                    group: g.index,
                    start_s: table.start_times[g.first],
                    end_s: table.start_times[g.last()] + layout.frame_seconds(),
                    score,
                    label,
                    truth,
                }
            })
            .collect())
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let mut w = Writer::new();
        w.u8(match self.model {
            DetectorModel::Single(_) => 0,
            DetectorModel::Ensemble(_) => 1,
        })
        .u8(self.scenario.map_or(u8::MAX, |s| s.index() as u8))
        .u8(self.representation.code())
        .u8(u8::from(self.normalize_recordings))
        .u64(self.features.len() as u64);
        for f in &self.features {
            w.str(f);
        }
        match &self.codebook {
            Some(cb) => w.u8(1).bytes(&cb.to_bytes()),
            None => w.u8(0),
        };
        match &self.model {
            DetectorModel::Single(m) => w.bytes(&m.to_bytes()),
            DetectorModel::Ensemble(e) => w.bytes(&e.to_bytes()),
        };
        binio::seal(MAGIC, VERSION, &w.into_inner())
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        let (_, mut r) = binio::open("detector", MAGIC, VERSION, bytes)?;
        let kind = r.u8()?;
        let scenario = match r.u8()? {
            u8::MAX => None,
            i => Some(
                *Scenario::ALL
                    .get(i as usize)
                    .ok_or_else(|| Error::format("detector", "bad scenario code"))?,
            ),
        };
        let representation = RepresentationKind::from_code(r.u8()?)
            .ok_or_else(|| Error::format("detector", "unknown representation code"))?;
        let normalize_recordings = match r.u8()? {
            0 => false,
            1 => true,
            _ => return Err(Error::format("detector", "bad normalization flag")),
        };
        let n = r.usize()?;
        if n > r.remaining() {
            return Err(Error::format("detector", "feature count exceeds file size"));
        }
        let features = (0..n).map(|_| r.str()).collect::<Result<Vec<_>>>()?;
        let codebook = match r.u8()? {
            0 => None,
            1 => Some(Codebook::from_bytes(r.bytes()?)?),
            _ => return Err(Error::format("detector", "bad codebook flag")),
        };
        let model = match kind {
            0 => DetectorModel::Single(SvmModel::from_bytes(r.bytes()?)?),
            1 => DetectorModel::Ensemble(EnsembleModel::from_bytes(r.bytes()?)?),
            _ => return Err(Error::format("detector", "unknown model kind")),
        };
        r.finish()?;
        let d = Self {
            features,
            representation,
            normalize_recordings,
            codebook,
            scenario,
            model,
        };
        let expected = d.encoder()?.output_dim(d.features.len());
        let actual = match &d.model {
            DetectorModel::Single(m) => m.input_dim(),
            DetectorModel::Ensemble(e) => e.input_dim(),
        };
        if expected != actual {
            return Err(Error::format(
                "detector",
                format!("model expects {actual} inputs but the representation gives {expected}"),
            ));
        }
        Ok(d)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        binio::write_atomic(path, &self.to_bytes())
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_bytes(&binio::read_file(path)?).map_err(|e| e.with_path(path))
    }
}

/// Trains the detectors of `mode`: three for per-part, one otherwise.
pub fn train_detectors(
    recs: &[Recording],
    obs: &[ObservationRef],
    mode: TrainMode,
    features: &[String],
    config: &PipelineConfig,
) -> Result<Vec<Detector>> {
    match mode {
        TrainMode::PerPart => Scenario::ALL
            .iter()
            .map(|&s| {
                let part: Vec<ObservationRef> = obs.iter().copied().filter(|o| recs[o.rec].scenario == s).collect();
                let mut d = Detector::train(recs, &part, TrainMode::Single, features, config).map_err(|e| match e {
                    Error::Empty(_) => Error::InvalidArgument(format!("per-part: no training data for {s}")),
                    other => other,
                })?;
                d.scenario = Some(s);
                Ok(d)
            })
            .collect(),
        _ => Ok(vec![Detector::train(recs, obs, mode, features, config)?]),
    }
}
