use std::path::Path;

use super::model::SvmModel;
use crate::binio::{self, Writer};
use crate::dataset::Scenario;
use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::representation::RepresentationKind;

const MAGIC: &[u8; 4] = b"CENS";
const VERSION: u16 = 1;

/// Majority of three binary votes.
pub fn ensemble_vote(votes: [bool; 3]) -> bool {
    votes.iter().filter(|&&v| v).count() >= 2
}

/// Ensemble output for one observation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnsembleDecision {
    pub label: bool,
    /// Mean of the member decision values, used as a ranking score.
    pub score: f64,
    pub member_scores: [f64; 3],
}

/// Three scenario models combined by majority vote.
#[derive(Debug, Clone, PartialEq)]
pub struct EnsembleModel {
    /// Models for part1, part2 and part3, in that order.
    pub members: [SvmModel; 3],
    pub representation: RepresentationKind,
}

impl EnsembleModel {
    pub fn new(members: [SvmModel; 3], representation: RepresentationKind) -> Result<Self> {
        let d = members[0].input_dim();
        for m in &members[1..] {
            if m.input_dim() != d {
                return Err(Error::DimensionMismatch {
                    context: "ensemble member input",
                    expected: d,
                    actual: m.input_dim(),
                });
            }
        }
        Ok(Self {
            members,
            representation,
        })
    }

    pub fn member(&self, scenario: Scenario) -> &SvmModel {
        &self.members[scenario.index()]
    }

    pub fn input_dim(&self) -> usize {
        self.members[0].input_dim()
    }

    pub fn decide(&self, x: &[f64]) -> Result<EnsembleDecision> {
        let mut s = [0.0; 3];
        for (v, m) in s.iter_mut().zip(&self.members) {
            *v = m.decision(x)?;
        }
        Ok(EnsembleDecision {
            label: ensemble_vote([s[0] > 0.0, s[1] > 0.0, s[2] > 0.0]),
            score: s.iter().sum::<f64>() / 3.0,
            member_scores: s,
        })
    }

    pub fn decide_batch(&self, x: &Matrix) -> Result<Vec<EnsembleDecision>> {
        let per: Vec<Vec<f64>> = self
            .members
            .iter()
            .map(|m| m.decision_batch(x))
            .collect::<Result<_>>()?;
        Ok((0..x.rows())
            .map(|i| {
                let s = [per[0][i], per[1][i], per[2][i]];
                EnsembleDecision {
                    label: ensemble_vote([s[0] > 0.0, s[1] > 0.0, s[2] > 0.0]),
                    score: s.iter().sum::<f64>() / 3.0,
                    member_scores: s,
                }
            })
            .collect())
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let mut w = Writer::new();
        w.u8(self.representation.code());
        for m in &self.members {
            w.bytes(&m.to_bytes());
        }
        binio::seal(MAGIC, VERSION, &w.into_inner())
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        let (_, mut r) = binio::open("ensemble", MAGIC, VERSION, bytes)?;
        let representation = RepresentationKind::from_code(r.u8()?)
            .ok_or_else(|| Error::format("ensemble", "unknown representation code"))?;
        let a = SvmModel::from_bytes(r.bytes()?)?;
        let b = SvmModel::from_bytes(r.bytes()?)?;
        let c = SvmModel::from_bytes(r.bytes()?)?;
        r.finish()?;
        Self::new([a, b, c], representation)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        binio::write_atomic(path, &self.to_bytes())
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_bytes(&binio::read_file(path)?).map_err(|e| e.with_path(path))
    }
}
