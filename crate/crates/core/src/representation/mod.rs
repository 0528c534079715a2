//! Long-term observations over five-frame groups.
//!
//! Two encodings are available: feature-wise mean and standard deviation
//! (AvgSD), or a histogram of nearest audio words from a supervised codebook
//! (BoAW).

mod codebook;
mod kmeans;

pub use codebook::Codebook;
pub use kmeans::{nearest_centroid, KMeans, KMeansConfig};

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::dsp::{build_long_term, LongTermGroup, GROUP_LEN};
use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::par;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RepresentationKind {
    AvgSd,
    Boaw,
}

impl RepresentationKind {
    pub fn as_str(self) -> &'static str {
        match self {
            Self::AvgSd => "avgsd",
            Self::Boaw => "boaw",
        }
    }

    pub fn code(self) -> u8 {
        match self {
            Self::AvgSd => 0,
            Self::Boaw => 1,
        }
    }

    pub fn from_code(code: u8) -> Option<Self> {
        match code {
            0 => Some(Self::AvgSd),
            1 => Some(Self::Boaw),
            _ => None,
        }
    }
}

impl fmt::Display for RepresentationKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for RepresentationKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "avgsd" => Ok(Self::AvgSd),
            "boaw" => Ok(Self::Boaw),
            other => Err(Error::InvalidArgument(format!(
                "unknown representation `{other}` (expected avgsd or boaw)"
            ))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RepresentationConfig {
    pub kind: RepresentationKind,
    pub k_pos: usize,
    pub k_neg: usize,
    pub kmeans: KMeansConfig,
}

impl Default for RepresentationConfig {
    fn default() -> Self {
        Self {
            kind: RepresentationKind::AvgSd,
            k_pos: 16,
            k_neg: 16,
            kmeans: KMeansConfig::default(),
        }
    }
}

/// Feature-wise mean followed by population standard deviation.
pub fn avgsd<R: AsRef<[f64]>>(group: &[R]) -> Result<Vec<f64>> {
    if group.len() != GROUP_LEN {
        return Err(Error::DimensionMismatch {
            context: "long-term group frames",
            expected: GROUP_LEN,
            actual: group.len(),
        });
    }
    let d = group[0].as_ref().len();
    let mut out = vec![0.0; 2 * d];
    for f in group {
        let f = f.as_ref();
        if f.len() != d {
            return Err(Error::DimensionMismatch {
                context: "long-term group frame",
                expected: d,
                actual: f.len(),
            });
        }
        for (m, v) in out[..d].iter_mut().zip(f) {
            *m += v;
        }
    }
    let n = group.len() as f64;
    out[..d].iter_mut().for_each(|m| *m /= n);
    for f in group {
        for j in 0..d {
            out[d + j] += (f.as_ref()[j] - out[j]).powi(2);
        }
    }
    out[d..].iter_mut().for_each(|s| *s = (*s / n).sqrt());
    Ok(out)
}

/// Majority label of a group's frames.
pub fn label_group(labels: &[bool]) -> Result<bool> {
    if labels.len() != GROUP_LEN {
        return Err(Error::DimensionMismatch {
            context: "long-term group labels",
            expected: GROUP_LEN,
            actual: labels.len(),
        });
    }
    Ok(2 * labels.iter().filter(|&&l| l).count() > labels.len())
}

/// Encodes one group of short-term vectors.
pub enum Encoder<'a> {
    AvgSd,
    Boaw(&'a Codebook),
}

impl Encoder<'_> {
    pub fn kind(&self) -> RepresentationKind {
        match self {
            Self::AvgSd => RepresentationKind::AvgSd,
            Self::Boaw(_) => RepresentationKind::Boaw,
        }
    }

    pub fn output_dim(&self, short_term_dim: usize) -> usize {
        match self {
            Self::AvgSd => 2 * short_term_dim,
            Self::Boaw(cb) => cb.len(),
        }
    }

    pub fn encode<R: AsRef<[f64]>>(&self, group: &[R]) -> Result<Vec<f64>> {
        match self {
            Self::AvgSd => avgsd(group),
            Self::Boaw(cb) => {
                if group.len() != GROUP_LEN {
                    return Err(Error::DimensionMismatch {
                        context: "long-term group frames",
                        expected: GROUP_LEN,
                        actual: group.len(),
                    });
                }
                cb.encode(group)
            }
        }
    }
}

/// Long-term observations of one recording.
#[derive(Debug, Clone, PartialEq)]
pub struct LongTermBlock {
    pub matrix: Matrix,
    pub labels: Vec<bool>,
    pub groups: Vec<LongTermGroup>,
}

/// Encodes every five-frame group of `frames` (rows are short-term vectors).
pub fn encode_groups(frames: &Matrix, frame_labels: &[bool], encoder: &Encoder) -> Result<LongTermBlock> {
    if frame_labels.len() != frames.rows() {
        return Err(Error::DimensionMismatch {
            context: "frame labels",
            expected: frames.rows(),
            actual: frame_labels.len(),
        });
    }
    let groups = build_long_term(frames.rows());
    let dim = encoder.output_dim(frames.cols());
    let rows = par::map(&groups, |g| {
        let rows: Vec<&[f64]> = g.frames().map(|i| frames.row(i)).collect();
        encoder.encode(&rows)
    });
    let mut data = Vec::with_capacity(groups.len() * dim);
    for r in rows {
        data.extend(r?);
    }
    let labels = groups
        .iter()
        .map(|g| label_group(&frame_labels[g.frames()]))
        .collect::<Result<Vec<_>>>()?;
    Ok(LongTermBlock {
        matrix: Matrix::new(groups.len(), dim, data)?,
        labels,
        groups,
    })
}
