//! Train/test partitions over long-term observations.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::ops::Range;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::dataset::Scenario;
use crate::dsp::GROUP_STRIDE;
use crate::error::{Error, Result};

/// Number of blocks in the block-wise scheme.
pub const N_BLOCKS: usize = 5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PartitionScheme {
    /// Five contiguous blocks per recording stream.
    #[default]
    Block5,
    /// Leave one patient out.
    Lopo,
}

impl PartitionScheme {
    pub fn as_str(self) -> &'static str {
        match self {
            PartitionScheme::Block5 => "block5",
            PartitionScheme::Lopo => "lopo",
        }
    }
}

impl fmt::Display for PartitionScheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for PartitionScheme {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "block5" => Ok(PartitionScheme::Block5),
            "lopo" => Ok(PartitionScheme::Lopo),
            other => Err(Error::InvalidArgument(format!(
                "unknown partition scheme `{other}` (expected block5 or lopo)"
            ))),
        }
    }
}

/// Where a long-term observation comes from.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ObservationTag {
    /// Recording stream the observation belongs to.
    pub stream: usize,
    pub patient_id: String,
    pub scenario: Scenario,
    /// Short-term frame indices covered, within the stream.
    pub frames: Range<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Fold {
    pub name: String,
    pub train: Vec<usize>,
    pub test: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PartitionPlan {
    pub scheme: PartitionScheme,
    pub folds: Vec<Fold>,
    /// Observations left out of every fold (streams too short to split).
    pub excluded: Vec<usize>,
}

/// Sizes of five near-equal contiguous blocks, remainder on the leading blocks.
pub fn block_sizes(n: usize) -> [usize; N_BLOCKS] {
    let (base, extra) = (n / N_BLOCKS, n % N_BLOCKS);
    std::array::from_fn(|i| base + usize::from(i < extra))
}

fn overlaps(a: &Range<usize>, b: &Range<usize>) -> bool {
    a.start < b.end && b.start < a.end
}

/// Block-wise partition: fold `i` tests block `i` of every stream.
///
/// Training observations whose frames overlap the test block of their own
/// stream, widened by `guard_groups` long-term strides on each side, are
/// left out of that fold's training set.
pub fn block5_partition(tags: &[ObservationTag], guard_groups: usize) -> Result<PartitionPlan> {
    if tags.is_empty() {
        return Err(Error::Empty("observations to partition"));
    }
    let mut streams: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for (i, t) in tags.iter().enumerate() {
        streams.entry(t.stream).or_default().push(i);
    }
    let mut excluded = Vec::new();
    // block index of each observation, and per (fold, stream) the guarded test span
    let mut block_of = vec![usize::MAX; tags.len()];
    let mut guarded: Vec<BTreeMap<usize, Range<usize>>> = vec![BTreeMap::new(); N_BLOCKS];
    let guard = guard_groups * GROUP_STRIDE;
    for (&stream, members) in streams.iter_mut() {
        if members.len() < N_BLOCKS {
            log::warn!(
                "stream {stream} has {} long-term observations, fewer than {N_BLOCKS}; excluded from block partitions",
                members.len()
            );
            excluded.extend(members.iter().copied());
            continue;
        }
        members.sort_by_key(|&i| (tags[i].frames.start, i));
        let mut pos = 0;
        for (b, size) in block_sizes(members.len()).into_iter().enumerate() {
            let block = &members[pos..pos + size];
            pos += size;
            let lo = block.iter().map(|&i| tags[i].frames.start).min().unwrap_or(0);
            let hi = block.iter().map(|&i| tags[i].frames.end).max().unwrap_or(0);
            guarded[b].insert(stream, lo.saturating_sub(guard)..hi + guard);
            for &i in block {
                block_of[i] = b;
            }
        }
    }
    if excluded.len() == tags.len() {
        return Err(Error::InvalidArgument(format!(
            "no stream has at least {N_BLOCKS} long-term observations"
        )));
    }
    excluded.sort_unstable();
    let folds = (0..N_BLOCKS)
        .map(|b| {
            let mut train = Vec::new();
            let mut test = Vec::new();
            for (i, t) in tags.iter().enumerate() {
                match block_of[i] {
                    usize::MAX => {}
                    x if x == b => test.push(i),
                    _ => {
                        if !guarded[b].get(&t.stream).is_some_and(|g| overlaps(g, &t.frames)) {
                            train.push(i);
                        }
                    }
                }
            }
            Fold {
                name: format!("block {}", b + 1),
                train,
                test,
            }
        })
        .collect();
    Ok(PartitionPlan {
        scheme: PartitionScheme::Block5,
        folds,
        excluded,
    })
}

/// One fold per patient, ordered by patient id.
pub fn lopo_partition(tags: &[ObservationTag]) -> Result<PartitionPlan> {
    let patients: BTreeSet<&str> = tags.iter().map(|t| t.patient_id.as_str()).collect();
    if patients.len() < 2 {
        return Err(Error::InvalidArgument(format!(
            "leave-one-patient-out needs at least 2 patients, found {}",
            patients.len()
        )));
    }
    let folds = patients
        .into_iter()
        .map(|p| {
            let (test, train): (Vec<usize>, Vec<usize>) = (0..tags.len()).partition(|&i| tags[i].patient_id == p);
            Fold {
                name: format!("patient {p}"),
                train,
                test,
            }
        })
        .collect();
    Ok(PartitionPlan {
        scheme: PartitionScheme::Lopo,
        folds,
        excluded: Vec::new(),
    })
}

pub fn partition(scheme: PartitionScheme, tags: &[ObservationTag], guard_groups: usize) -> Result<PartitionPlan> {
    match scheme {
        PartitionScheme::Block5 => block5_partition(tags, guard_groups),
        PartitionScheme::Lopo => lopo_partition(tags),
    }
}
