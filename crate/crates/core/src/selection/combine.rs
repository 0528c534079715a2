//! Merging the three per-scenario rankings and voting across trials.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::relieff::RankedFeatureSet;
use crate::error::{Error, Result};

/// Number of combination steps.
pub const N_STEPS: u8 = 7;

/// Membership pattern admitted at each step, as (in part1, in part2, in part3).
const STEP_PATTERNS: [(bool, bool, bool); N_STEPS as usize] = [
    (true, true, true),
    (false, true, true),
    (true, false, true),
    (true, true, false),
    (false, false, true),
    (false, true, false),
    (true, false, false),
];

/// Selected features with the step that admitted each one.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SelectionResult {
    /// Feature indices in admission order.
    pub selected: Vec<usize>,
    /// Combination step (1 to 7) per selected feature.
    pub provenance: Vec<u8>,
    /// Number of trials (0 to 5) selecting each feature; empty for a single trial.
    pub trial_votes: Vec<u8>,
}

impl SelectionResult {
    pub fn len(&self) -> usize {
        self.selected.len()
    }

    pub fn is_empty(&self) -> bool {
        self.selected.is_empty()
    }

    pub fn names(&self, feature_names: &[String]) -> Vec<String> {
        self.selected.iter().map(|&f| feature_names[f].clone()).collect()
    }
}

/// Step 1 to 7 for a membership pattern, `None` outside all top sets.
fn step_of(membership: (bool, bool, bool)) -> Option<u8> {
    STEP_PATTERNS.iter().position(|&p| p == membership).map(|s| s as u8 + 1)
}

/// Admits features from the three top sets in step order until `target`
/// are chosen. Membership means being in the best `top_size` of a part.
/// Within a step features are ordered by part-3 weight, then part-2, then
/// part-1 (all descending), then by index.
pub fn combine_rankings(parts: [&RankedFeatureSet; 3], top_size: usize, target: usize) -> Result<SelectionResult> {
    let d = parts[0].weights.len();
    for p in &parts[1..] {
        if p.weights.len() != d {
            return Err(Error::DimensionMismatch {
                context: "ranked feature sets",
                expected: d,
                actual: p.weights.len(),
            });
        }
    }
    for p in &parts {
        if p.ranking.len() < target {
            return Err(Error::SelectionShortfall {
                available: p.ranking.len(),
                target,
            });
        }
    }
    let mut member = vec![[false; 3]; d];
    for (pi, p) in parts.iter().enumerate() {
        for &f in p.top(top_size) {
            member[f][pi] = true;
        }
    }
    let mut candidates: Vec<(u8, usize)> = (0..d)
        .filter_map(|f| step_of((member[f][0], member[f][1], member[f][2])).map(|s| (s, f)))
        .collect();
    if candidates.len() < target {
        return Err(Error::SelectionShortfall {
            available: candidates.len(),
            target,
        });
    }
    let w = |pi: usize, f: usize| parts[pi].weights[f];
    candidates.sort_by(|&(sa, a), &(sb, b)| {
        sa.cmp(&sb)
            .then(w(2, b).total_cmp(&w(2, a)))
            .then(w(1, b).total_cmp(&w(1, a)))
            .then(w(0, b).total_cmp(&w(0, a)))
            .then(a.cmp(&b))
    });
    candidates.truncate(target);
    Ok(SelectionResult {
        selected: candidates.iter().map(|&(_, f)| f).collect(),
        provenance: candidates.iter().map(|&(s, _)| s).collect(),
        trial_votes: Vec::new(),
    })
}

/// Keeps features chosen in at least `min_votes` trials, ordered by votes
/// (descending), mean step, mean position within the trial, then index,
/// and truncated at `target`. The reported step is the rounded mean step.
pub fn stability_vote(trials: &[SelectionResult], min_votes: usize, target: usize) -> Result<SelectionResult> {
    if trials.is_empty() {
        return Err(Error::Empty("selection trials"));
    }
    // feature -> (votes, step sum, position sum)
    let mut tally: BTreeMap<usize, (usize, f64, f64)> = BTreeMap::new();
    for t in trials {
        for (pos, (&f, &step)) in t.selected.iter().zip(&t.provenance).enumerate() {
            let e = tally.entry(f).or_insert((0, 0.0, 0.0));
            e.0 += 1;
            e.1 += step as f64;
            e.2 += pos as f64;
        }
    }
    let mut kept: Vec<(usize, usize, f64, f64)> = tally
        .into_iter()
        .filter(|(_, (v, _, _))| *v >= min_votes)
        .map(|(f, (v, s, p))| (f, v, s / v as f64, p / v as f64))
        .collect();
    kept.sort_by(|a, b| {
        b.1.cmp(&a.1)
            .then(a.2.total_cmp(&b.2))
            .then(a.3.total_cmp(&b.3))
            .then(a.0.cmp(&b.0))
    });
    kept.truncate(target);
    if kept.len() < target {
        log::warn!("stability vote kept {} features, target {target}", kept.len());
    }
    Ok(SelectionResult {
        selected: kept.iter().map(|k| k.0).collect(),
        provenance: kept.iter().map(|k| k.2.round() as u8).collect(),
        trial_votes: kept.iter().map(|k| k.1 as u8).collect(),
    })
}
