//! Reduction of the short-term space to a small noise-robust subset.
//!
//! For each of several trials, a disjoint stratified sample is drawn from
//! every scenario, ReliefF ranks the features per scenario, and the three
//! rankings are merged by the seven-step combination. Features chosen in
//! enough trials form the final set.

mod combine;
mod mle;
mod relieff;
mod report;
mod sampling;

pub use combine::{combine_rankings, stability_vote, SelectionResult, N_STEPS};
pub use mle::intrinsic_dimension_mle;
pub use relieff::{min_max_scale, relieff_rank, relieff_weights, RankedFeatureSet};
pub use report::SelectionReport;
pub use sampling::{disjoint_stratified_samples, stratified_sample, MIN_CLASS_SIZE};

use serde::{Deserialize, Serialize};

use crate::dataset::Scenario;
use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::par;

/// Labelled short-term vectors of one scenario.
#[derive(Debug, Clone, PartialEq)]
pub struct LabeledShortTermSet {
    pub matrix: Matrix,
    /// `true` for cough.
    pub labels: Vec<bool>,
    pub scenario: Scenario,
    pub feature_names: Vec<String>,
}

impl LabeledShortTermSet {
    pub fn new(matrix: Matrix, labels: Vec<bool>, scenario: Scenario, feature_names: Vec<String>) -> Result<Self> {
        if labels.len() != matrix.rows() {
            return Err(Error::DimensionMismatch {
                context: "labels",
                expected: matrix.rows(),
                actual: labels.len(),
            });
        }
        if feature_names.len() != matrix.cols() {
            return Err(Error::DimensionMismatch {
                context: "feature names",
                expected: matrix.cols(),
                actual: feature_names.len(),
            });
        }
        if !matrix.all_finite() {
            return Err(Error::NonFinite("short-term feature matrix"));
        }
        if labels.iter().all(|&l| l) || labels.iter().all(|&l| !l) {
            return Err(Error::SingleClass("short-term set"));
        }
        Ok(Self {
            matrix,
            labels,
            scenario,
            feature_names,
        })
    }

    pub fn subset(&self, rows: &[usize]) -> Self {
        Self {
            matrix: self.matrix.select_rows(rows),
            labels: rows.iter().map(|&i| self.labels[i]).collect(),
            scenario: self.scenario,
            feature_names: self.feature_names.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SelectionConfig {
    /// Share of each scenario's observations drawn per trial.
    pub fraction: f64,
    pub trials: usize,
    pub min_votes: usize,
    /// Size of the per-scenario top sets tested for membership.
    pub top_size: usize,
    /// Number of features kept.
    pub n_keep: usize,
    pub k_neighbors: usize,
    pub mle_k_min: usize,
    pub mle_k_max: usize,
}

impl Default for SelectionConfig {
    fn default() -> Self {
        Self {
            fraction: 0.10,
            trials: 5,
            min_votes: 3,
            top_size: 30,
            n_keep: 29,
            k_neighbors: 10,
            mle_k_min: 6,
            mle_k_max: 12,
        }
    }
}

/// Everything the selection run produced.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SelectionOutcome {
    pub feature_names: Vec<String>,
    pub result: SelectionResult,
    pub trials: Vec<SelectionResult>,
    /// `rankings[t][p]`: ranking of scenario `p` in trial `t`.
    pub rankings: Vec<Vec<RankedFeatureSet>>,
    /// Intrinsic-dimension estimate per trial and scenario; `None` when the
    /// sample was too small or degenerate.
    pub intrinsic_dimension: Vec<Vec<Option<f64>>>,
}

impl SelectionOutcome {
    pub fn selected_names(&self) -> Vec<String> {
        self.result.names(&self.feature_names)
    }
}

fn scenario_seed(seed: u64, scenario: Scenario) -> u64 {
    seed ^ (0x9E37_79B9_7F4A_7C15u64.wrapping_mul(scenario.index() as u64 + 1))
}

/// Runs sampling, ranking, combination and voting over the three scenario sets.
pub fn select_features(
    parts: &[LabeledShortTermSet; 3],
    config: &SelectionConfig,
    seed: u64,
) -> Result<SelectionOutcome> {
    let names = &parts[0].feature_names;
    for p in &parts[1..] {
        if &p.feature_names != names {
            return Err(Error::InvalidArgument(
                "scenario sets have different feature columns".into(),
            ));
        }
    }
    for (p, s) in parts.iter().zip(Scenario::ALL) {
        if p.scenario != s {
            return Err(Error::InvalidArgument(format!(
                "scenario sets must be ordered part1, part2, part3; found {} at {s}",
                p.scenario
            )));
        }
    }
    let draws = parts
        .iter()
        .map(|p| {
            disjoint_stratified_samples(
                &p.labels,
                config.fraction,
                config.trials,
                scenario_seed(seed, p.scenario),
            )
        })
        .collect::<Result<Vec<_>>>()?;
    let jobs: Vec<(usize, usize)> = (0..config.trials).flat_map(|t| (0..3).map(move |p| (t, p))).collect();
    let ranked = par::map(&jobs, |&(t, p)| -> Result<(RankedFeatureSet, Option<f64>)> {
        let sample = parts[p].subset(&draws[p][t]);
        let ranking = relieff_rank(&sample.matrix, &sample.labels, sample.scenario, config.k_neighbors)?;
        let id = intrinsic_dimension_mle(&min_max_scale(&sample.matrix), config.mle_k_min, config.mle_k_max).ok();
        Ok((ranking, id))
    });
    let mut rankings = vec![Vec::with_capacity(3); config.trials];
    let mut dims = vec![Vec::with_capacity(3); config.trials];
    for (r, &(t, _)) in ranked.into_iter().zip(&jobs) {
        let (ranking, id) = r?;
        rankings[t].push(ranking);
        dims[t].push(id);
    }
    let trials = rankings
        .iter()
        .map(|r| combine_rankings([&r[0], &r[1], &r[2]], config.top_size, config.n_keep))
        .collect::<Result<Vec<_>>>()?;
    let result = stability_vote(&trials, config.min_votes, config.n_keep)?;
    Ok(SelectionOutcome {
        feature_names: names.clone(),
        result,
        trials,
        rankings,
        intrinsic_dimension: dims,
    })
}
