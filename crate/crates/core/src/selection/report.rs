//! Selection report: a text table for people and JSON for later stages.

use std::fmt::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::SelectionOutcome;
use crate::binio;
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportRow {
    pub name: String,
    pub index: usize,
    /// Mean 1-based rank in part1, part2, part3 over the trials.
    pub mean_rank: [f64; 3],
    pub step: u8,
    pub votes: u8,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SelectionReport {
    pub selected_names: Vec<String>,
    pub rows: Vec<ReportRow>,
    pub trials: usize,
    /// Mean intrinsic-dimension estimate over trials and scenarios.
    pub intrinsic_dimension: Option<f64>,
}

impl SelectionReport {
    pub fn from_outcome(outcome: &SelectionOutcome) -> Self {
        let trials = outcome.rankings.len();
        let rows = outcome
            .result
            .selected
            .iter()
            .enumerate()
            .map(|(i, &f)| {
                let mut mean_rank = [0.0; 3];
                for (p, r) in mean_rank.iter_mut().enumerate() {
                    let sum: usize = outcome
                        .rankings
                        .iter()
                        .map(|t| t[p].rank_of(f).unwrap_or(t[p].ranking.len()))
                        .sum();
                    *r = sum as f64 / trials.max(1) as f64;
                }
                ReportRow {
                    name: outcome.feature_names[f].clone(),
                    index: f,
                    mean_rank,
                    step: outcome.result.provenance[i],
                    votes: outcome.result.trial_votes.get(i).copied().unwrap_or(1),
                }
            })
            .collect();
        let dims: Vec<f64> = outcome
            .intrinsic_dimension
            .iter()
            .flatten()
            .flatten()
            .copied()
            .collect();
        Self {
            selected_names: outcome.selected_names(),
            rows,
            trials,
            intrinsic_dimension: (!dims.is_empty()).then(|| dims.iter().sum::<f64>() / dims.len() as f64),
        }
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(
            out,
            "Selected {} features over {} trials",
            self.selected_names.len(),
            self.trials
        );
        if let Some(d) = self.intrinsic_dimension {
            let _ = writeln!(out, "Mean intrinsic dimension estimate: {d:.2}");
        }
        let _ = writeln!(
            out,
            "\n{:<4} {:<20} {:>9} {:>9} {:>9} {:>5} {:>6}",
            "#", "feature", "rank p1", "rank p2", "rank p3", "step", "votes"
        );
        for (i, r) in self.rows.iter().enumerate() {
            let _ = writeln!(
                out,
                "{:<4} {:<20} {:>9.1} {:>9.1} {:>9.1} {:>5} {:>6}",
                i + 1,
                r.name,
                r.mean_rank[0],
                r.mean_rank[1],
                r.mean_rank[2],
                r.step,
                r.votes
            );
        }
        out
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_json(&binio::read_text(path)?).map_err(|e| match e {
            Error::Json(j) => Error::format("selection report", j.to_string()).with_path(path),
            other => other,
        })
    }

    pub fn save(&self, json_path: &Path, text_path: &Path) -> Result<()> {
        binio::write_atomic(json_path, self.to_json()?.as_bytes())?;
        binio::write_atomic(text_path, self.to_text().as_bytes())
    }

    /// Column indices of the selected features within `feature_names`.
    pub fn column_indices(&self, feature_names: &[String]) -> Result<Vec<usize>> {
        self.selected_names
            .iter()
            .map(|n| {
                feature_names
                    .iter()
                    .position(|f| f == n)
                    .ok_or_else(|| Error::InvalidArgument(format!("selected feature `{n}` not in feature table")))
            })
            .collect()
    }
}
