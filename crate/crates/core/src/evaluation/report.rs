//! Cross-validation reports: text for people, JSON and CSV for tools.

use std::fmt::Write as _;
use std::path::Path;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::mcnemar::{mcnemar_test, McNemar};
use super::metrics::{roc_auc, Confusion};
use super::partition::PartitionScheme;
use crate::binio;
use crate::error::{Error, Result};

/// JSON has no NaN; undefined rates travel as `null`.
mod nan_as_null {
    use super::*;

    pub fn serialize<S: Serializer>(v: &f64, s: S) -> std::result::Result<S::Ok, S::Error> {
        if v.is_finite() {
            s.serialize_some(v)
        } else {
            s.serialize_none()
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<f64, D::Error> {
        Ok(Option::<f64>::deserialize(d)?.unwrap_or(f64::NAN))
    }
}

/// Predictions of one model on one fold's test set.
#[derive(Debug, Clone, PartialEq)]
pub struct FoldOutcome {
    pub name: String,
    pub n_train: usize,
    /// Observation indices tested in this fold.
    pub test: Vec<usize>,
    pub labels: Vec<bool>,
    pub predictions: Vec<bool>,
    pub scores: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FoldReport {
    pub name: String,
    pub n_train: usize,
    pub n_test: usize,
    pub confusion: Confusion,
    #[serde(with = "nan_as_null")]
    pub sen: f64,
    #[serde(with = "nan_as_null")]
    pub spe: f64,
    #[serde(with = "nan_as_null")]
    pub acc: f64,
    /// None when the fold's test set holds a single class.
    pub auc: Option<f64>,
}

/// Metrics of one model over all folds.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub model: String,
    pub confusion: Confusion,
    #[serde(with = "nan_as_null")]
    pub sen: f64,
    #[serde(with = "nan_as_null")]
    pub spe: f64,
    #[serde(with = "nan_as_null")]
    pub acc: f64,
    /// Mean of the per-fold AUCs, or the pooled AUC when no fold has both classes.
    #[serde(with = "nan_as_null")]
    pub auc: f64,
    /// AUC of all test scores pooled across folds.
    #[serde(with = "nan_as_null")]
    pub auc_pooled: f64,
    /// Pooled ROC curve as (FPR, TPR).
    pub roc_points: Vec<(f64, f64)>,
    pub folds: Vec<FoldReport>,
}

impl EvalReport {
    pub fn from_folds(model: impl Into<String>, outcomes: &[FoldOutcome]) -> Result<Self> {
        let mut confusion = Confusion::default();
        let mut folds = Vec::with_capacity(outcomes.len());
        let (mut all_scores, mut all_labels) = (Vec::new(), Vec::new());
        for o in outcomes {
            if o.scores.len() != o.labels.len() || o.test.len() != o.labels.len() {
                return Err(Error::DimensionMismatch {
                    context: "fold outcome",
                    expected: o.labels.len(),
                    actual: o.scores.len(),
                });
            }
            let c = Confusion::from_predictions(&o.predictions, &o.labels)?;
            confusion += c;
            all_scores.extend_from_slice(&o.scores);
            all_labels.extend_from_slice(&o.labels);
            folds.push(FoldReport {
                name: o.name.clone(),
                n_train: o.n_train,
                n_test: o.labels.len(),
                confusion: c,
                sen: c.sen(),
                spe: c.spe(),
                acc: c.acc(),
                auc: roc_auc(&o.scores, &o.labels).ok().map(|r| r.auc),
            });
        }
        let (auc_pooled, roc_points) = match roc_auc(&all_scores, &all_labels) {
            Ok(r) => (r.auc, r.points),
            Err(_) => (f64::NAN, Vec::new()),
        };
        let fold_aucs: Vec<f64> = folds.iter().filter_map(|f| f.auc).collect();
        let auc = if fold_aucs.is_empty() {
            auc_pooled
        } else {
            fold_aucs.iter().sum::<f64>() / fold_aucs.len() as f64
        };
        Ok(Self {
            model: model.into(),
            sen: confusion.sen(),
            spe: confusion.spe(),
            acc: confusion.acc(),
            confusion,
            auc,
            auc_pooled,
            roc_points,
            folds,
        })
    }

    /// ROC points as `fpr,tpr` lines with a header.
    pub fn roc_csv(&self) -> String {
        let mut out = String::from("fpr,tpr\n");
        for (x, y) in &self.roc_points {
            let _ = writeln!(out, "{x:?},{y:?}");
        }
        out
    }
}

/// Paired McNemar comparison of two models on the same observations.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Comparison {
    pub first: String,
    pub second: String,
    pub test: McNemar,
}

impl Comparison {
    pub fn new(
        first: impl Into<String>,
        second: impl Into<String>,
        pred_first: &[bool],
        pred_second: &[bool],
        labels: &[bool],
    ) -> Result<Self> {
        Ok(Self {
            first: first.into(),
            second: second.into(),
            test: mcnemar_test(pred_first, pred_second, labels)?,
        })
    }
}

/// Everything produced by one cross-validation run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalSummary {
    pub scheme: PartitionScheme,
    pub n_folds: usize,
    pub reports: Vec<EvalReport>,
    pub comparisons: Vec<Comparison>,
}

fn pct(v: f64) -> String {
    if v.is_finite() {
        format!("{v:.2}")
    } else {
        "n/a".into()
    }
}

impl EvalSummary {
    pub fn report(&self, model: &str) -> Option<&EvalReport> {
        self.reports.iter().find(|r| r.model == model)
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "Cross-validation: {} ({} folds)", self.scheme, self.n_folds);
        let _ = writeln!(
            out,
            "\n{:<16} {:>8} {:>8} {:>8} {:>8} {:>8} {:>7} {:>7} {:>7} {:>7}",
            "model", "SEN %", "SPE %", "ACC %", "AUC %", "pooled", "TP", "FP", "TN", "FN"
        );
        for r in &self.reports {
            let c = r.confusion;
            let _ = writeln!(
                out,
                "{:<16} {:>8} {:>8} {:>8} {:>8} {:>8} {:>7} {:>7} {:>7} {:>7}",
                r.model,
                pct(r.sen),
                pct(r.spe),
                pct(r.acc),
                pct(100.0 * r.auc),
                pct(100.0 * r.auc_pooled),
                c.tp,
                c.fp,
                c.tn,
                c.fn_
            );
        }
        for r in &self.reports {
            let _ = writeln!(out, "\n{} per fold:", r.model);
            for f in &r.folds {
                let _ = writeln!(
                    out,
                    "  {:<20} train {:>6} test {:>6}  SEN {:>7} SPE {:>7} ACC {:>7} AUC {:>7}",
                    f.name,
                    f.n_train,
                    f.n_test,
                    pct(f.sen),
                    pct(f.spe),
                    pct(f.acc),
                    f.auc.map_or("n/a".into(), |a| pct(100.0 * a))
                );
            }
        }
        if !self.comparisons.is_empty() {
            let _ = writeln!(out, "\nMcNemar tests (* p < 0.05, ** p < 0.01):");
            for c in &self.comparisons {
                let _ = writeln!(
                    out,
                    "  {} vs {}: b={} c={} chi2={:.3} p={:.4}{}",
                    c.first,
                    c.second,
                    c.test.b,
                    c.test.c,
                    c.test.statistic,
                    c.test.p_value,
                    c.test.stars()
                );
            }
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
            Error::Json(j) => Error::format("evaluation report", j.to_string()).with_path(path),
            other => other,
        })
    }

    /// Writes `<stem>.json`, `<stem>.txt` and one `<stem>_roc_<model>.csv` per model into `dir`.
    pub fn save(&self, dir: &Path, stem: &str) -> Result<()> {
        binio::write_atomic(&dir.join(format!("{stem}.json")), self.to_json()?.as_bytes())?;
        binio::write_atomic(&dir.join(format!("{stem}.txt")), self.to_text().as_bytes())?;
        for r in &self.reports {
            binio::write_atomic(&dir.join(format!("{stem}_roc_{}.csv", r.model)), r.roc_csv().as_bytes())?;
        }
        Ok(())
    }
}
