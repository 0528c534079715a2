use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Paired comparison of two classifiers on the same observations.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct McNemar {
    /// First classifier right, second wrong.
    pub b: usize,
    /// First classifier wrong, second right.
    pub c: usize,
    pub statistic: f64,
    pub p_value: f64,
}

impl McNemar {
    /// Continuity-corrected statistic from discordant counts.
    pub fn from_counts(b: usize, c: usize) -> Self {
        if b + c == 0 {
            return Self {
                b,
                c,
                statistic: 0.0,
                p_value: 1.0,
            };
        }
        let excess = (b.abs_diff(c) as f64 - 1.0).max(0.0);
        let statistic = excess * excess / (b + c) as f64;
        Self {
            b,
            c,
            statistic,
            p_value: chi2_1_survival(statistic),
        }
    }

    pub fn stars(&self) -> &'static str {
        significance_stars(self.p_value)
    }
}

/// Upper tail of the chi-square distribution with one degree of freedom.
pub fn chi2_1_survival(x: f64) -> f64 {
    if x <= 0.0 {
        1.0
    } else {
        libm::erfc((x / 2.0).sqrt())
    }
}

/// `**` below 0.01, `*` below 0.05, otherwise empty.
pub fn significance_stars(p: f64) -> &'static str {
    if p < 0.01 {
        "**"
    } else if p < 0.05 {
        "*"
    } else {
        ""
    }
}

pub fn mcnemar_test(pred_a: &[bool], pred_b: &[bool], labels: &[bool]) -> Result<McNemar> {
    if pred_a.len() != labels.len() || pred_b.len() != labels.len() {
        return Err(Error::DimensionMismatch {
            context: "paired predictions",
            expected: labels.len(),
            actual: if pred_a.len() != labels.len() {
                pred_a.len()
            } else {
                pred_b.len()
            },
        });
    }
    let (mut b, mut c) = (0, 0);
    for ((&a, &p), &l) in pred_a.iter().zip(pred_b).zip(labels) {
        match (a == l, p == l) {
            (true, false) => b += 1,
            (false, true) => c += 1,
            _ => {}
        }
    }
    Ok(McNemar::from_counts(b, c))
}
