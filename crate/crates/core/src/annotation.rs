//! Event annotations and frame-level ground truth.
//!
//! Annotation files are delimited text with columns
//! `start_seconds,end_seconds,label`, label `cough` or `other`. A header row
//! is optional; blank lines and lines starting with `#` are skipped.
//! Samples not covered by any cough segment count as `other`.

use std::fmt;
use std::path::Path;
use std::str::FromStr;

use crate::dsp::FrameLayout;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum EventLabel {
    Cough,
    Other,
}

impl FromStr for EventLabel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "cough" => Ok(Self::Cough),
            "other" => Ok(Self::Other),
            other => Err(Error::format("annotation", format!("unknown label `{other}`"))),
        }
    }
}

impl fmt::Display for EventLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Cough => "cough",
            Self::Other => "other",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Segment {
    pub start: f64,
    pub end: f64,
    pub label: EventLabel,
}

impl Segment {
    /// Sample range `[start, end)` at `rate`, clipped to `n_samples`.
    pub fn sample_range(&self, rate: u32, n_samples: usize) -> std::ops::Range<usize> {
        let to_idx = |t: f64| ((t * rate as f64).round().max(0.0) as usize).min(n_samples);
        to_idx(self.start)..to_idx(self.end)
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Annotations {
    pub segments: Vec<Segment>,
}

impl Annotations {
    pub fn new(segments: Vec<Segment>) -> Result<Self> {
        for (i, s) in segments.iter().enumerate() {
            if !(s.start.is_finite() && s.end.is_finite()) || s.start < 0.0 || s.end <= s.start {
                return Err(Error::format(
                    "annotation",
                    format!("segment {}: invalid interval [{}, {})", i + 1, s.start, s.end),
                ));
            }
        }
        Ok(Self { segments })
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut segments = Vec::new();
        for (ln, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let fields: Vec<&str> = line.split(',').map(str::trim).collect();
            if fields.len() != 3 {
                return Err(Error::format(
                    "annotation",
                    format!("line {}: expected 3 fields, found {}", ln + 1, fields.len()),
                ));
            }
            if segments.is_empty() && fields[0].parse::<f64>().is_err() && fields[0].starts_with("start") {
                continue;
            }
            let num = |s: &str| {
                s.parse::<f64>()
                    .map_err(|_| Error::format("annotation", format!("line {}: bad time `{s}`", ln + 1)))
            };
            let label = fields[2]
                .parse::<EventLabel>()
                .map_err(|e| Error::format("annotation", format!("line {}: {e}", ln + 1)))?;
            segments.push(Segment {
                start: num(fields[0])?,
                end: num(fields[1])?,
                label,
            });
        }
        Self::new(segments)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::parse(&crate::binio::read_text(path)?).map_err(|e| e.with_path(path))
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("start_seconds,end_seconds,label\n");
        for s in &self.segments {
            out.push_str(&format!("{:.6},{:.6},{}\n", s.start, s.end, s.label));
        }
        out
    }

    pub fn coughs(&self) -> impl Iterator<Item = &Segment> + '_ {
        self.segments.iter().filter(|s| s.label == EventLabel::Cough)
    }

    /// Per-sample cough mask.
    pub fn sample_mask(&self, rate: u32, n_samples: usize) -> Vec<bool> {
        let mut mask = vec![false; n_samples];
        for s in self.coughs() {
            mask[s.sample_range(rate, n_samples)].fill(true);
        }
        mask
    }

    /// Frame labels by majority of samples: a frame is a cough when more
    /// than half of its samples are cough samples.
    pub fn frame_labels(&self, layout: &FrameLayout, n_samples: usize) -> Vec<bool> {
        let mask = self.sample_mask(layout.sample_rate, n_samples);
        let mut prefix = Vec::with_capacity(n_samples + 1);
        prefix.push(0usize);
        for &m in &mask {
            prefix.push(prefix.last().unwrap() + m as usize);
        }
        let n = crate::dsp::frame_count(n_samples, layout);
        (0..n)
            .map(|i| {
                let span = layout.span(i);
                2 * (prefix[span.end] - prefix[span.start]) > layout.frame_len
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_with_and_without_header() {
        let a = Annotations::parse("start_seconds,end_seconds,label\n0.5,0.8,cough\n1.0,2.0,other\n").unwrap();
        assert_eq!(a.segments.len(), 2);
        assert_eq!(a.segments[0].label, EventLabel::Cough);
        let b = Annotations::parse("# comment\n0.5, 0.8, Cough\n\n").unwrap();
        assert_eq!(b.segments.len(), 1);
        assert_eq!(Annotations::parse(&a.to_csv()).unwrap(), a);
    }

    #[test]
    fn rejects_malformed_rows() {
        assert!(Annotations::parse("0.5,0.4,cough").is_err());
        assert!(Annotations::parse("0.5,0.9,sneeze").is_err());
        assert!(Annotations::parse("0.5,0.9").is_err());
        assert!(Annotations::parse("a,0.9,cough").is_err());
    }

    #[test]
    fn majority_rule_at_sixty_percent() {
        let layout = FrameLayout::default();
        // cough covers 60% of frame 0's samples
        let covered = 0.6 * 825.0 / 11_025.0;
        let a = Annotations::new(vec![Segment {
            start: 0.0,
            end: covered,
            label: EventLabel::Cough,
        }])
        .unwrap();
        assert_eq!(a.frame_labels(&layout, 5000)[0], true);
        let a = Annotations::new(vec![Segment {
            start: 0.0,
            end: 0.4 * 825.0 / 11_025.0,
            label: EventLabel::Cough,
        }])
        .unwrap();
        assert_eq!(a.frame_labels(&layout, 5000)[0], false);
    }

    #[test]
    fn unannotated_audio_is_other() {
        let layout = FrameLayout::default();
        let labels = Annotations::default().frame_labels(&layout, 11_025);
        assert!(labels.iter().all(|&l| !l));
    }
}
