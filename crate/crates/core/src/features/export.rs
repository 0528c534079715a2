//! Feature-matrix files.
//!
//! Two encodings hold the same table:
//!
//! * delimited text: header `frame,start_s,label,<feature columns...>`,
//!   one row per frame, label `1`/`0` or empty when unknown;
//! * binary (`CFT1`): ids, column names, start times, labels and values,
//!   sealed by [`crate::binio`].

use std::fmt::Write as _;
use std::path::Path;

use crate::binio::{self, Reader, Writer};
use crate::error::{Error, Result};
use crate::matrix::Matrix;

const MAGIC: &[u8; 4] = b"CFT1";
const VERSION: u16 = 1;
pub const UNLABELED: u8 = u8::MAX;

/// Labelled short-term features of one recording.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureTable {
    pub recording_id: String,
    pub patient_id: String,
    pub scenario: String,
    pub names: Vec<String>,
    pub matrix: Matrix,
    pub start_times: Vec<f64>,
    /// 1 cough, 0 other, [`UNLABELED`] unknown.
    pub labels: Vec<u8>,
}

impl FeatureTable {
    pub fn validate(&self) -> Result<()> {
        let rows = self.matrix.rows();
        if self.names.len() != self.matrix.cols() {
            return Err(Error::DimensionMismatch {
                context: "feature names",
                expected: self.matrix.cols(),
                actual: self.names.len(),
            });
        }
        for (context, len) in [("start times", self.start_times.len()), ("labels", self.labels.len())] {
            if len != rows {
                return Err(Error::DimensionMismatch {
                    context,
                    expected: rows,
                    actual: len,
                });
            }
        }
        Ok(())
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("frame,start_s,label");
        for n in &self.names {
            out.push(',');
            out.push_str(n);
        }
        out.push('\n');
        for (i, row) in self.matrix.iter_rows().enumerate() {
            let label = match self.labels[i] {
                UNLABELED => String::new(),
                l => l.to_string(),
            };
            let _ = write!(out, "{i},{:.6},{label}", self.start_times[i]);
            for v in row {
                // `{:?}` prints the shortest representation that round-trips.
                let _ = write!(out, ",{v:?}");
            }
            out.push('\n');
        }
        out
    }

    /// Parses the delimited-text form; ids are not part of it and stay empty.
    pub fn from_csv(text: &str) -> Result<Self> {
        let mut lines = text.lines();
        let header = lines
            .next()
            .ok_or_else(|| Error::format("feature csv", "missing header"))?;
        let cols: Vec<&str> = header.split(',').collect();
        if cols.len() < 3 || cols[..3] != ["frame", "start_s", "label"] {
            return Err(Error::format(
                "feature csv",
                "header must start with frame,start_s,label",
            ));
        }
        let names: Vec<String> = cols[3..].iter().map(|s| s.to_string()).collect();
        let (mut data, mut start_times, mut labels) = (Vec::new(), Vec::new(), Vec::new());
        for (ln, line) in lines.enumerate().filter(|(_, l)| !l.trim().is_empty()) {
            let fields: Vec<&str> = line.split(',').collect();
            if fields.len() != cols.len() {
                return Err(Error::format(
                    "feature csv",
                    format!("line {}: {} fields, expected {}", ln + 2, fields.len(), cols.len()),
                ));
            }
            let num = |s: &str| {
                s.trim()
                    .parse::<f64>()
                    .map_err(|_| Error::format("feature csv", format!("line {}: bad number `{s}`", ln + 2)))
            };
            start_times.push(num(fields[1])?);
            labels.push(match fields[2].trim() {
                "" => UNLABELED,
                "0" => 0,
                "1" => 1,
                other => {
                    return Err(Error::format(
                        "feature csv",
                        format!("line {}: bad label `{other}`", ln + 2),
                    ))
                }
            });
            for f in &fields[3..] {
                data.push(num(f)?);
            }
        }
        let table = Self {
            recording_id: String::new(),
            patient_id: String::new(),
            scenario: String::new(),
            matrix: Matrix::new(labels.len(), names.len(), data)?,
            names,
            start_times,
            labels,
        };
        table.validate()?;
        Ok(table)
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let mut w = Writer::new();
        w.str(&self.recording_id)
            .str(&self.patient_id)
            .str(&self.scenario)
            .u64(self.matrix.rows() as u64)
            .u64(self.matrix.cols() as u64);
        for n in &self.names {
            w.str(n);
        }
        for &t in &self.start_times {
            w.f64(t);
        }
        for &l in &self.labels {
            w.u8(l);
        }
        for &v in self.matrix.as_slice() {
            w.f64(v);
        }
        binio::seal(MAGIC, VERSION, &w.into_inner())
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        let (_, mut r): (u16, Reader) = binio::open("feature table", MAGIC, VERSION, bytes)?;
        let recording_id = r.str()?;
        let patient_id = r.str()?;
        let scenario = r.str()?;
        let rows = r.usize()?;
        let cols = r.usize()?;
        if rows.saturating_mul(cols).saturating_mul(8) > r.remaining() {
            return Err(Error::format("feature table", "dimensions exceed payload"));
        }
        let names = (0..cols).map(|_| r.str()).collect::<Result<Vec<_>>>()?;
        let start_times = (0..rows).map(|_| r.f64()).collect::<Result<Vec<_>>>()?;
        let labels = (0..rows).map(|_| r.u8()).collect::<Result<Vec<_>>>()?;
        let data = (0..rows * cols).map(|_| r.f64()).collect::<Result<Vec<_>>>()?;
        r.finish()?;
        let table = Self {
            recording_id,
            patient_id,
            scenario,
            names,
            matrix: Matrix::new(rows, cols, data)?,
            start_times,
            labels,
        };
        table.validate()?;
        Ok(table)
    }

    pub fn write_csv(&self, path: &Path) -> Result<()> {
        binio::write_atomic(path, self.to_csv().as_bytes())
    }

    pub fn write_bin(&self, path: &Path) -> Result<()> {
        binio::write_atomic(path, &self.to_bytes())
    }

    pub fn read_bin(path: &Path) -> Result<Self> {
        Self::from_bytes(&binio::read_file(path)?).map_err(|e| e.with_path(path))
    }

    pub fn read_csv(path: &Path) -> Result<Self> {
        Self::from_csv(&binio::read_text(path)?).map_err(|e| e.with_path(path))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn table(values: Vec<f64>, rows: usize, cols: usize) -> FeatureTable {
        FeatureTable {
            recording_id: "rec".into(),
            patient_id: "p1".into(),
            scenario: "part2".into(),
            names: (0..cols).map(|j| format!("f{j}")).collect(),
            matrix: Matrix::new(rows, cols, values).unwrap(),
            start_times: (0..rows).map(|i| i as f64 * 0.056).collect(),
            labels: (0..rows).map(|i| [0, 1, UNLABELED][i % 3]).collect(),
        }
    }

    proptest! {
        #[test]
        fn both_encodings_roundtrip(
            (rows, cols, values) in (1usize..6, 1usize..5)
                .prop_flat_map(|(r, c)| (Just(r), Just(c), prop::collection::vec(-1e6f64..1e6, r * c)))
        ) {
            let t = table(values, rows, cols);
            let back = FeatureTable::from_bytes(&t.to_bytes()).unwrap();
            prop_assert_eq!(&back, &t);
            let csv = FeatureTable::from_csv(&t.to_csv()).unwrap();
            prop_assert_eq!(&csv.matrix, &t.matrix);
            prop_assert_eq!(&csv.labels, &t.labels);
            prop_assert_eq!(&csv.names, &t.names);
        }
    }

    #[test]
    fn csv_header_is_mandatory() {
        assert!(FeatureTable::from_csv("1,2,3\n").is_err());
        assert!(FeatureTable::from_csv("frame,start_s,label,a\n0,0.0,2,1.0\n").is_err());
    }
}
