//! Recording scenarios and dataset manifests.
//!
//! A manifest is delimited text with header `wav,annotation,patient_id,scenario`.
//! Relative paths resolve against the manifest's directory.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Acquisition condition of a recording: quiet, moderate or noisy.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Scenario {
    Part1,
    Part2,
    Part3,
}

impl Scenario {
    pub const ALL: [Scenario; 3] = [Scenario::Part1, Scenario::Part2, Scenario::Part3];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Self::Part1 => "part1",
            Self::Part2 => "part2",
            Self::Part3 => "part3",
        }
    }
}

impl fmt::Display for Scenario {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Scenario {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "part1" | "1" => Ok(Self::Part1),
            "part2" | "2" => Ok(Self::Part2),
            "part3" | "3" => Ok(Self::Part3),
            other => Err(Error::InvalidArgument(format!(
                "unknown scenario `{other}` (expected part1, part2 or part3)"
            ))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ManifestEntry {
    pub wav: PathBuf,
    pub annotation: PathBuf,
    pub patient_id: String,
    pub scenario: Scenario,
}

impl ManifestEntry {
    /// Recording id: wav file stem.
    pub fn recording_id(&self) -> String {
        self.wav
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_default()
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct DatasetManifest {
    pub entries: Vec<ManifestEntry>,
}

impl DatasetManifest {
    /// Parses manifest text; relative paths are joined onto `base`.
    pub fn parse(text: &str, base: &Path) -> Result<Self> {
        let mut entries = Vec::new();
        for (ln, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let f: Vec<&str> = line.split(',').map(str::trim).collect();
            if f.len() != 4 {
                return Err(Error::format(
                    "manifest",
                    format!("line {}: expected 4 fields, found {}", ln + 1, f.len()),
                ));
            }
            if f[0] == "wav" && entries.is_empty() {
                continue;
            }
            let scenario = f[3]
                .parse()
                .map_err(|e| Error::format("manifest", format!("line {}: {e}", ln + 1)))?;
            entries.push(ManifestEntry {
                wav: base.join(f[0]),
                annotation: base.join(f[1]),
                patient_id: f[2].to_string(),
                scenario,
            });
        }
        Ok(Self { entries })
    }

    /// Reads a manifest and checks every referenced file exists.
    pub fn load(path: &Path) -> Result<Self> {
        let text = crate::binio::read_text(path)?;
        let base = path.parent().unwrap_or(Path::new("."));
        let m = Self::parse(&text, base).map_err(|e| e.with_path(path))?;
        for e in &m.entries {
            for p in [&e.wav, &e.annotation] {
                if !p.is_file() {
                    return Err(Error::format("manifest", format!("missing file {}", p.display())).with_path(path));
                }
            }
        }
        Ok(m)
    }

    /// Serialises with paths relative to `base` where possible.
    pub fn to_csv(&self, base: &Path) -> String {
        let rel = |p: &Path| p.strip_prefix(base).unwrap_or(p).display().to_string();
        let mut out = String::from("wav,annotation,patient_id,scenario\n");
        for e in &self.entries {
            out.push_str(&format!(
                "{},{},{},{}\n",
                rel(&e.wav),
                rel(&e.annotation),
                e.patient_id,
                e.scenario
            ));
        }
        out
    }
}
