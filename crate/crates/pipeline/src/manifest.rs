//! `manifest.jsonl`: one JSON record per processed image, LF-terminated,
//! sorted by image key.

use std::fmt::Write as _;
use std::path::Path;

use eit_core::{Severity, TransformSpec};
use serde::{Deserialize, Serialize};

use crate::digest::Digest;
use crate::error::{Error, Result};

pub const MANIFEST_FILE: &str = "manifest.jsonl";

/// What a job does to every image.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "op", rename_all = "kebab-case")]
pub enum Operation {
    Transform { spec: TransformSpec },
    GaussianNoise { severity: Severity },
}

impl Operation {
    pub fn preserves_multiset(&self) -> bool {
        match self {
            Operation::Transform { spec } => spec.preserves_multiset(),
            Operation::GaussianNoise { .. } => false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ManifestRecord {
    pub image_key: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub class_label: Option<String>,
    pub input_path: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub input_digest: Option<Digest>,
    pub operation: Operation,
    pub derived_seed: u64,
    /// Relative to the output root.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output_path: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output_digest: Option<Digest>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

impl ManifestRecord {
    pub fn is_ok(&self) -> bool {
        self.error.is_none()
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Manifest {
    pub records: Vec<ManifestRecord>,
}

impl Manifest {
    pub fn new(mut records: Vec<ManifestRecord>) -> Self {
        records.sort_by(|a, b| a.image_key.cmp(&b.image_key));
        Self { records }
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn failures(&self) -> impl Iterator<Item = &ManifestRecord> {
        self.records.iter().filter(|r| !r.is_ok())
    }

    pub fn to_jsonl(&self) -> String {
        let mut out = String::new();
        for r in &self.records {
            let line = serde_json::to_string(r).expect("manifest records always serialize");
            writeln!(out, "{line}").unwrap();
        }
        out
    }

    pub fn parse(text: &str) -> Result<Self> {
        let records = text
            .lines()
            .enumerate()
            .filter(|(_, l)| !l.trim().is_empty())
            .map(|(i, l)| {
                serde_json::from_str(l).map_err(|source| Error::ManifestParse {
                    line: i + 1,
                    source,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { records })
    }

    pub fn read(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse(&text)
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_jsonl()).map_err(|e| Error::io(path, e))
    }

    /// Digest pairs, for comparing two runs.
    pub fn digests(&self) -> Vec<(&str, Option<Digest>, Option<Digest>)> {
        self.records
            .iter()
            .map(|r| (r.image_key.as_str(), r.input_digest, r.output_digest))
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use eit_core::Probability;
    use proptest::prelude::*;

    fn record(key: &str, err: Option<&str>) -> ManifestRecord {
        ManifestRecord {
            image_key: key.into(),
            class_label: Some("cls".into()),
            input_path: format!("in/{key}"),
            input_digest: Some(Digest(1)),
            operation: Operation::Transform {
                spec: TransformSpec::WithinGridShuffle {
                    grid_size: 14,
                    p: Probability::new(0.5).unwrap(),
                },
            },
            derived_seed: u64::MAX,
            output_path: err.is_none().then(|| format!("{key}.png")),
            output_digest: err.is_none().then_some(Digest(2)),
            error: err.map(str::to_string),
        }
    }

    #[test]
    fn records_sorted_and_lines_stable() {
        let m = Manifest::new(vec![record("b", None), record("a", Some("boom"))]);
        assert_eq!(m.records[0].image_key, "a");
        let text = m.to_jsonl();
        assert!(text.ends_with('\n'));
        assert_eq!(text.lines().count(), 2);
        assert!(text.lines().next().unwrap().contains(r#""error":"boom""#));
        assert!(!text.lines().next().unwrap().contains("output_digest"));
        assert_eq!(m.failures().count(), 1);
    }

    #[test]
    fn operation_encoding() {
        let op = Operation::GaussianNoise {
            severity: Severity::new(3).unwrap(),
        };
        assert_eq!(
            serde_json::to_string(&op).unwrap(),
            r#"{"op":"gaussian-noise","severity":3}"#
        );
        assert!(
            serde_json::from_str::<Operation>(r#"{"op":"gaussian-noise","severity":7}"#).is_err()
        );
    }

    #[test]
    fn parse_errors_carry_line() {
        let err = Manifest::parse("{}\n").unwrap_err();
        assert!(matches!(err, Error::ManifestParse { line: 1, .. }));
    }

    proptest! {
        #[test]
        fn round_trip_is_byte_stable(
            keys in prop::collection::vec("[a-z0-9/]{1,12}", 0..8),
            seed: u64, p in 0.0f64..=1.0, fail: bool,
        ) {
            let records = keys.iter().map(|k| {
                let mut r = record(k, fail.then_some("x"));
                r.derived_seed = seed;
                r.operation = Operation::Transform {
                    spec: TransformSpec::FullRandomShuffle { p: Probability::new(p).unwrap() },
                };
                r
            }).collect();
            let text = Manifest::new(records).to_jsonl();
            let reparsed = Manifest::parse(&text).unwrap();
            prop_assert_eq!(reparsed.to_jsonl(), text);
        }
    }
}
