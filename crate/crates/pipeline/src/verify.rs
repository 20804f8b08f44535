//! Re-checking a finished job against its manifest.

use std::path::{Path, PathBuf};

use eit_core::{segments_for, SegmentationSettings};

use crate::corpus;
use crate::digest::Digest;
use crate::error::Result;
use crate::manifest::{Manifest, ManifestRecord, Operation};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RecordCheck {
    pub image_key: String,
    pub problems: Vec<String>,
}

impl RecordCheck {
    pub fn passed(&self) -> bool {
        self.problems.is_empty()
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct VerifyReport {
    pub records: Vec<RecordCheck>,
}

impl VerifyReport {
    pub fn all_passed(&self) -> bool {
        self.records.iter().all(RecordCheck::passed)
    }

    pub fn failed(&self) -> impl Iterator<Item = &RecordCheck> {
        self.records.iter().filter(|r| !r.passed())
    }
}

fn check_record(r: &ManifestRecord, output_root: &Path) -> Vec<String> {
    let mut problems = Vec::new();
    if let Some(e) = &r.error {
        problems.push(format!("processing failed: {e}"));
        return problems;
    }
    let (Some(out_rel), Some(out_digest)) = (&r.output_path, r.output_digest) else {
        problems.push("record has no output".into());
        return problems;
    };
    let output = match corpus::decode(&output_root.join(out_rel)) {
        Ok(img) => img,
        Err(e) => {
            problems.push(format!("output: {e}"));
            return problems;
        }
    };
    let actual = Digest::of_image(&output);
    if actual != out_digest {
        problems.push(format!("output digest {actual} != recorded {out_digest}"));
    }

    let input = match corpus::decode(Path::new(&r.input_path)) {
        Ok(img) => img,
        Err(e) => {
            problems.push(format!("input: {e}"));
            return problems;
        }
    };
    let actual = Digest::of_image(&input);
    if Some(actual) != r.input_digest {
        problems.push(format!("input digest {actual} does not match the manifest"));
    }
    if r.operation.preserves_multiset() && input.sorted_pixels() != output.sorted_pixels() {
        problems.push("pixel multiset differs between input and output".into());
    }
    problems
}

/// Recomputes digests (and pixel multisets, where the operation guarantees
/// them) for every record. Output paths resolve against `output_root`.
pub fn verify_outputs(manifest: &Manifest, output_root: &Path) -> VerifyReport {
    VerifyReport {
        records: manifest
            .records
            .iter()
            .map(|r| RecordCheck {
                image_key: r.image_key.clone(),
                problems: check_record(r, output_root),
            })
            .collect(),
    }
}

/// Writes `<output stem>.segments.png` next to each segmentation output,
/// returning the written paths.
pub fn dump_segments(manifest: &Manifest, output_root: &Path) -> Result<Vec<PathBuf>> {
    let mut written = Vec::new();
    for r in &manifest.records {
        let (Operation::Transform { spec }, Some(out_rel)) = (&r.operation, &r.output_path) else {
            continue;
        };
        let input = corpus::decode(Path::new(&r.input_path))?;
        let Some(seg) = segments_for(&input, spec, SegmentationSettings::default()) else {
            continue;
        };
        let stem = output_root.join(out_rel).with_extension("");
        let path = PathBuf::from(format!("{}.segments.png", stem.display()));
        corpus::encode(&seg?.to_label_image(), &path, corpus::OutputFormat::Png)?;
        written.push(path);
    }
    Ok(written)
}
