//! Corpus-level machinery: deterministic splits, parallel batch jobs with a
//! per-image manifest, and verification of finished jobs.

pub mod corpus;
pub mod digest;
pub mod error;
pub mod job;
pub mod manifest;
pub mod split;
pub mod verify;

pub use corpus::{discover, OutputFormat, DEFAULT_GLOB};
pub use digest::Digest;
pub use error::{Error, Result};
pub use job::{process_image, run_job, JobConfig, JOB_FILE};
pub use manifest::{Manifest, ManifestRecord, Operation, MANIFEST_FILE};
pub use split::{split_corpus, split_corpus_stratified, Partition, SplitSizes, SplitSpec};
pub use verify::{dump_segments, verify_outputs, RecordCheck, VerifyReport};
