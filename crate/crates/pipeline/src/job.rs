//! Manifest-driven batch execution.

use std::path::{Path, PathBuf};

use eit_core::{apply, derive_image_seed, gaussian_noise, ImageBuffer};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::corpus::{self, class_of, OutputFormat, DEFAULT_GLOB};
use crate::digest::Digest;
use crate::error::{Error, Result};
use crate::manifest::{Manifest, ManifestRecord, Operation, MANIFEST_FILE};

pub const JOB_FILE: &str = "job.json";

fn default_glob() -> String {
    DEFAULT_GLOB.to_string()
}

fn default_workers() -> usize {
    1
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JobConfig {
    pub input_root: PathBuf,
    pub output_root: PathBuf,
    pub operation: Operation,
    pub master_seed: u64,
    #[serde(default = "default_workers")]
    pub workers: usize,
    #[serde(default = "default_glob")]
    pub image_glob: String,
    #[serde(default)]
    pub format: OutputFormat,
}

impl JobConfig {
    pub fn new(
        input_root: impl Into<PathBuf>,
        output_root: impl Into<PathBuf>,
        operation: Operation,
        master_seed: u64,
    ) -> Self {
        Self {
            input_root: input_root.into(),
            output_root: output_root.into(),
            operation,
            master_seed,
            workers: default_workers(),
            image_glob: default_glob(),
            format: OutputFormat::default(),
        }
    }

    pub fn with_workers(mut self, workers: usize) -> Self {
        self.workers = workers;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !self.input_root.is_dir() {
            return Err(Error::Config(format!(
                "input root {} is not a directory",
                self.input_root.display()
            )));
        }
        if self.workers == 0 {
            return Err(Error::Config("workers must be at least 1".into()));
        }
        Ok(())
    }
}

/// Applies the job's operation to one decoded image.
pub fn process_image(
    img: &ImageBuffer,
    operation: &Operation,
    seed: u64,
) -> eit_core::Result<ImageBuffer> {
    match operation {
        Operation::Transform { spec } => apply(img, spec, seed),
        Operation::GaussianNoise { severity } => Ok(gaussian_noise(img, *severity, seed)),
    }
}

/// Per-image work. Decode and transform problems become record errors;
/// failing to write output aborts the job.
fn run_one(cfg: &JobConfig, key: &str, out_rel: &Path) -> Result<ManifestRecord> {
    let input_path = cfg.input_root.join(key);
    let derived_seed = derive_image_seed(cfg.master_seed, key)?;
    let mut record = ManifestRecord {
        image_key: key.to_string(),
        class_label: class_of(key).map(str::to_string),
        input_path: input_path.to_string_lossy().into_owned(),
        input_digest: None,
        operation: cfg.operation,
        derived_seed,
        output_path: None,
        output_digest: None,
        error: None,
    };

    let img = match corpus::decode(&input_path) {
        Ok(img) => img,
        Err(e) => {
            log::warn!("{key}: {e}");
            record.error = Some(format!("decode: {e}"));
            return Ok(record);
        }
    };
    record.input_digest = Some(Digest::of_image(&img));

    let out = match process_image(&img, &cfg.operation, derived_seed) {
        Ok(out) => out,
        Err(e) => {
            log::warn!("{key}: {e}");
            record.error = Some(format!("transform: {e}"));
            return Ok(record);
        }
    };
    corpus::encode(&out, &cfg.output_root.join(out_rel), cfg.format)?;
    record.output_digest = Some(Digest::of_image(&out));
    record.output_path = Some(out_rel.to_string_lossy().replace('\\', "/"));
    Ok(record)
}

/// Runs a job: writes `job.json`, every output image, and `manifest.jsonl`
/// under the output root. Results do not depend on the worker count.
pub fn run_job(cfg: &JobConfig) -> Result<Manifest> {
    cfg.validate()?;
    let keys = corpus::discover(&cfg.input_root, &cfg.image_glob)?;
    std::fs::create_dir_all(&cfg.output_root).map_err(|e| Error::io(&cfg.output_root, e))?;
    let job_path = cfg.output_root.join(JOB_FILE);
    let echo = serde_json::to_string_pretty(cfg).expect("job config serializes");
    std::fs::write(&job_path, echo + "\n").map_err(|e| Error::io(&job_path, e))?;

    let out_paths = corpus::output_paths(&keys, cfg.format);
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.workers)
        .build()
        .map_err(|e| Error::Config(format!("cannot start {} workers: {e}", cfg.workers)))?;
    log::info!(
        "processing {} images with {} workers",
        keys.len(),
        cfg.workers
    );
    let records = pool.install(|| {
        keys.par_iter()
            .zip(out_paths.par_iter())
            .map(|(key, out)| run_one(cfg, key, out))
            .collect::<Result<Vec<_>>>()
    })?;

    let manifest = Manifest::new(records);
    manifest.write(&cfg.output_root.join(MANIFEST_FILE))?;
    Ok(manifest)
}
