//! The `eit` command line: `transform`, `corrupt`, `split` and `inspect`.
//!
//! Exit codes: 0 success, 1 configuration error, 2 some images failed,
//! 3 verification failed.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use eit_core::{Severity, TransformKind, TransformParams, TransformSpec};
use eit_pipeline::{
    dump_segments, run_job, split_corpus, split_corpus_stratified, verify_outputs, JobConfig,
    Manifest, Operation, OutputFormat, SplitSizes, SplitSpec, DEFAULT_GLOB,
};
use thiserror::Error;

pub mod config;

use config::ConfigFile;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Success = 0,
    ConfigError = 1,
    PartialFailure = 2,
    VerificationFailure = 3,
}

impl Status {
    pub fn code(self) -> i32 {
        self as i32
    }
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Config(String),
    #[error(transparent)]
    Pipeline(#[from] eit_pipeline::Error),
}

impl From<eit_core::Error> for CliError {
    fn from(e: eit_core::Error) -> Self {
        match e {
            eit_core::Error::InvalidSpec { field, reason } => {
                CliError::Config(format!("--{field}: {reason}"))
            }
            other => CliError::Config(other.to_string()),
        }
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "eit",
    version,
    about = "Deterministic extreme image transformations"
)]
pub struct Cli {
    /// Log progress to stderr.
    #[arg(short, long, global = true)]
    pub verbose: bool,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Apply one transform to every image under --in.
    Transform(TransformArgs),
    /// Apply gaussian-noise corruption to every image under --in.
    Corrupt(CorruptArgs),
    /// Partition a corpus into train/val/test key lists.
    Split(SplitArgs),
    /// Verify a job's outputs against its manifest.
    Inspect(InspectArgs),
}

#[derive(Debug, Clone, Args)]
pub struct JobArgs {
    /// Master seed; every image seed derives from it.
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long = "in", value_name = "PATH")]
    pub input: Option<PathBuf>,
    #[arg(long = "out", value_name = "PATH")]
    pub output: Option<PathBuf>,
    /// Worker threads (default: available parallelism).
    #[arg(long, env = "EIT_WORKERS")]
    pub workers: Option<usize>,
    /// Which files under --in to process, matched against relative paths.
    #[arg(long)]
    pub glob: Option<String>,
    #[arg(long)]
    pub format: Option<OutputFormat>,
    /// JSON or TOML file with JobConfig fields; flags take precedence.
    #[arg(long, value_name = "PATH")]
    pub config: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct TransformArgs {
    /// One of the seven transform kinds, e.g. grid-shuffle.
    #[arg(long)]
    pub kind: Option<String>,
    /// Shuffle probability.
    #[arg(long)]
    pub p: Option<f64>,
    /// Tile edge in pixels.
    #[arg(long)]
    pub grid: Option<u32>,
    /// Number of superpixels.
    #[arg(long)]
    pub segments: Option<u32>,
    /// Enable tile/segment swapping (the default).
    #[arg(long, conflicts_with = "no_swap")]
    pub swap: bool,
    /// Disable tile/segment swapping.
    #[arg(long)]
    pub no_swap: bool,
    #[command(flatten)]
    pub job: JobArgs,
}

#[derive(Debug, Clone, Args)]
pub struct CorruptArgs {
    #[arg(long, default_value = "gaussian")]
    pub noise: String,
    /// 1 to 5.
    #[arg(long, allow_negative_numbers = true)]
    pub severity: Option<i64>,
    #[command(flatten)]
    pub job: JobArgs,
}

#[derive(Debug, Clone, Args)]
pub struct SplitArgs {
    /// Exact sizes, e.g. 21657,4475,4475.
    #[arg(long, conflicts_with = "ratios", required_unless_present = "ratios")]
    pub counts: Option<String>,
    /// Fractions summing to 1, e.g. 0.7,0.15,0.15.
    #[arg(long)]
    pub ratios: Option<String>,
    #[arg(long)]
    pub seed: u64,
    /// Image directory, or a text file with one key per line.
    #[arg(long = "in", value_name = "PATH")]
    pub input: PathBuf,
    /// Directory receiving train.txt, val.txt and test.txt.
    #[arg(long = "out", value_name = "PATH")]
    pub output: PathBuf,
    #[arg(long, default_value = DEFAULT_GLOB)]
    pub glob: String,
    /// Split each class directory separately (ratios only).
    #[arg(long)]
    pub stratify: bool,
}

#[derive(Debug, Clone, Args)]
pub struct InspectArgs {
    #[arg(long, value_name = "PATH")]
    pub manifest: PathBuf,
    /// Also write superpixel label images next to segmentation outputs.
    #[arg(long)]
    pub dump_segments: bool,
}

fn default_workers() -> usize {
    std::thread::available_parallelism().map_or(1, usize::from)
}

/// Resolves the final job configuration from flags, an optional config file
/// and the operation built by the caller.
fn job_config(
    args: &JobArgs,
    file: &ConfigFile,
    operation: Operation,
) -> Result<JobConfig, CliError> {
    let missing = |flag: &str| CliError::Config(format!("missing required parameter {flag}"));
    let input = args
        .input
        .clone()
        .or_else(|| file.input_root.clone())
        .ok_or_else(|| missing("--in"))?;
    let output = args
        .output
        .clone()
        .or_else(|| file.output_root.clone())
        .ok_or_else(|| missing("--out"))?;
    let seed = args
        .seed
        .or(file.master_seed)
        .ok_or_else(|| missing("--seed"))?;
    let workers = args
        .workers
        .or(file.workers)
        .unwrap_or_else(default_workers);
    if workers == 0 {
        return Err(CliError::Config("--workers must be at least 1".into()));
    }
    let mut cfg = JobConfig::new(input, output, operation, seed).with_workers(workers);
    if let Some(g) = args.glob.clone().or_else(|| file.image_glob.clone()) {
        cfg.image_glob = g;
    }
    if let Some(f) = args.format.or(file.format) {
        cfg.format = f;
    }
    Ok(cfg)
}

fn load_config(args: &JobArgs) -> Result<ConfigFile, CliError> {
    args.config
        .as_deref()
        .map(ConfigFile::load)
        .transpose()
        .map(Option::unwrap_or_default)
}

/// Builds the transform spec from flags layered over the config file's spec.
pub fn transform_spec(args: &TransformArgs, file: &ConfigFile) -> Result<TransformSpec, CliError> {
    let base = match file.operation {
        Some(Operation::Transform { spec }) => Some(spec),
        Some(Operation::GaussianNoise { .. }) => {
            return Err(CliError::Config(
                "config file describes a corruption job, not a transform".into(),
            ))
        }
        None => None,
    };
    let kind = match (&args.kind, base) {
        (Some(name), _) => name.parse::<TransformKind>()?,
        (None, Some(spec)) => spec.kind(),
        (None, None) => return Err(CliError::Config("missing required parameter --kind".into())),
    };
    let mut params = match base {
        Some(spec) if spec.kind() == kind => spec.params(),
        _ => TransformParams::default(),
    };
    if args.p.is_some() {
        params.p = args.p;
    }
    if args.grid.is_some() {
        params.grid = args.grid;
    }
    if args.segments.is_some() {
        params.segments = args.segments;
    }
    if args.swap {
        params.swap = Some(true);
    }
    if args.no_swap {
        params.swap = Some(false);
    }
    for name in params.irrelevant_for(kind) {
        log::warn!("--{name} has no effect for {kind}; ignoring it");
    }
    Ok(TransformSpec::from_params(kind, &params)?)
}

fn corrupt_severity(args: &CorruptArgs, file: &ConfigFile) -> Result<Severity, CliError> {
    if args.noise != "gaussian" {
        return Err(CliError::Config(format!(
            "unsupported --noise `{}` (only gaussian is available)",
            args.noise
        )));
    }
    let level = match (args.severity, file.operation) {
        (Some(level), _) => level,
        (None, Some(Operation::GaussianNoise { severity })) => i64::from(severity.level()),
        _ => {
            return Err(CliError::Config(
                "missing required parameter --severity".into(),
            ))
        }
    };
    Severity::new(level)
        .map_err(|_| CliError::Config(format!("--severity must be between 1 and 5, got {level}")))
}

fn report_job(cfg: &JobConfig, manifest: &Manifest, out: &mut dyn Write) -> Status {
    let failed: Vec<_> = manifest.failures().collect();
    let _ = writeln!(
        out,
        "processed {} image(s), {} failed; manifest: {}",
        manifest.len(),
        failed.len(),
        cfg.output_root.join(eit_pipeline::MANIFEST_FILE).display()
    );
    for r in &failed {
        let _ = writeln!(
            out,
            "  failed {}: {}",
            r.image_key,
            r.error.as_deref().unwrap_or("")
        );
    }
    if failed.is_empty() {
        Status::Success
    } else {
        Status::PartialFailure
    }
}

fn cmd_transform(args: &TransformArgs, out: &mut dyn Write) -> Result<Status, CliError> {
    let file = load_config(&args.job)?;
    let spec = transform_spec(args, &file)?;
    let cfg = job_config(&args.job, &file, Operation::Transform { spec })?;
    let manifest = run_job(&cfg)?;
    Ok(report_job(&cfg, &manifest, out))
}

fn cmd_corrupt(args: &CorruptArgs, out: &mut dyn Write) -> Result<Status, CliError> {
    let file = load_config(&args.job)?;
    let severity = corrupt_severity(args, &file)?;
    let cfg = job_config(&args.job, &file, Operation::GaussianNoise { severity })?;
    let manifest = run_job(&cfg)?;
    Ok(report_job(&cfg, &manifest, out))
}

fn parse_triple<T: std::str::FromStr>(flag: &str, text: &str) -> Result<[T; 3], CliError> {
    let parts: Vec<&str> = text.split(',').map(str::trim).collect();
    let bad = || {
        CliError::Config(format!(
            "{flag} expects three comma-separated values, got `{text}`"
        ))
    };
    if parts.len() != 3 {
        return Err(bad());
    }
    let mut vals = Vec::with_capacity(3);
    for p in parts {
        vals.push(p.parse::<T>().map_err(|_| bad())?);
    }
    vals.try_into().map_err(|_| bad())
}

fn read_keys(input: &Path, glob: &str) -> Result<Vec<String>, CliError> {
    if input.is_dir() {
        return Ok(eit_pipeline::discover(input, glob)?);
    }
    let text = std::fs::read_to_string(input)
        .map_err(|e| CliError::Config(format!("cannot read {}: {e}", input.display())))?;
    Ok(text
        .lines()
        .map(str::trim)
        .filter(|l| !l.is_empty())
        .map(str::to_string)
        .collect())
}

fn cmd_split(args: &SplitArgs, out: &mut dyn Write) -> Result<Status, CliError> {
    let sizes = match (&args.counts, &args.ratios) {
        (Some(c), _) => {
            let [train, val, test] = parse_triple::<usize>("--counts", c)?;
            SplitSizes::Counts { train, val, test }
        }
        (None, Some(r)) => {
            let [train, val, test] = parse_triple::<f64>("--ratios", r)?;
            SplitSizes::Ratios { train, val, test }
        }
        (None, None) => {
            return Err(CliError::Config(
                "one of --counts or --ratios is required".into(),
            ))
        }
    };
    let keys = read_keys(&args.input, &args.glob)?;
    let spec = SplitSpec {
        sizes,
        seed: args.seed,
    };
    let part = if args.stratify {
        split_corpus_stratified(&keys, &spec)
    } else {
        split_corpus(&keys, &spec)
    }
    .map_err(|e| CliError::Config(e.to_string()))?;

    std::fs::create_dir_all(&args.output).map_err(|e| eit_pipeline::Error::Io {
        path: args.output.clone(),
        source: e,
    })?;
    for (name, list) in [
        ("train", &part.train),
        ("val", &part.val),
        ("test", &part.test),
    ] {
        let path = args.output.join(format!("{name}.txt"));
        let mut body = list.join("\n");
        if !body.is_empty() {
            body.push('\n');
        }
        std::fs::write(&path, body).map_err(|e| eit_pipeline::Error::Io { path, source: e })?;
    }
    let (a, b, c) = part.sizes();
    let _ = writeln!(out, "train {a}, val {b}, test {c}");
    Ok(Status::Success)
}

fn cmd_inspect(args: &InspectArgs, out: &mut dyn Write) -> Result<Status, CliError> {
    if !args.manifest.is_file() {
        return Err(CliError::Config(format!(
            "manifest {} does not exist",
            args.manifest.display()
        )));
    }
    let manifest = Manifest::read(&args.manifest)?;
    let root = args.manifest.parent().unwrap_or(Path::new("."));
    let report = verify_outputs(&manifest, root);
    for r in &report.records {
        if r.passed() {
            let _ = writeln!(out, "ok   {}", r.image_key);
        } else {
            let _ = writeln!(out, "FAIL {}: {}", r.image_key, r.problems.join("; "));
        }
    }
    let failed = report.failed().count();
    let _ = writeln!(out, "{} record(s), {} failed", report.records.len(), failed);
    if args.dump_segments {
        for p in dump_segments(&manifest, root)? {
            let _ = writeln!(out, "segments {}", p.display());
        }
    }
    Ok(if failed == 0 {
        Status::Success
    } else {
        Status::VerificationFailure
    })
}

/// Runs a parsed command, writing the human-readable report to `out`.
pub fn execute(cli: &Cli, out: &mut dyn Write) -> Result<Status, CliError> {
    match &cli.command {
        Command::Transform(a) => cmd_transform(a, out),
        Command::Corrupt(a) => cmd_corrupt(a, out),
        Command::Split(a) => cmd_split(a, out),
        Command::Inspect(a) => cmd_inspect(a, out),
    }
}

/// Parses `args` (including the program name) and runs the command,
/// returning the process exit code.
pub fn run_from<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() {
                Status::ConfigError.code()
            } else {
                0
            };
            let rendered = e.render().to_string();
            let _ = if e.use_stderr() {
                write!(err, "{rendered}")
            } else {
                write!(out, "{rendered}")
            };
            return code;
        }
    };
    match execute(&cli, out) {
        Ok(status) => status.code(),
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            Status::ConfigError.code()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(args: &[&str]) -> Cli {
        Cli::try_parse_from(std::iter::once("eit").chain(args.iter().copied())).unwrap()
    }

    fn spec_of(args: &[&str]) -> Result<TransformSpec, CliError> {
        match parse(args).command {
            Command::Transform(t) => transform_spec(&t, &ConfigFile::default()),
            _ => unreachable!(),
        }
    }

    #[test]
    fn builds_specs_from_flags() {
        assert_eq!(
            spec_of(&["transform", "--kind", "grid-shuffle", "--grid", "112"]).unwrap(),
            TransformSpec::GridShuffle {
                grid_size: 112,
                swap: true
            }
        );
        assert_eq!(
            spec_of(&[
                "transform",
                "--kind",
                "grid-shuffle",
                "--grid",
                "112",
                "--no-swap"
            ])
            .unwrap(),
            TransformSpec::GridShuffle {
                grid_size: 112,
                swap: false
            }
        );
        let err = spec_of(&["transform", "--kind", "full-random-shuffle"]).unwrap_err();
        assert!(err.to_string().contains("--p"), "{err}");
        let err = spec_of(&["transform", "--p", "0.5"]).unwrap_err();
        assert!(err.to_string().contains("--kind"), "{err}");
        let err = spec_of(&["transform", "--kind", "shuffle-everything"]).unwrap_err();
        assert!(err.to_string().contains("unknown kind"), "{err}");
    }

    #[test]
    fn config_spec_overlaid_by_flags() {
        let file = ConfigFile {
            operation: Some(Operation::Transform {
                spec: TransformSpec::WithinGridShuffle {
                    grid_size: 14,
                    p: eit_core::Probability::new(0.5).unwrap(),
                },
            }),
            ..Default::default()
        };
        let Command::Transform(t) = parse(&["transform", "--p", "1.0"]).command else {
            unreachable!()
        };
        assert_eq!(
            transform_spec(&t, &file).unwrap(),
            TransformSpec::WithinGridShuffle {
                grid_size: 14,
                p: eit_core::Probability::ONE
            }
        );
    }

    #[test]
    fn job_flags_take_precedence() {
        let file = ConfigFile {
            input_root: Some("from-file".into()),
            output_root: Some("out-file".into()),
            master_seed: Some(1),
            workers: Some(3),
            ..Default::default()
        };
        let Command::Transform(t) = parse(&["transform", "--seed", "9", "--workers", "2"]).command
        else {
            unreachable!()
        };
        let cfg = job_config(
            &t.job,
            &file,
            Operation::Transform {
                spec: TransformSpec::ColorFlatten,
            },
        )
        .unwrap();
        assert_eq!(cfg.master_seed, 9);
        assert_eq!(cfg.workers, 2);
        assert_eq!(cfg.input_root, PathBuf::from("from-file"));

        let Command::Transform(t) = parse(&["transform"]).command else {
            unreachable!()
        };
        let err = job_config(
            &t.job,
            &ConfigFile::default(),
            Operation::Transform {
                spec: TransformSpec::ColorFlatten,
            },
        )
        .unwrap_err();
        assert!(err.to_string().contains("--in"));
    }

    #[test]
    fn severity_validation() {
        let Command::Corrupt(c) = parse(&["corrupt", "--severity", "9"]).command else {
            unreachable!()
        };
        assert!(corrupt_severity(&c, &ConfigFile::default()).is_err());
        let Command::Corrupt(c) = parse(&["corrupt", "--severity", "3"]).command else {
            unreachable!()
        };
        assert_eq!(
            corrupt_severity(&c, &ConfigFile::default())
                .unwrap()
                .level(),
            3
        );
        let Command::Corrupt(c) = parse(&["corrupt", "--noise", "fog", "--severity", "3"]).command
        else {
            unreachable!()
        };
        assert!(corrupt_severity(&c, &ConfigFile::default()).is_err());
    }

    #[test]
    fn triples() {
        assert_eq!(
            parse_triple::<usize>("--counts", "1, 2,3").unwrap(),
            [1, 2, 3]
        );
        assert!(parse_triple::<usize>("--counts", "1,2").is_err());
        assert!(parse_triple::<f64>("--ratios", "a,b,c").is_err());
    }

    #[test]
    fn parse_errors_exit_one() {
        let (mut out, mut err) = (Vec::new(), Vec::new());
        assert_eq!(run_from(["eit", "frobnicate"], &mut out, &mut err), 1);
        assert_eq!(run_from(["eit", "--help"], &mut out, &mut err), 0);
    }
}
