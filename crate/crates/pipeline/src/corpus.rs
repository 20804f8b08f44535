//! Finding, decoding and encoding corpus images.

use std::path::{Path, PathBuf};

use eit_core::ImageBuffer;
use globset::{GlobBuilder, GlobMatcher};
use image::{ColorType, DynamicImage, ImageFormat, ImageReader};
use serde::{Deserialize, Serialize};
use walkdir::WalkDir;

use crate::error::{Error, Result};

pub const DEFAULT_GLOB: &str = "**/*.{png,jpg,jpeg}";

/// Lossless output encodings.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    #[default]
    Png,
    /// Binary PGM/PPM.
    Pnm,
}

impl OutputFormat {
    pub fn extension(self) -> &'static str {
        match self {
            OutputFormat::Png => "png",
            OutputFormat::Pnm => "pnm",
        }
    }

    fn image_format(self) -> ImageFormat {
        match self {
            OutputFormat::Png => ImageFormat::Png,
            OutputFormat::Pnm => ImageFormat::Pnm,
        }
    }
}

impl std::str::FromStr for OutputFormat {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "png" => Ok(OutputFormat::Png),
            "pnm" => Ok(OutputFormat::Pnm),
            other => Err(format!(
                "unknown output format `{other}` (expected png or pnm)"
            )),
        }
    }
}

fn matcher(pattern: &str) -> Result<GlobMatcher> {
    GlobBuilder::new(pattern)
        .case_insensitive(true)
        .literal_separator(true)
        .build()
        .map(|g| g.compile_matcher())
        .map_err(|e| Error::Config(format!("bad image glob `{pattern}`: {e}")))
}

/// Relative `/`-separated keys of every file under `root` matching `pattern`,
/// sorted lexicographically.
pub fn discover(root: &Path, pattern: &str) -> Result<Vec<String>> {
    let glob = matcher(pattern)?;
    let mut keys = Vec::new();
    for entry in WalkDir::new(root).follow_links(true).sort_by_file_name() {
        let entry = entry.map_err(|e| {
            let path = e.path().unwrap_or(root).to_path_buf();
            Error::io(path, e.into())
        })?;
        if !entry.file_type().is_file() {
            continue;
        }
        let rel = entry
            .path()
            .strip_prefix(root)
            .expect("walkdir stays under root");
        let Some(parts) = rel
            .components()
            .map(|c| c.as_os_str().to_str())
            .collect::<Option<Vec<_>>>()
        else {
            log::warn!("skipping non UTF-8 path {}", entry.path().display());
            continue;
        };
        let key = parts.join("/");
        if glob.is_match(&key) {
            keys.push(key);
        }
    }
    keys.sort();
    Ok(keys)
}

/// Class label of a key: its immediate parent directory name.
pub fn class_of(key: &str) -> Option<&str> {
    let mut parts = key.rsplit('/');
    parts.next();
    parts.next()
}

/// Decodes to 8-bit gray (for gray or gray+alpha sources) or 8-bit RGB.
/// Alpha is dropped.
pub fn decode(path: &Path) -> Result<ImageBuffer> {
    let img = ImageReader::open(path)
        .map_err(|e| Error::io(path, e))?
        .with_guessed_format()
        .map_err(|e| Error::io(path, e))?
        .decode()
        .map_err(|source| Error::Image {
            path: path.to_path_buf(),
            source,
        })?;
    Ok(from_dynamic(img)?)
}

pub fn from_dynamic(img: DynamicImage) -> eit_core::Result<ImageBuffer> {
    let (w, h) = (img.width(), img.height());
    if img.color().has_color() {
        ImageBuffer::from_raw(w, h, 3, img.into_rgb8().into_raw())
    } else {
        ImageBuffer::from_raw(w, h, 1, img.into_luma8().into_raw())
    }
}

pub fn encode(img: &ImageBuffer, path: &Path, format: OutputFormat) -> Result<()> {
    if let Some(parent) = path.parent() {
        std::fs::create_dir_all(parent).map_err(|e| Error::io(parent, e))?;
    }
    let color = if img.channels() == 3 {
        ColorType::Rgb8
    } else {
        ColorType::L8
    };
    image::save_buffer_with_format(
        path,
        img.as_bytes(),
        img.width(),
        img.height(),
        color,
        format.image_format(),
    )
    .map_err(|source| match source {
        image::ImageError::IoError(e) => Error::io(path, e),
        source => Error::Image {
            path: path.to_path_buf(),
            source,
        },
    })
}

/// Output path (relative) for each key: same tree, extension swapped for the
/// output format. Keys that would collide keep their original extension too
/// (`a.jpg` -> `a.jpg.png`).
pub fn output_paths(keys: &[String], format: OutputFormat) -> Vec<PathBuf> {
    use std::collections::HashMap;
    let ext = format.extension();
    let swapped: Vec<PathBuf> = keys
        .iter()
        .map(|k| Path::new(k).with_extension(ext))
        .collect();
    let mut counts: HashMap<&Path, usize> = HashMap::new();
    for p in &swapped {
        *counts.entry(p.as_path()).or_default() += 1;
    }
    keys.iter()
        .zip(&swapped)
        .map(|(key, p)| {
            if counts[p.as_path()] > 1 && Path::new(key) != p {
                PathBuf::from(format!("{key}.{ext}"))
            } else {
                p.clone()
            }
        })
        .collect()
}
