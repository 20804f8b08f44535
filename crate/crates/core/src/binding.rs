//! Array-in/array-out surface for in-process consumers (the Python
//! extension wraps exactly these functions).
//!
//! Arrays are `height x width x channels` `u8`, contiguous row-major, which
//! is the same layout as [`ImageBuffer`]. Spec mappings use the CLI field
//! names: `kind`, `p`, `grid`, `segments`, `swap`.

use serde_json::{Map, Value};

use crate::apply::apply;
use crate::corruption::{gaussian_noise, Severity};
use crate::error::{Error, Result};
use crate::image::ImageBuffer;
use crate::spec::{TransformKind, TransformParams, TransformSpec};

/// Borrowed `height x width x channels` array.
#[derive(Debug, Clone, Copy)]
pub struct ArrayImage<'a> {
    pub data: &'a [u8],
    pub height: u32,
    pub width: u32,
    pub channels: u8,
}

impl ArrayImage<'_> {
    fn to_image(self) -> Result<ImageBuffer> {
        ImageBuffer::from_raw(self.width, self.height, self.channels, self.data.to_vec())
    }
}

/// Kind names accepted in the `kind` field.
pub fn kinds() -> Vec<&'static str> {
    TransformKind::ALL.iter().map(|k| k.name()).collect()
}

fn invalid(field: &str, reason: impl Into<String>) -> Error {
    Error::InvalidSpec {
        field: field.into(),
        reason: reason.into(),
    }
}

fn positive_int(field: &str, value: &Value) -> Result<u32> {
    value
        .as_u64()
        .filter(|&v| v >= 1 && v <= u64::from(u32::MAX))
        .map(|v| v as u32)
        .ok_or_else(|| invalid(field, format!("expected a positive integer, got {value}")))
}

/// Parses a key/value spec with the same validation as the CLI.
pub fn spec_from_mapping(mapping: &Map<String, Value>) -> Result<TransformSpec> {
    let mut kind = None;
    let mut params = TransformParams::default();
    for (key, value) in mapping {
        match key.as_str() {
            "kind" => {
                let name = value
                    .as_str()
                    .ok_or_else(|| invalid("kind", format!("expected a string, got {value}")))?;
                kind = Some(name.parse::<TransformKind>()?);
            }
            "p" => {
                params.p = Some(
                    value
                        .as_f64()
                        .ok_or_else(|| invalid("p", format!("expected a number, got {value}")))?,
                );
            }
            "grid" => params.grid = Some(positive_int("grid", value)?),
            "segments" => params.segments = Some(positive_int("segments", value)?),
            "swap" => {
                params.swap =
                    Some(value.as_bool().ok_or_else(|| {
                        invalid("swap", format!("expected a boolean, got {value}"))
                    })?);
            }
            other => return Err(invalid(other, "unknown field")),
        }
    }
    let kind = kind.ok_or_else(|| invalid("kind", "missing"))?;
    TransformSpec::from_params(kind, &params)
}

/// Applies the transform described by `mapping`. The input is copied, never
/// modified. Output shape may differ from the input only for color flatten.
pub fn apply_array(
    array: ArrayImage<'_>,
    mapping: &Map<String, Value>,
    seed: u64,
) -> Result<ImageBuffer> {
    let spec = spec_from_mapping(mapping)?;
    apply(&array.to_image()?, &spec, seed)
}

pub fn gaussian_array(array: ArrayImage<'_>, severity: i64, seed: u64) -> Result<ImageBuffer> {
    let severity = Severity::new(severity)?;
    Ok(gaussian_noise(&array.to_image()?, severity, seed))
}
