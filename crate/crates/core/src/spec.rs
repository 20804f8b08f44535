use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A probability in `[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(try_from = "f64", into = "f64")]
pub struct Probability(f64);

impl Probability {
    pub const ZERO: Probability = Probability(0.0);
    pub const ONE: Probability = Probability(1.0);

    pub fn new(p: f64) -> Result<Self> {
        if (0.0..=1.0).contains(&p) {
            Ok(Self(p))
        } else {
            Err(Error::ProbabilityOutOfRange(p))
        }
    }

    pub fn get(self) -> f64 {
        self.0
    }
}

impl TryFrom<f64> for Probability {
    type Error = Error;
    fn try_from(p: f64) -> Result<Self> {
        Self::new(p)
    }
}

impl From<Probability> for f64 {
    fn from(p: Probability) -> f64 {
        p.0
    }
}

/// The seven transform families.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TransformKind {
    FullRandomShuffle,
    GridShuffle,
    WithinGridShuffle,
    LocalStructureShuffle,
    ColorFlatten,
    SegmentationDisplacementShuffle,
    SegmentationWithinShuffle,
}

impl TransformKind {
    pub const ALL: [TransformKind; 7] = [
        TransformKind::FullRandomShuffle,
        TransformKind::GridShuffle,
        TransformKind::WithinGridShuffle,
        TransformKind::LocalStructureShuffle,
        TransformKind::ColorFlatten,
        TransformKind::SegmentationDisplacementShuffle,
        TransformKind::SegmentationWithinShuffle,
    ];

    pub fn name(self) -> &'static str {
        match self {
            TransformKind::FullRandomShuffle => "full-random-shuffle",
            TransformKind::GridShuffle => "grid-shuffle",
            TransformKind::WithinGridShuffle => "within-grid-shuffle",
            TransformKind::LocalStructureShuffle => "local-structure-shuffle",
            TransformKind::ColorFlatten => "color-flatten",
            TransformKind::SegmentationDisplacementShuffle => "segmentation-displacement-shuffle",
            TransformKind::SegmentationWithinShuffle => "segmentation-within-shuffle",
        }
    }

    pub fn uses_p(self) -> bool {
        matches!(
            self,
            TransformKind::FullRandomShuffle
                | TransformKind::WithinGridShuffle
                | TransformKind::LocalStructureShuffle
                | TransformKind::SegmentationWithinShuffle
        )
    }

    pub fn uses_grid(self) -> bool {
        matches!(
            self,
            TransformKind::GridShuffle
                | TransformKind::WithinGridShuffle
                | TransformKind::LocalStructureShuffle
        )
    }

    pub fn uses_segments(self) -> bool {
        matches!(
            self,
            TransformKind::SegmentationDisplacementShuffle
                | TransformKind::SegmentationWithinShuffle
        )
    }

    /// Kinds with a unit-level (tile or segment) permutation that `swap` toggles.
    pub fn uses_swap(self) -> bool {
        matches!(
            self,
            TransformKind::GridShuffle
                | TransformKind::LocalStructureShuffle
                | TransformKind::SegmentationDisplacementShuffle
        )
    }
}

impl fmt::Display for TransformKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for TransformKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        TransformKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::InvalidSpec {
                field: "kind".into(),
                reason: format!(
                    "unknown kind `{s}` (expected one of: {})",
                    TransformKind::ALL.map(TransformKind::name).join(", ")
                ),
            })
    }
}

fn default_swap() -> bool {
    true
}

/// One fully parameterised transform. Each variant carries exactly the
/// parameters its kind uses. Serialized field names match the CLI flags.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum TransformSpec {
    FullRandomShuffle {
        p: Probability,
    },
    GridShuffle {
        #[serde(rename = "grid")]
        grid_size: u32,
        #[serde(default = "default_swap")]
        swap: bool,
    },
    WithinGridShuffle {
        #[serde(rename = "grid")]
        grid_size: u32,
        p: Probability,
    },
    LocalStructureShuffle {
        #[serde(rename = "grid")]
        grid_size: u32,
        p: Probability,
        #[serde(default = "default_swap")]
        swap: bool,
    },
    ColorFlatten,
    SegmentationDisplacementShuffle {
        #[serde(rename = "segments")]
        n_segments: u32,
        #[serde(default = "default_swap")]
        swap: bool,
    },
    SegmentationWithinShuffle {
        #[serde(rename = "segments")]
        n_segments: u32,
        p: Probability,
    },
}

/// Loose, possibly incomplete parameters as they arrive from flags, config
/// files or a key/value mapping.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct TransformParams {
    pub p: Option<f64>,
    pub grid: Option<u32>,
    pub segments: Option<u32>,
    pub swap: Option<bool>,
}

impl TransformParams {
    /// Names of parameters that are set but have no effect for `kind`.
    pub fn irrelevant_for(&self, kind: TransformKind) -> Vec<&'static str> {
        let mut out = Vec::new();
        if self.p.is_some() && !kind.uses_p() {
            out.push("p");
        }
        if self.grid.is_some() && !kind.uses_grid() {
            out.push("grid");
        }
        if self.segments.is_some() && !kind.uses_segments() {
            out.push("segments");
        }
        if self.swap.is_some() && !kind.uses_swap() {
            out.push("swap");
        }
        out
    }
}

fn required<T>(value: Option<T>, field: &str, kind: TransformKind) -> Result<T> {
    value.ok_or_else(|| Error::InvalidSpec {
        field: field.into(),
        reason: format!("required for {kind}"),
    })
}

fn positive(value: u32, field: &str) -> Result<u32> {
    if value == 0 {
        Err(Error::InvalidSpec {
            field: field.into(),
            reason: "must be at least 1".into(),
        })
    } else {
        Ok(value)
    }
}

fn probability(value: f64) -> Result<Probability> {
    Probability::new(value).map_err(|_| Error::InvalidSpec {
        field: "p".into(),
        reason: format!("{value} is outside [0, 1]"),
    })
}

impl TransformSpec {
    /// Validates `params` for `kind`. Parameters the kind does not use are
    /// ignored; missing required ones are reported by field name.
    pub fn from_params(kind: TransformKind, params: &TransformParams) -> Result<Self> {
        let p = || required(params.p, "p", kind).and_then(probability);
        let grid = || required(params.grid, "grid", kind).and_then(|g| positive(g, "grid"));
        let segments =
            || required(params.segments, "segments", kind).and_then(|s| positive(s, "segments"));
        let swap = params.swap.unwrap_or(true);
        Ok(match kind {
            TransformKind::FullRandomShuffle => TransformSpec::FullRandomShuffle { p: p()? },
            TransformKind::GridShuffle => TransformSpec::GridShuffle {
                grid_size: grid()?,
                swap,
            },
            TransformKind::WithinGridShuffle => TransformSpec::WithinGridShuffle {
                grid_size: grid()?,
                p: p()?,
            },
            TransformKind::LocalStructureShuffle => TransformSpec::LocalStructureShuffle {
                grid_size: grid()?,
                p: p()?,
                swap,
            },
            TransformKind::ColorFlatten => TransformSpec::ColorFlatten,
            TransformKind::SegmentationDisplacementShuffle => {
                TransformSpec::SegmentationDisplacementShuffle {
                    n_segments: segments()?,
                    swap,
                }
            }
            TransformKind::SegmentationWithinShuffle => TransformSpec::SegmentationWithinShuffle {
                n_segments: segments()?,
                p: p()?,
            },
        })
    }

    pub fn kind(&self) -> TransformKind {
        match self {
            TransformSpec::FullRandomShuffle { .. } => TransformKind::FullRandomShuffle,
            TransformSpec::GridShuffle { .. } => TransformKind::GridShuffle,
            TransformSpec::WithinGridShuffle { .. } => TransformKind::WithinGridShuffle,
            TransformSpec::LocalStructureShuffle { .. } => TransformKind::LocalStructureShuffle,
            TransformSpec::ColorFlatten => TransformKind::ColorFlatten,
            TransformSpec::SegmentationDisplacementShuffle { .. } => {
                TransformKind::SegmentationDisplacementShuffle
            }
            TransformSpec::SegmentationWithinShuffle { .. } => {
                TransformKind::SegmentationWithinShuffle
            }
        }
    }

    /// The inverse of [`TransformSpec::from_params`].
    pub fn params(&self) -> TransformParams {
        let mut out = TransformParams::default();
        match *self {
            TransformSpec::FullRandomShuffle { p } => out.p = Some(p.get()),
            TransformSpec::GridShuffle { grid_size, swap } => {
                out.grid = Some(grid_size);
                out.swap = Some(swap);
            }
            TransformSpec::WithinGridShuffle { grid_size, p } => {
                out.grid = Some(grid_size);
                out.p = Some(p.get());
            }
            TransformSpec::LocalStructureShuffle { grid_size, p, swap } => {
                out.grid = Some(grid_size);
                out.p = Some(p.get());
                out.swap = Some(swap);
            }
            TransformSpec::ColorFlatten => {}
            TransformSpec::SegmentationDisplacementShuffle { n_segments, swap } => {
                out.segments = Some(n_segments);
                out.swap = Some(swap);
            }
            TransformSpec::SegmentationWithinShuffle { n_segments, p } => {
                out.segments = Some(n_segments);
                out.p = Some(p.get());
            }
        }
        out
    }

    /// Whether the output is always a rearrangement of the input pixels.
    pub fn preserves_multiset(&self) -> bool {
        match self {
            TransformSpec::FullRandomShuffle { .. }
            | TransformSpec::GridShuffle { .. }
            | TransformSpec::WithinGridShuffle { .. }
            | TransformSpec::LocalStructureShuffle { .. }
            | TransformSpec::SegmentationWithinShuffle { .. } => true,
            // Unequal segment sizes cycle or truncate donor pixels.
            TransformSpec::SegmentationDisplacementShuffle { swap, .. } => !swap,
            TransformSpec::ColorFlatten => false,
        }
    }
}

impl fmt::Display for TransformSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.kind())?;
        let params = self.params();
        if let Some(p) = params.p {
            write!(f, " p={p}")?;
        }
        if let Some(g) = params.grid {
            write!(f, " grid={g}")?;
        }
        if let Some(s) = params.segments {
            write!(f, " segments={s}")?;
        }
        if params.swap == Some(false) {
            f.write_str(" no-swap")?;
        }
        Ok(())
    }
}
