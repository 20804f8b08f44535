//! Deterministic extreme image transformations (EITs).
//!
//! Seven pixel/tile/segment rearrangements plus ImageNet-C style gaussian
//! noise, operating on interleaved 8-bit images. Every random choice flows
//! from an explicit 64-bit seed through documented algorithms (see [`rng`]),
//! so the same `(image, spec, seed)` always produces the same bytes.

pub mod apply;
pub mod binding;
pub mod block;
mod color;
pub mod corruption;
pub mod error;
pub mod image;
pub mod rng;
pub mod segmentation;
pub mod spec;
pub mod tile;

#[cfg(test)]
mod testutil;

pub use apply::{apply, apply_with, segments_for, SegmentationSettings};
pub use corruption::{gaussian_noise, severity_sigma, Severity};
pub use error::{Error, Result};
pub use image::ImageBuffer;
pub use rng::{bernoulli_select, derive_image_seed, fnv1a64, seeded_permutation, SeedContext};
pub use segmentation::{superpixel_segment, SegmentMap};
pub use spec::{Probability, TransformKind, TransformParams, TransformSpec};
pub use tile::{tile_partition, Tile, TileGrid};
