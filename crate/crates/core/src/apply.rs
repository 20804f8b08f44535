use crate::block::{
    color_flatten, full_random_shuffle, grid_shuffle, local_structure_shuffle, within_grid_shuffle,
};
use crate::error::Result;
use crate::image::ImageBuffer;
use crate::segmentation::{
    segmentation_displacement_shuffle, segmentation_within_shuffle, superpixel_segment, SegmentMap,
    DEFAULT_COMPACTNESS, DEFAULT_ITERATIONS,
};
use crate::spec::TransformSpec;

/// SLIC settings used when a segmentation transform needs a segment map.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SegmentationSettings {
    pub compactness: f64,
    pub iterations: u32,
}

impl Default for SegmentationSettings {
    fn default() -> Self {
        Self {
            compactness: DEFAULT_COMPACTNESS,
            iterations: DEFAULT_ITERATIONS,
        }
    }
}

/// The segment map a segmentation transform would use for `img`, or `None`
/// for the other kinds.
pub fn segments_for(
    img: &ImageBuffer,
    spec: &TransformSpec,
    settings: SegmentationSettings,
) -> Option<Result<SegmentMap>> {
    match *spec {
        TransformSpec::SegmentationDisplacementShuffle { n_segments, .. }
        | TransformSpec::SegmentationWithinShuffle { n_segments, .. } => Some(superpixel_segment(
            img,
            n_segments,
            settings.compactness,
            settings.iterations,
        )),
        _ => None,
    }
}

/// Applies one transform with default segmentation settings.
pub fn apply(img: &ImageBuffer, spec: &TransformSpec, seed: u64) -> Result<ImageBuffer> {
    apply_with(img, spec, seed, SegmentationSettings::default())
}

pub fn apply_with(
    img: &ImageBuffer,
    spec: &TransformSpec,
    seed: u64,
    settings: SegmentationSettings,
) -> Result<ImageBuffer> {
    match *spec {
        TransformSpec::FullRandomShuffle { p } => Ok(full_random_shuffle(img, p, seed)),
        TransformSpec::GridShuffle { grid_size, swap } => {
            if swap {
                grid_shuffle(img, grid_size, seed)
            } else {
                Ok(img.clone())
            }
        }
        TransformSpec::WithinGridShuffle { grid_size, p } => {
            within_grid_shuffle(img, grid_size, p, seed)
        }
        TransformSpec::LocalStructureShuffle { grid_size, p, swap } => {
            local_structure_shuffle(img, grid_size, p, swap, seed)
        }
        TransformSpec::ColorFlatten => color_flatten(img),
        TransformSpec::SegmentationDisplacementShuffle { n_segments, swap } => {
            if !swap {
                return Ok(img.clone());
            }
            let seg =
                superpixel_segment(img, n_segments, settings.compactness, settings.iterations)?;
            segmentation_displacement_shuffle(img, &seg, swap, seed)
        }
        TransformSpec::SegmentationWithinShuffle { n_segments, p } => {
            let seg =
                superpixel_segment(img, n_segments, settings.compactness, settings.iterations)?;
            segmentation_within_shuffle(img, &seg, p, seed)
        }
    }
}
