use crate::image::ImageBuffer;
use crate::rng::SplitMix64;

pub fn random_image(width: u32, height: u32, channels: u8, seed: u64) -> ImageBuffer {
    let mut rng = SplitMix64::new(seed);
    let len = (width * height) as usize * channels as usize;
    let data = (0..len).map(|_| rng.next_u64() as u8).collect();
    ImageBuffer::from_raw(width, height, channels, data).unwrap()
}

/// RGB image whose pixel at raster index `i` encodes `i` in 24 bits.
pub fn distinct_image(width: u32, height: u32) -> ImageBuffer {
    let data = (0..(width * height) as usize)
        .flat_map(|i| [(i >> 16) as u8, (i >> 8) as u8, i as u8])
        .collect();
    ImageBuffer::from_raw(width, height, 3, data).unwrap()
}

pub fn unpack_index(px: &[u8]) -> usize {
    (usize::from(px[0]) << 16) | (usize::from(px[1]) << 8) | usize::from(px[2])
}
