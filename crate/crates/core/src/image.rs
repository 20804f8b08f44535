use crate::error::{Error, Result};

/// Interleaved 8-bit raster with 1 (gray) or 3 (RGB) channels, row-major.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct ImageBuffer {
    width: u32,
    height: u32,
    channels: u8,
    data: Vec<u8>,
}

impl std::fmt::Debug for ImageBuffer {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("ImageBuffer")
            .field("width", &self.width)
            .field("height", &self.height)
            .field("channels", &self.channels)
            .field("bytes", &self.data.len())
            .finish()
    }
}

impl ImageBuffer {
    pub fn from_raw(width: u32, height: u32, channels: u8, data: Vec<u8>) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(Error::EmptyImage { width, height });
        }
        if channels != 1 && channels != 3 {
            return Err(Error::UnsupportedChannels(channels));
        }
        let expected = width as usize * height as usize * channels as usize;
        if data.len() != expected {
            return Err(Error::DataLength {
                expected,
                actual: data.len(),
            });
        }
        Ok(Self {
            width,
            height,
            channels,
            data,
        })
    }

    /// An image with every sample set to `value`.
    pub fn filled(width: u32, height: u32, channels: u8, value: u8) -> Result<Self> {
        let len = width as usize * height as usize * channels as usize;
        Self::from_raw(width, height, channels, vec![value; len])
    }

    /// Builds an image by evaluating `f(x, y)` for every pixel.
    pub fn from_fn<F>(width: u32, height: u32, channels: u8, mut f: F) -> Result<Self>
    where
        F: FnMut(u32, u32) -> Vec<u8>,
    {
        let mut data = Vec::with_capacity(width as usize * height as usize * channels as usize);
        for y in 0..height {
            for x in 0..width {
                let px = f(x, y);
                if px.len() != channels as usize {
                    return Err(Error::UnsupportedChannels(px.len() as u8));
                }
                data.extend_from_slice(&px);
            }
        }
        Self::from_raw(width, height, channels, data)
    }

    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn height(&self) -> u32 {
        self.height
    }

    pub fn channels(&self) -> u8 {
        self.channels
    }

    pub fn pixel_count(&self) -> usize {
        self.width as usize * self.height as usize
    }

    pub fn as_bytes(&self) -> &[u8] {
        &self.data
    }

    pub fn into_bytes(self) -> Vec<u8> {
        self.data
    }

    /// The samples of pixel `(x, y)`, or `None` outside the image.
    pub fn pixel(&self, x: u32, y: u32) -> Option<&[u8]> {
        if x >= self.width || y >= self.height {
            return None;
        }
        let c = self.channels as usize;
        let start = (y as usize * self.width as usize + x as usize) * c;
        Some(&self.data[start..start + c])
    }

    /// Samples of the pixel at raster index `idx`.
    #[inline]
    pub fn pixel_at(&self, idx: usize) -> &[u8] {
        let c = self.channels as usize;
        &self.data[idx * c..idx * c + c]
    }

    /// Builds a new image where raster position `i` takes the pixel found at
    /// raster position `source[i]` of `self`.
    pub(crate) fn gather(&self, source: &[usize]) -> ImageBuffer {
        debug_assert_eq!(source.len(), self.pixel_count());
        let c = self.channels as usize;
        let mut data = Vec::with_capacity(self.data.len());
        for &src in source {
            data.extend_from_slice(&self.data[src * c..src * c + c]);
        }
        ImageBuffer {
            width: self.width,
            height: self.height,
            channels: self.channels,
            data,
        }
    }

    /// Pixel tuples sorted lexicographically. Two images hold the same
    /// multiset of pixels iff these are equal.
    pub fn sorted_pixels(&self) -> Vec<Vec<u8>> {
        let mut px: Vec<Vec<u8>> = self
            .data
            .chunks_exact(self.channels as usize)
            .map(<[u8]>::to_vec)
            .collect();
        px.sort_unstable();
        px
    }
}
