use std::fmt;
use std::str::FromStr;

use eit_core::rng::Fnv1a64;
use eit_core::ImageBuffer;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

/// 64-bit FNV-1a content digest, written as 16 lowercase hex digits.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Digest(pub u64);

impl Digest {
    /// Digest of decoded pixels: width and height as little-endian u32, the
    /// channel count as one byte, then the raw interleaved samples.
    pub fn of_image(img: &ImageBuffer) -> Self {
        let mut h = Fnv1a64::default();
        h.update(&img.width().to_le_bytes());
        h.update(&img.height().to_le_bytes());
        h.update(&[img.channels()]);
        h.update(img.as_bytes());
        Digest(h.finish())
    }
}

impl fmt::Display for Digest {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:016x}", self.0)
    }
}

impl FromStr for Digest {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        if s.len() != 16 {
            return Err(format!("digest `{s}` is not 16 hex digits"));
        }
        u64::from_str_radix(s, 16)
            .map(Digest)
            .map_err(|e| format!("digest `{s}`: {e}"))
    }
}

impl Serialize for Digest {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Digest {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}
