//! Gaussian-noise corruption at ImageNet-C severities.
//!
//! Noise is drawn in pairs with Box–Muller from one SplitMix64 stream seeded
//! with the image seed. Each pair consumes two outputs `a`, `b`:
//! `u1 = ((a >> 11) + 1) * 2^-53` (in `(0, 1]`), `u2 = (b >> 11) * 2^-53`,
//! `r = sqrt(-2 ln u1)`, giving `r cos(2 pi u2)` then `r sin(2 pi u2)`.
//! Samples are assigned in storage order (pixel by pixel, channel by channel).

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::image::ImageBuffer;
use crate::rng::SplitMix64;

/// Noise standard deviation per severity, on the unit intensity scale.
const SIGMAS: [f64; 5] = [0.08, 0.12, 0.18, 0.26, 0.38];

/// Corruption intensity, 1 through 5.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "i64", into = "u8")]
pub struct Severity(u8);

impl Severity {
    pub const ALL: [Severity; 5] = [
        Severity(1),
        Severity(2),
        Severity(3),
        Severity(4),
        Severity(5),
    ];

    pub fn new(level: i64) -> Result<Self> {
        if (1..=5).contains(&level) {
            Ok(Self(level as u8))
        } else {
            Err(Error::SeverityOutOfRange(level))
        }
    }

    pub fn level(self) -> u8 {
        self.0
    }

    pub fn sigma(self) -> f64 {
        SIGMAS[self.0 as usize - 1]
    }
}

impl TryFrom<i64> for Severity {
    type Error = Error;
    fn try_from(level: i64) -> Result<Self> {
        Self::new(level)
    }
}

impl From<Severity> for u8 {
    fn from(s: Severity) -> u8 {
        s.0
    }
}

pub fn severity_sigma(level: i64) -> Result<f64> {
    Severity::new(level).map(Severity::sigma)
}

struct BoxMuller {
    rng: SplitMix64,
    spare: Option<f64>,
}

impl BoxMuller {
    fn new(seed: u64) -> Self {
        Self {
            rng: SplitMix64::new(seed),
            spare: None,
        }
    }

    fn next(&mut self) -> f64 {
        if let Some(z) = self.spare.take() {
            return z;
        }
        let u1 = ((self.rng.next_u64() >> 11) + 1) as f64 * (1.0 / (1u64 << 53) as f64);
        let u2 = self.rng.next_f64();
        let r = (-2.0 * u1.ln()).sqrt();
        let theta = std::f64::consts::TAU * u2;
        self.spare = Some(r * theta.sin());
        r * theta.cos()
    }
}

/// `x' = round(clip(x / 255 + N(0, sigma^2), 0, 1) * 255)`, per sample,
/// rounding half away from zero.
pub fn gaussian_noise(img: &ImageBuffer, severity: Severity, seed: u64) -> ImageBuffer {
    let sigma = severity.sigma();
    let mut normal = BoxMuller::new(seed);
    let data = img
        .as_bytes()
        .iter()
        .map(|&x| {
            let v = (f64::from(x) / 255.0 + sigma * normal.next()).clamp(0.0, 1.0);
            (v * 255.0).round() as u8
        })
        .collect();
    ImageBuffer::from_raw(img.width(), img.height(), img.channels(), data)
        .expect("same geometry as input")
}
