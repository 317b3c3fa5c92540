use crate::{RasterError, Result};
use serde::{Deserialize, Serialize};

/// Row-major, channel-interleaved pixel raster with values in [0,1].
/// Pixel (x, y, c) lives at index (y*width + x)*channels + c.
#[derive(Debug, Clone, PartialEq)]
pub struct RasterImage {
    pub width: usize,
    pub height: usize,
    pub channels: usize,
    pub pixels: Vec<f32>,
}

impl RasterImage {
    pub fn new(width: usize, height: usize, channels: usize, pixels: Vec<f32>) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(RasterError::InvalidArgument(format!(
                "image dimensions must be positive, got {width}x{height}"
            )));
        }
        if !(1..=3).contains(&channels) {
            return Err(RasterError::InvalidArgument(format!(
                "channel count must be 1, 2, or 3, got {channels}"
            )));
        }
        if pixels.len() != width * height * channels {
            return Err(RasterError::InvalidArgument(format!(
                "pixel buffer holds {} values, expected {}",
                pixels.len(),
                width * height * channels
            )));
        }
        if let Some(bad) = pixels.iter().find(|v| !(0.0..=1.0).contains(*v)) {
            return Err(RasterError::InvalidArgument(format!(
                "pixel value {bad} outside [0,1]"
            )));
        }
        Ok(RasterImage {
            width,
            height,
            channels,
            pixels,
        })
    }

    pub fn zeros(width: usize, height: usize, channels: usize) -> Result<Self> {
        Self::new(width, height, channels, vec![0.0; width * height * channels])
    }

    pub fn get(&self, x: usize, y: usize, c: usize) -> f32 {
        self.pixels[(y * self.width + x) * self.channels + c]
    }

    pub fn set(&mut self, x: usize, y: usize, c: usize, v: f32) {
        self.pixels[(y * self.width + x) * self.channels + c] = v;
    }
}

/// The four image representations a segment can be rendered into.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Representation {
    #[serde(rename = "time")]
    TimeIq,
    #[serde(rename = "psd")]
    Psd,
    #[serde(rename = "spec")]
    Spectrogram,
    #[serde(rename = "hybrid")]
    Hybrid,
}

impl Representation {
    pub const ALL: [Representation; 4] = [
        Representation::TimeIq,
        Representation::Psd,
        Representation::Spectrogram,
        Representation::Hybrid,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Representation::TimeIq => "time",
            Representation::Psd => "psd",
            Representation::Spectrogram => "spec",
            Representation::Hybrid => "hybrid",
        }
    }

    /// Channels the classifier input carries for this representation:
    /// I and Q planes stacked for time, single plane for the spectral pair,
    /// RGB for the hybrid composite.
    pub fn model_channels(self) -> usize {
        match self {
            Representation::TimeIq => 2,
            Representation::Psd | Representation::Spectrogram => 1,
            Representation::Hybrid => 3,
        }
    }

    /// Image files emitted per segment.
    pub fn files_per_segment(self) -> usize {
        match self {
            Representation::TimeIq => 2,
            _ => 1,
        }
    }
}

impl std::fmt::Display for Representation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for Representation {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "time" => Ok(Representation::TimeIq),
            "psd" => Ok(Representation::Psd),
            "spec" => Ok(Representation::Spectrogram),
            "hybrid" => Ok(Representation::Hybrid),
            other => Err(format!(
                "unknown representation: {other} (expected time|psd|spec|hybrid)"
            )),
        }
    }
}
