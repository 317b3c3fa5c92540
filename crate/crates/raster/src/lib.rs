//! Deterministic rendering of signals into fixed-size grayscale and RGB
//! rasters, plus binary PGM/PPM codecs. No axes, ticks, or anti-aliasing:
//! every pixel is a pure function of the input data, so identical inputs
//! give byte-identical files on any platform.

mod codec;
mod image;
mod line;
mod render;

pub use codec::{decode_image, encode_image};
pub use image::{RasterImage, Representation};
pub use render::{
    compose_hybrid, extract_channel, raster_psd, raster_spectrogram, raster_timeseries, stack_iq,
};

#[derive(Debug, thiserror::Error)]
pub enum RasterError {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("format error: {0}")]
    Format(String),
}

pub type Result<T> = std::result::Result<T, RasterError>;
