//! Labeled baseband signal generation for the four modulation classes:
//! Gray-mapped PSK/QAM with rectangular or root-raised-cosine pulses, GFSK
//! with a Gaussian frequency pulse, AWGN impairment, and segmentation into
//! fixed-length IQ vectors.
//!
//! All randomness flows through explicit seeds, so every sample here is
//! reproducible byte for byte.

mod channel;
mod config;
mod constellation;
mod modulate;
mod pulse;
pub mod rng;
mod scheme;
mod segment;

pub use channel::awgn;
pub use config::{ModemConfig, PulseShape};
pub use constellation::ConstellationMap;
pub use modulate::{gfsk_modulate, modulate, GFSK_SPAN_SYMBOLS};
pub use pulse::{gaussian_taps, rrc_taps};
pub use scheme::ModulationScheme;
pub use segment::{normalize_segment, segment, IqSegment, SEGMENT_LEN};

pub use num_complex::Complex64;

#[derive(Debug, thiserror::Error)]
pub enum ModemError {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T> = std::result::Result<T, ModemError>;
