//! Complex-baseband signal numerics shared by the rendering and modem stages:
//! radix-2 FFT, periodic Hann window, Welch PSD estimation and the STFT.
//!
//! Everything here is a pure function on immutable inputs. All math runs in
//! double precision; non-finite samples are rejected at every entry point.

mod fft;
mod psd;
mod stft;
mod window;

pub use fft::{fft, fftshift, ifft};
pub use psd::{welch_psd, PsdEstimate};
pub use stft::{stft, StftMatrix};
pub use window::hann_window;

pub use num_complex::Complex64;

/// Floor applied to power values before taking the log, keeping dB finite.
pub const DB_EPSILON: f64 = 1e-12;

/// Scale tag carried by spectral estimates.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scale {
    Linear,
    Db,
}

#[derive(Debug, thiserror::Error)]
pub enum DspError {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T> = std::result::Result<T, DspError>;

pub(crate) fn ensure_finite(x: &[Complex64]) -> Result<()> {
    if x.iter().any(|c| !c.re.is_finite() || !c.im.is_finite()) {
        return Err(DspError::InvalidArgument(
            "input contains non-finite samples".into(),
        ));
    }
    Ok(())
}

pub(crate) fn db_from_power(p: f64) -> f64 {
    10.0 * p.max(DB_EPSILON).log10()
}
