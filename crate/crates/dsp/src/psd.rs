use crate::fft::{fft, fftshift};
use crate::{db_from_power, ensure_finite, Complex64, DspError, Result, Scale};

/// Welch power spectral density estimate. `bins` are DC-centered (fftshifted).
#[derive(Debug, Clone, PartialEq)]
pub struct PsdEstimate {
    pub bins: Vec<f64>,
    pub nfft: usize,
    pub scale: Scale,
}

impl PsdEstimate {
    /// Converts linear power bins to dB, flooring at the module epsilon.
    pub fn to_db(&self) -> Result<PsdEstimate> {
        if self.scale == Scale::Db {
            return Err(DspError::InvalidArgument(
                "estimate is already in dB".into(),
            ));
        }
        Ok(PsdEstimate {
            bins: self.bins.iter().map(|&p| db_from_power(p)).collect(),
            nfft: self.nfft,
            scale: Scale::Db,
        })
    }
}

pub(crate) fn check_segment_params(
    xlen: usize,
    nfft: usize,
    window: &[f64],
) -> Result<f64> {
    if nfft == 0 || !nfft.is_power_of_two() {
        return Err(DspError::InvalidArgument(format!(
            "nfft must be a power of two, got {nfft}"
        )));
    }
    if xlen < nfft {
        return Err(DspError::InvalidArgument(format!(
            "input length {xlen} is shorter than nfft {nfft}"
        )));
    }
    if window.len() != nfft {
        return Err(DspError::InvalidArgument(format!(
            "window length {} does not match nfft {nfft}",
            window.len()
        )));
    }
    let energy: f64 = window.iter().map(|w| w * w).sum();
    if !energy.is_finite() || energy <= 0.0 {
        return Err(DspError::InvalidArgument(
            "window energy must be positive and finite".into(),
        ));
    }
    Ok(energy)
}

/// One windowed periodogram: |FFT(window .* segment)|^2 / window energy, unshifted.
pub(crate) fn periodogram(
    segment: &[Complex64],
    window: &[f64],
    window_energy: f64,
) -> Result<Vec<f64>> {
    let tapered: Vec<Complex64> = segment
        .iter()
        .zip(window)
        .map(|(x, w)| x * w)
        .collect();
    let spectrum = fft(&tapered)?;
    Ok(spectrum
        .iter()
        .map(|c| c.norm_sqr() / window_energy)
        .collect())
}

/// Welch PSD: mean of windowed periodograms over segments stepping by
/// nfft*(1-overlap), output fftshifted, linear scale.
pub fn welch_psd(
    x: &[Complex64],
    nfft: usize,
    overlap: f64,
    window: &[f64],
) -> Result<PsdEstimate> {
    ensure_finite(x)?;
    let window_energy = check_segment_params(x.len(), nfft, window)?;
    if !(0.0..1.0).contains(&overlap) {
        return Err(DspError::InvalidArgument(format!(
            "overlap must lie in [0, 1), got {overlap}"
        )));
    }
    let step = ((nfft as f64 * (1.0 - overlap)).round() as usize).max(1);
    let count = (x.len() - nfft) / step + 1;

    let mut acc = vec![0.0f64; nfft];
    for i in 0..count {
        let seg = &x[i * step..i * step + nfft];
        let p = periodogram(seg, window, window_energy)?;
        for (a, v) in acc.iter_mut().zip(p) {
            *a += v;
        }
    }
    let scale = 1.0 / count as f64;
    for a in acc.iter_mut() {
        *a *= scale;
    }

    Ok(PsdEstimate {
        bins: fftshift(&acc),
        nfft,
        scale: Scale::Linear,
    })
}
