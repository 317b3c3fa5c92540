use crate::fft::fftshift;
use crate::psd::{check_segment_params, periodogram};
use crate::{db_from_power, ensure_finite, Complex64, DspError, Result, Scale};

/// Short-time spectral matrix, frame-major: frame f occupies
/// `data[f*nfft .. (f+1)*nfft]`, DC-centered within each frame.
#[derive(Debug, Clone, PartialEq)]
pub struct StftMatrix {
    pub data: Vec<f64>,
    pub num_frames: usize,
    pub nfft: usize,
    pub hop: usize,
    pub scale: Scale,
}

impl StftMatrix {
    pub fn frame(&self, f: usize) -> &[f64] {
        &self.data[f * self.nfft..(f + 1) * self.nfft]
    }

    /// Converts linear power entries to dB, flooring at the module epsilon.
    pub fn to_db(&self) -> Result<StftMatrix> {
        if self.scale == Scale::Db {
            return Err(DspError::InvalidArgument(
                "matrix is already in dB".into(),
            ));
        }
        Ok(StftMatrix {
            data: self.data.iter().map(|&p| db_from_power(p)).collect(),
            num_frames: self.num_frames,
            nfft: self.nfft,
            hop: self.hop,
            scale: Scale::Db,
        })
    }
}

/// Per-frame windowed power spectra with the same normalization as `welch_psd`,
/// so a one-segment Welch estimate of a slice equals the matching frame.
pub fn stft(
    x: &[Complex64],
    nfft: usize,
    hop: usize,
    window: &[f64],
) -> Result<StftMatrix> {
    ensure_finite(x)?;
    let window_energy = check_segment_params(x.len(), nfft, window)?;
    if hop == 0 {
        return Err(DspError::InvalidArgument("hop must be at least 1".into()));
    }
    let num_frames = (x.len() - nfft) / hop + 1;

    let mut data = Vec::with_capacity(num_frames * nfft);
    for f in 0..num_frames {
        let seg = &x[f * hop..f * hop + nfft];
        let p = periodogram(seg, window, window_energy)?;
        data.extend(fftshift(&p));
    }

    Ok(StftMatrix {
        data,
        num_frames,
        nfft,
        hop,
        scale: Scale::Linear,
    })
}
