use crate::pulse::{gaussian_taps, rrc_taps};
use crate::{
    Complex64, ConstellationMap, ModemConfig, ModemError, ModulationScheme, PulseShape, Result,
};

/// GFSK Gaussian pulse span in symbols; fixed, the filter tail is negligible
/// beyond this at any practical BT.
pub const GFSK_SPAN_SYMBOLS: usize = 4;

/// Centered "same" convolution: output length equals input length, tap k of
/// the kernel multiplies x[n + half - k].
fn conv_same_real(x: &[Complex64], taps: &[f64]) -> Vec<Complex64> {
    let half = (taps.len() - 1) / 2;
    let n = x.len();
    let mut y = vec![Complex64::new(0.0, 0.0); n];
    for (k, &h) in taps.iter().enumerate() {
        if h == 0.0 {
            continue;
        }
        // y[n'] += h * x[n' + half - k]; shift the loop bounds so the x index
        // stays in range without per-sample branches.
        let offset = half as isize - k as isize;
        let start = (-offset).max(0) as usize;
        let end = (n as isize).min(n as isize - offset) as usize;
        for i in start..end {
            y[i] += x[(i as isize + offset) as usize] * h;
        }
    }
    y
}

fn conv_same_scalar(x: &[f64], taps: &[f64]) -> Vec<f64> {
    let half = (taps.len() - 1) / 2;
    let n = x.len();
    let mut y = vec![0.0; n];
    for (k, &h) in taps.iter().enumerate() {
        let offset = half as isize - k as isize;
        let start = (-offset).max(0) as usize;
        let end = (n as isize).min(n as isize - offset) as usize;
        for i in start..end {
            y[i] += x[(i as isize + offset) as usize] * h;
        }
    }
    y
}

/// Modulates a bit sequence into a unit-average-power baseband signal of
/// bits/bits_per_symbol * sps samples. PSK/QAM symbols are Gray-mapped,
/// upsampled, and pulse-shaped; GFSK goes through `gfsk_modulate`.
pub fn modulate(
    scheme: ModulationScheme,
    bits: &[u8],
    cfg: &ModemConfig,
) -> Result<Vec<Complex64>> {
    cfg.validate()?;
    if scheme == ModulationScheme::Gfsk {
        return gfsk_modulate(bits, cfg);
    }

    let map = ConstellationMap::for_scheme(scheme)?;
    let symbols = map.map_bits(bits)?;
    let sps = cfg.sps;

    match cfg.pulse {
        PulseShape::Rect => {
            // Sample-and-hold. Constellation power is already 1.
            let mut out = Vec::with_capacity(symbols.len() * sps);
            for s in symbols {
                out.extend(std::iter::repeat(s).take(sps));
            }
            Ok(out)
        }
        PulseShape::Rrc {
            rolloff,
            span_symbols,
        } => {
            let taps = rrc_taps(rolloff, sps, span_symbols)?;
            let mut upsampled = vec![Complex64::new(0.0, 0.0); symbols.len() * sps];
            for (i, s) in symbols.iter().enumerate() {
                upsampled[i * sps] = *s;
            }
            let mut shaped = conv_same_real(&upsampled, &taps);
            // Zero-stuffing leaves 1/sps of the symbol power; the unit-energy
            // filter preserves it, so sqrt(sps) restores unit average power.
            let gain = (sps as f64).sqrt();
            for v in shaped.iter_mut() {
                *v *= gain;
            }
            Ok(shaped)
        }
    }
}

/// Constant-envelope GFSK: NRZ bits held for a symbol period, smoothed by a
/// unit-sum Gaussian filter (BT = cfg.gfsk_bt), integrated into phase with
/// peak per-sample increment pi * h / sps.
pub fn gfsk_modulate(bits: &[u8], cfg: &ModemConfig) -> Result<Vec<Complex64>> {
    cfg.validate()?;
    if bits.is_empty() {
        return Err(ModemError::InvalidArgument(
            "GFSK needs at least one bit".into(),
        ));
    }
    if let Some(bad) = bits.iter().find(|&&b| b > 1) {
        return Err(ModemError::InvalidArgument(format!(
            "bits must be 0 or 1, got {bad}"
        )));
    }
    let sps = cfg.sps;
    let mut nrz = Vec::with_capacity(bits.len() * sps);
    for &b in bits {
        let level = 2.0 * b as f64 - 1.0;
        nrz.extend(std::iter::repeat(level).take(sps));
    }

    let taps = gaussian_taps(cfg.gfsk_bt, sps, GFSK_SPAN_SYMBOLS)?;
    let freq = conv_same_scalar(&nrz, &taps);

    let rate = std::f64::consts::PI * cfg.gfsk_h / sps as f64;
    let mut phase = 0.0;
    Ok(freq
        .iter()
        .map(|&f| {
            phase += rate * f;
            Complex64::from_polar(1.0, phase)
        })
        .collect())
}
