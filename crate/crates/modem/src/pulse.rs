use crate::{ModemError, Result};
use std::f64::consts::PI;

/// Root-raised-cosine impulse response over `span_symbols` symbols at `sps`
/// samples per symbol: span_symbols*sps + 1 taps, symmetric, unit energy.
/// The removable singularities at t = 0 and |t| = T/(4 rolloff) are evaluated
/// by their limits.
pub fn rrc_taps(rolloff: f64, sps: usize, span_symbols: usize) -> Result<Vec<f64>> {
    if !(rolloff > 0.0 && rolloff <= 1.0) {
        return Err(ModemError::InvalidArgument(format!(
            "rolloff must lie in (0, 1], got {rolloff}"
        )));
    }
    if sps == 0 || span_symbols == 0 {
        return Err(ModemError::InvalidArgument(
            "sps and span_symbols must be at least 1".into(),
        ));
    }
    let ntaps = span_symbols * sps + 1;
    if ntaps % 2 == 0 {
        return Err(ModemError::InvalidArgument(format!(
            "span_symbols*sps + 1 = {ntaps} must be odd"
        )));
    }
    let center = (ntaps - 1) / 2;
    let beta = rolloff;

    let mut taps: Vec<f64> = (0..ntaps)
        .map(|k| {
            // Symbol-period units: t = tau symbols from the pulse center.
            let tau = (k as f64 - center as f64) / sps as f64;
            if tau == 0.0 {
                1.0 - beta + 4.0 * beta / PI
            } else if (1.0 - (4.0 * beta * tau).powi(2)).abs() < 1e-10 {
                (beta / 2f64.sqrt())
                    * ((1.0 + 2.0 / PI) * (PI / (4.0 * beta)).sin()
                        + (1.0 - 2.0 / PI) * (PI / (4.0 * beta)).cos())
            } else {
                ((PI * tau * (1.0 - beta)).sin()
                    + 4.0 * beta * tau * (PI * tau * (1.0 + beta)).cos())
                    / (PI * tau * (1.0 - (4.0 * beta * tau).powi(2)))
            }
        })
        .collect();

    let energy: f64 = taps.iter().map(|t| t * t).sum();
    let norm = energy.sqrt();
    for t in taps.iter_mut() {
        *t /= norm;
    }
    Ok(taps)
}

/// Gaussian frequency pulse for GFSK: span_symbols*sps + 1 taps of
/// exp(-2 pi^2 bt^2 tau^2 / ln 2), normalized to unit sum so a held NRZ
/// level passes through with unchanged steady-state amplitude.
pub fn gaussian_taps(bt: f64, sps: usize, span_symbols: usize) -> Result<Vec<f64>> {
    if !(bt > 0.0) {
        return Err(ModemError::InvalidArgument(format!(
            "bandwidth-time product must be positive, got {bt}"
        )));
    }
    if sps == 0 || span_symbols == 0 {
        return Err(ModemError::InvalidArgument(
            "sps and span_symbols must be at least 1".into(),
        ));
    }
    let ntaps = span_symbols * sps + 1;
    let center = (ntaps - 1) / 2;
    let coeff = 2.0 * PI * PI * bt * bt / 2f64.ln();

    let mut taps: Vec<f64> = (0..ntaps)
        .map(|k| {
            let tau = (k as f64 - center as f64) / sps as f64;
            (-coeff * tau * tau).exp()
        })
        .collect();

    let sum: f64 = taps.iter().sum();
    for t in taps.iter_mut() {
        *t /= sum;
    }
    Ok(taps)
}
