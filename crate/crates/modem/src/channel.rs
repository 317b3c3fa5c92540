use crate::rng::SplitMix64;
use crate::{Complex64, ModemError, Result};

/// Adds circularly-symmetric complex Gaussian noise at the requested SNR,
/// defined as total signal power over total noise power. `snr_db` of
/// plus infinity means no noise; output is then the input unchanged.
/// Deterministic for a given seed.
pub fn awgn(x: &[Complex64], snr_db: f64, seed: u64) -> Result<Vec<Complex64>> {
    if x.is_empty() {
        return Err(ModemError::InvalidArgument(
            "cannot add noise to an empty signal".into(),
        ));
    }
    if snr_db.is_nan() {
        return Err(ModemError::InvalidArgument("snr_db is NaN".into()));
    }
    if snr_db == f64::INFINITY {
        return Ok(x.to_vec());
    }
    let signal_power = x.iter().map(|c| c.norm_sqr()).sum::<f64>() / x.len() as f64;
    if signal_power == 0.0 {
        return Err(ModemError::InvalidArgument(
            "zero-power signal has no defined SNR".into(),
        ));
    }
    let noise_power = signal_power / 10f64.powf(snr_db / 10.0);
    let component_sigma = (noise_power / 2.0).sqrt();

    let mut rng = SplitMix64::new(seed);
    Ok(x.iter()
        .map(|&s| s + rng.next_complex_gaussian() * component_sigma)
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unit_tone(n: usize) -> Vec<Complex64> {
        (0..n)
            .map(|t| Complex64::from_polar(1.0, 0.05 * t as f64))
            .collect()
    }

    #[test]
    fn infinite_snr_is_identity() {
        let x = unit_tone(64);
        let y = awgn(&x, f64::INFINITY, 3).unwrap();
        assert_eq!(x, y);
    }

    #[test]
    fn empirical_snr_tracks_request() {
        let x = unit_tone(100_000);
        for snr in [0.0, 10.0, 20.0] {
            let y = awgn(&x, snr, 0xbeef).unwrap();
            let noise_power: f64 =
                x.iter().zip(&y).map(|(a, b)| (b - a).norm_sqr()).sum::<f64>() / x.len() as f64;
            let measured = 10.0 * (1.0 / noise_power).log10();
            assert!(
                (measured - snr).abs() < 0.2,
                "requested {snr} dB, measured {measured} dB"
            );
        }
    }

    #[test]
    fn same_seed_reproduces_output() {
        let x = unit_tone(256);
        let a = awgn(&x, 10.0, 77).unwrap();
        let b = awgn(&x, 10.0, 77).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn different_seeds_give_uncorrelated_noise() {
        let x = unit_tone(10_000);
        let a = awgn(&x, 0.0, 1).unwrap();
        let b = awgn(&x, 0.0, 2).unwrap();
        let na: Vec<f64> = x.iter().zip(&a).map(|(s, y)| (y - s).re).collect();
        let nb: Vec<f64> = x.iter().zip(&b).map(|(s, y)| (y - s).re).collect();
        let dot: f64 = na.iter().zip(&nb).map(|(p, q)| p * q).sum();
        let ea: f64 = na.iter().map(|p| p * p).sum();
        let eb: f64 = nb.iter().map(|q| q * q).sum();
        let corr = dot / (ea * eb).sqrt();
        assert!(corr.abs() < 0.05, "correlation {corr}");
    }

    #[test]
    fn zero_power_and_empty_inputs_rejected() {
        assert!(awgn(&[], 10.0, 0).is_err());
        let zeros = vec![Complex64::new(0.0, 0.0); 16];
        assert!(awgn(&zeros, 10.0, 0).is_err());
    }
}
