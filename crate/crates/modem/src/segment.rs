use crate::{Complex64, ModemError, ModulationScheme, Result};

/// Fixed segment length used for the classifier dataset.
pub const SEGMENT_LEN: usize = 512;

/// One labeled, normalized IQ vector plus the provenance needed to
/// regenerate it exactly.
#[derive(Debug, Clone, PartialEq)]
pub struct IqSegment {
    pub samples: Vec<Complex64>,
    pub label: ModulationScheme,
    pub snr_db: f64,
    pub seed: u64,
}

impl IqSegment {
    pub fn new(
        samples: Vec<Complex64>,
        label: ModulationScheme,
        snr_db: f64,
        seed: u64,
    ) -> Result<IqSegment> {
        if samples.len() != SEGMENT_LEN {
            return Err(ModemError::InvalidArgument(format!(
                "segment must hold exactly {SEGMENT_LEN} samples, got {}",
                samples.len()
            )));
        }
        Ok(IqSegment {
            samples,
            label,
            snr_db,
            seed,
        })
    }
}

/// Cuts a signal into fixed-length windows starting every `stride` samples.
/// The trailing remainder shorter than `len` is dropped.
pub fn segment(x: &[Complex64], len: usize, stride: usize) -> Vec<Vec<Complex64>> {
    assert!(len >= 1 && stride >= 1, "len and stride must be at least 1");
    if x.len() < len {
        return Vec::new();
    }
    let count = (x.len() - len) / stride + 1;
    (0..count).map(|i| x[i * stride..i * stride + len].to_vec()).collect()
}

/// Scales I and Q by the single factor max(|I| union |Q|), putting every
/// component in [-1, 1] with at least one endpoint hit while preserving the
/// I/Q power ratio.
pub fn normalize_segment(seg: &[Complex64]) -> Result<Vec<Complex64>> {
    let m = seg
        .iter()
        .map(|c| c.re.abs().max(c.im.abs()))
        .fold(0.0, f64::max);
    if m == 0.0 {
        return Err(ModemError::InvalidArgument(
            "all-zero segment cannot be normalized".into(),
        ));
    }
    if !m.is_finite() {
        return Err(ModemError::InvalidArgument(
            "segment contains non-finite samples".into(),
        ));
    }
    Ok(seg.iter().map(|c| Complex64::new(c.re / m, c.im / m)).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn ramp(n: usize) -> Vec<Complex64> {
        (0..n).map(|i| Complex64::new(i as f64, -(i as f64))).collect()
    }

    #[test]
    fn whole_multiple_gives_full_count() {
        let x = ramp(512 * 50);
        let segs = segment(&x, 512, 512);
        assert_eq!(segs.len(), 50);
        assert!(segs.iter().all(|s| s.len() == 512));
    }

    #[test]
    fn remainder_is_dropped() {
        let x = ramp(1000);
        let segs = segment(&x, 512, 512);
        assert_eq!(segs.len(), 1);
        assert_eq!(segs[0][511], x[511]);
    }

    #[test]
    fn too_short_input_gives_empty_list() {
        let x = ramp(511);
        assert!(segment(&x, 512, 512).is_empty());
    }

    #[test]
    fn overlapping_stride_counts_correctly() {
        let x = ramp(512);
        let segs = segment(&x, 128, 64);
        assert_eq!(segs.len(), (512 - 128) / 64 + 1);
    }

    #[test]
    fn normalize_worked_example() {
        let seg = vec![Complex64::new(2.0, 1.0), Complex64::new(-4.0, 1.0)];
        let out = normalize_segment(&seg).unwrap();
        assert_eq!(out[0], Complex64::new(0.5, 0.25));
        assert_eq!(out[1], Complex64::new(-1.0, 0.25));
    }

    #[test]
    fn normalize_is_idempotent() {
        let seg = vec![Complex64::new(0.3, -2.0), Complex64::new(1.5, 0.1)];
        let once = normalize_segment(&seg).unwrap();
        let twice = normalize_segment(&once).unwrap();
        assert_eq!(once, twice);
    }

    #[test]
    fn normalize_rejects_all_zero() {
        let seg = vec![Complex64::new(0.0, 0.0); 4];
        assert!(normalize_segment(&seg).is_err());
    }

    #[test]
    fn labeled_segment_enforces_length() {
        let ok = IqSegment::new(
            vec![Complex64::new(1.0, 0.0); SEGMENT_LEN],
            ModulationScheme::Bpsk,
            10.0,
            1,
        );
        assert!(ok.is_ok());
        let bad = IqSegment::new(
            vec![Complex64::new(1.0, 0.0); 100],
            ModulationScheme::Bpsk,
            10.0,
            1,
        );
        assert!(bad.is_err());
    }

    proptest! {
        #[test]
        fn segmenting_a_concatenation_recovers_the_parts(
            n_segs in 1usize..6, len in 1usize..64, seed in any::<u64>()
        ) {
            let mut rng = crate::rng::SplitMix64::new(seed);
            let parts: Vec<Vec<Complex64>> = (0..n_segs)
                .map(|_| (0..len)
                    .map(|_| Complex64::new(rng.next_f64(), rng.next_f64()))
                    .collect())
                .collect();
            let whole: Vec<Complex64> = parts.iter().flatten().cloned().collect();
            let back = segment(&whole, len, len);
            prop_assert_eq!(back, parts);
        }

        #[test]
        fn normalize_is_invariant_to_positive_scaling(
            scale_exp in -8i32..8, seed in any::<u64>()
        ) {
            let mut rng = crate::rng::SplitMix64::new(seed);
            let seg: Vec<Complex64> = (0..16)
                .map(|_| Complex64::new(rng.next_f64() - 0.5, rng.next_f64() - 0.5))
                .collect();
            prop_assume!(seg.iter().any(|c| c.re != 0.0 || c.im != 0.0));
            // Powers of two scale exactly in binary floating point.
            let alpha = 2f64.powi(scale_exp);
            let scaled: Vec<Complex64> = seg.iter().map(|c| c * alpha).collect();
            prop_assert_eq!(
                normalize_segment(&seg).unwrap(),
                normalize_segment(&scaled).unwrap()
            );
        }

        #[test]
        fn normalized_output_peaks_at_one(seed in any::<u64>()) {
            let mut rng = crate::rng::SplitMix64::new(seed);
            let seg: Vec<Complex64> = (0..32)
                .map(|_| Complex64::new(rng.next_f64() * 4.0 - 2.0, rng.next_f64() * 4.0 - 2.0))
                .collect();
            let out = normalize_segment(&seg).unwrap();
            let m = out.iter().map(|c| c.re.abs().max(c.im.abs())).fold(0.0, f64::max);
            prop_assert!((m - 1.0).abs() < 1e-15);
            prop_assert!(out.iter().all(|c| c.re.abs() <= 1.0 && c.im.abs() <= 1.0));
        }
    }
}
