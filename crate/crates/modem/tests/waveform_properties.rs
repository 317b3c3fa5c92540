//! Whole-waveform checks: steady-state power calibration, spectral shape of
//! GFSK, and cross-scheme invariants that need real spectra to verify.

use hybridsig_dsp::{hann_window, welch_psd};
use hybridsig_modem::rng::SplitMix64;
use hybridsig_modem::{
    gfsk_modulate, modulate, Complex64, ModemConfig, ModulationScheme, PulseShape,
};

/// Bit stream whose symbols visit every constellation point equally often,
/// in a seeded shuffled order. Keeps the mean symbol power exactly 1 so the
/// power test measures pulse-shaping behavior, not symbol-draw luck.
fn balanced_bits(scheme: ModulationScheme, nsym: usize, seed: u64) -> Vec<u8> {
    let bps = scheme.bits_per_symbol();
    let npatterns = 1usize << bps;
    assert_eq!(nsym % npatterns, 0);
    let mut patterns: Vec<usize> = (0..nsym).map(|i| i % npatterns).collect();
    let mut rng = SplitMix64::new(seed);
    for i in (1..patterns.len()).rev() {
        let j = (rng.next_u64() % (i as u64 + 1)) as usize;
        patterns.swap(i, j);
    }
    patterns
        .iter()
        .flat_map(|p| (0..bps).rev().map(move |k| ((p >> k) & 1) as u8))
        .collect()
}

fn mean_power(x: &[Complex64]) -> f64 {
    x.iter().map(|c| c.norm_sqr()).sum::<f64>() / x.len() as f64
}

#[test]
fn rrc_shaped_signals_have_unit_interior_power() {
    let cfg = ModemConfig::default();
    let span_samples = 11 * cfg.sps;
    for (scheme, seed) in [
        (ModulationScheme::Bpsk, 11u64),
        (ModulationScheme::Qpsk, 12),
        (ModulationScheme::Qam16, 13),
    ] {
        let bits = balanced_bits(scheme, 65_536, seed);
        let x = modulate(scheme, &bits, &cfg).unwrap();
        let interior = &x[span_samples..x.len() - span_samples];
        let p = mean_power(interior);
        assert!(
            (p - 1.0).abs() < 1e-3,
            "{scheme}: interior power {p} off unity"
        );
    }
}

#[test]
fn rect_and_gfsk_signals_have_exactly_unit_power() {
    let cfg = ModemConfig {
        pulse: PulseShape::Rect,
        ..ModemConfig::default()
    };
    for (scheme, seed) in [
        (ModulationScheme::Bpsk, 21u64),
        (ModulationScheme::Qpsk, 22),
        (ModulationScheme::Qam16, 23),
    ] {
        let bits = balanced_bits(scheme, 4096, seed);
        let x = modulate(scheme, &bits, &cfg).unwrap();
        let p = mean_power(&x);
        assert!((p - 1.0).abs() < 1e-12, "{scheme}: power {p}");
    }
    let bits = balanced_bits(ModulationScheme::Gfsk, 4096, 24);
    let x = gfsk_modulate(&bits, &ModemConfig::default()).unwrap();
    let p = mean_power(&x);
    assert!((p - 1.0).abs() < 1e-12, "gfsk: power {p}");
}

#[test]
fn bpsk_imaginary_part_is_identically_zero() {
    let bits = balanced_bits(ModulationScheme::Bpsk, 256, 31);
    for pulse in [
        PulseShape::Rect,
        PulseShape::Rrc {
            rolloff: 0.35,
            span_symbols: 11,
        },
    ] {
        let cfg = ModemConfig {
            pulse,
            ..ModemConfig::default()
        };
        let x = modulate(ModulationScheme::Bpsk, &bits, &cfg).unwrap();
        assert!(x.iter().all(|c| c.im == 0.0), "{pulse:?}");
    }
}

#[test]
fn gfsk_alternating_bits_show_two_mirrored_spectral_peaks() {
    // Alternating bits at h=1, sps=8 put the instantaneous frequency at
    // +-1/(2*8) cycles/sample, i.e. +-16 bins from center at nfft=256.
    let cfg = ModemConfig::default();
    let bits: Vec<u8> = (0..64).map(|i| (i % 2) as u8).collect();
    let x = gfsk_modulate(&bits, &cfg).unwrap();
    assert_eq!(x.len(), 512);

    let w = hann_window(256).unwrap();
    let p = welch_psd(&x, 256, 0.5, &w).unwrap();
    let (lo, hi) = (128 - 16, 128 + 16);

    for b in [lo, hi] {
        assert!(
            p.bins[b] > p.bins[b - 1] && p.bins[b] > p.bins[b + 1],
            "bin {b} is not a local maximum"
        );
    }
    let rel_asym = (p.bins[lo] - p.bins[hi]).abs() / p.bins[lo].max(p.bins[hi]);
    assert!(rel_asym < 0.05, "peaks not mirrored: {rel_asym}");

    // Outside the two deviation peaks and the DC line (the periodic phase
    // trajectory has a nonzero mean), everything else is far below.
    let exempt = |b: usize| {
        (lo - 1..=lo + 1).contains(&b)
            || (hi - 1..=hi + 1).contains(&b)
            || (127..=129).contains(&b)
    };
    for (b, &v) in p.bins.iter().enumerate() {
        if !exempt(b) {
            assert!(
                p.bins[lo] > 2.0 * v,
                "bin {b} ({v}) rivals the deviation peak ({})",
                p.bins[lo]
            );
        }
    }
}

#[test]
fn gfsk_random_bits_concentrate_power_in_the_deviation_band() {
    let cfg = ModemConfig::default();
    let mut rng = SplitMix64::new(41);
    let bits: Vec<u8> = (0..512).map(|_| rng.next_bit()).collect();
    let x = gfsk_modulate(&bits, &cfg).unwrap();
    let w = hann_window(256).unwrap();
    let p = welch_psd(&x, 256, 0.5, &w).unwrap();

    // Band between the deviation extremes, padded by a couple of bins.
    let band: f64 = p.bins[110..=146].iter().sum();
    let total: f64 = p.bins.iter().sum();
    assert!(band / total > 0.85, "in-band fraction {}", band / total);
}
