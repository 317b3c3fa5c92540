//! Dataset synthesis: per class, modulate a long random bit stream, push it
//! through the AWGN channel, slice non-overlapping 512-sample segments, and
//! persist them with a manifest. Train/val segments come from one signal
//! realization; test segments come from an independently seeded one so
//! adjacent-segment correlation cannot leak across the evaluation boundary.

use std::path::Path;

use hybridsig_modem::rng::{derive_seed, random_bits, SplitMix64};
use hybridsig_modem::{
    awgn, modulate, normalize_segment, segment, Complex64, ModulationScheme, PulseShape,
    GFSK_SPAN_SYMBOLS, SEGMENT_LEN,
};

use crate::manifest::{DatasetManifest, ManifestEntry, Split, MANIFEST_VERSION};
use crate::{streams, ExperimentConfig, PipelineError, Result};

/// Little-endian f32 interleaved I,Q — 4096 bytes per 512-sample segment.
pub fn write_iq(path: &Path, samples: &[Complex64]) -> Result<()> {
    let mut bytes = Vec::with_capacity(samples.len() * 8);
    for s in samples {
        bytes.extend_from_slice(&(s.re as f32).to_le_bytes());
        bytes.extend_from_slice(&(s.im as f32).to_le_bytes());
    }
    std::fs::write(path, bytes).map_err(|e| PipelineError::io(path, e))
}

pub fn read_iq(path: &Path) -> Result<Vec<Complex64>> {
    let bytes = std::fs::read(path).map_err(|e| PipelineError::io(path, e))?;
    if bytes.len() != SEGMENT_LEN * 8 {
        return Err(PipelineError::Format(format!(
            "{}: expected {} bytes ({} complex samples), got {}",
            path.display(),
            SEGMENT_LEN * 8,
            SEGMENT_LEN,
            bytes.len()
        )));
    }
    Ok(bytes
        .chunks_exact(8)
        .map(|c| {
            Complex64::new(
                f32::from_le_bytes(c[0..4].try_into().unwrap()) as f64,
                f32::from_le_bytes(c[4..8].try_into().unwrap()) as f64,
            )
        })
        .collect())
}

/// Pulse-shaping transient length in samples: segments are cut only after
/// the modulator's filter is fully loaded.
fn transient_len(scheme: ModulationScheme, cfg: &ExperimentConfig) -> usize {
    let span_symbols = if scheme == ModulationScheme::Gfsk {
        GFSK_SPAN_SYMBOLS
    } else {
        match cfg.modem.pulse {
            PulseShape::Rrc { span_symbols, .. } => span_symbols,
            PulseShape::Rect => 0,
        }
    };
    span_symbols * cfg.modem.sps
}

/// One realization: `count` normalized segments of one scheme, from a single
/// continuous signal seeded by (experiment seed, scheme, stream).
fn synthesize_segments(
    cfg: &ExperimentConfig,
    scheme: ModulationScheme,
    count: usize,
    stream: u64,
) -> Result<(u64, Vec<Vec<Complex64>>)> {
    let sps = cfg.modem.sps;
    let trim = transient_len(scheme, cfg);
    let needed = count * SEGMENT_LEN;
    let symbols = (needed + trim).div_ceil(sps) + 1;
    let bits = symbols * scheme.bits_per_symbol();

    let signal_seed = derive_seed(cfg.seed, &[scheme.index() as u64, stream]);
    let noise_seed = derive_seed(cfg.seed, &[scheme.index() as u64, stream, streams::NOISE]);

    let clean = modulate(scheme, &random_bits(signal_seed, bits), &cfg.modem)?;
    let noisy = awgn(&clean, cfg.snr_db, noise_seed)?;
    if noisy.len() < trim + needed {
        return Err(PipelineError::InvalidArgument(format!(
            "synthesized {} samples, need {} plus {trim} transient",
            noisy.len(),
            needed
        )));
    }

    let segments = segment(&noisy[trim..trim + needed], SEGMENT_LEN, SEGMENT_LEN)
        .iter()
        .map(|s| normalize_segment(s))
        .collect::<std::result::Result<Vec<_>, _>>()?;
    Ok((signal_seed, segments))
}

/// Stratified shuffle-then-split of the train+val entries, leaving test
/// entries untouched. Deterministic for a given seed.
pub fn split_dataset(
    manifest: &mut DatasetManifest,
    train_fraction: f64,
    seed: u64,
) -> Result<()> {
    if !(train_fraction > 0.0 && train_fraction < 1.0) {
        return Err(PipelineError::InvalidArgument(format!(
            "train fraction must lie strictly inside (0, 1), got {train_fraction}"
        )));
    }
    for scheme in ModulationScheme::ALL {
        let mut idx: Vec<usize> = manifest
            .entries
            .iter()
            .enumerate()
            .filter(|(_, e)| e.label == scheme && e.split != Split::Test)
            .map(|(i, _)| i)
            .collect();
        if idx.is_empty() {
            continue;
        }
        let mut rng = SplitMix64::new(derive_seed(seed, &[streams::SPLIT, scheme.index() as u64]));
        for i in (1..idx.len()).rev() {
            let j = (rng.next_u64() % (i as u64 + 1)) as usize;
            idx.swap(i, j);
        }
        let n_train = (train_fraction * idx.len() as f64).round() as usize;
        if n_train == 0 || n_train == idx.len() {
            return Err(PipelineError::InvalidArgument(format!(
                "fraction {train_fraction} leaves an empty split for {} entries per class",
                idx.len()
            )));
        }
        for (pos, &i) in idx.iter().enumerate() {
            manifest.entries[i].split = if pos < n_train {
                Split::Train
            } else {
                Split::Val
            };
        }
    }
    Ok(())
}

/// Synthesizes the full dataset tree under `out_dir`:
/// `iq/<scheme>/trainval_NNN.iq`, `iq/<scheme>/test_NNN.iq`, and
/// `manifest.json` with split tags already assigned.
pub fn generate_dataset(cfg: &ExperimentConfig, out_dir: &Path) -> Result<DatasetManifest> {
    cfg.validate()?;
    let mut entries = Vec::new();

    for scheme in ModulationScheme::ALL {
        let dir = out_dir.join("iq").join(scheme.name());
        std::fs::create_dir_all(&dir).map_err(|e| PipelineError::io(&dir, e))?;

        for (stream, prefix, count, split) in [
            (streams::TRAINVAL, "trainval", cfg.per_class, Split::Train),
            (streams::TEST, "test", cfg.test_per_class, Split::Test),
        ] {
            let (seed, segments) = synthesize_segments(cfg, scheme, count, stream)?;
            for (i, seg) in segments.iter().enumerate() {
                let rel = format!("iq/{}/{prefix}_{i:03}.iq", scheme.name());
                write_iq(&out_dir.join(&rel), seg)?;
                entries.push(ManifestEntry {
                    path: rel,
                    label: scheme,
                    split,
                    snr_db: cfg.snr_db,
                    seed,
                });
            }
        }
    }

    let mut manifest = DatasetManifest {
        version: MANIFEST_VERSION,
        modem: cfg.modem.clone(),
        entries,
    };
    split_dataset(&mut manifest, cfg.train_fraction, cfg.seed)?;
    manifest.save(&out_dir.join("manifest.json"))?;
    Ok(manifest)
}
