//! Turns stored IQ segments into classifier-ready images. Rendering is a
//! pure function of the segment bytes plus (canvas, db_range), so image
//! trees are reproducible from the dataset alone.

use std::path::Path;

use hybridsig_dsp::{hann_window, stft, welch_psd};
use hybridsig_modem::Complex64;
use hybridsig_nn::{image_to_tensor, Tensor};
use hybridsig_raster::{
    compose_hybrid, decode_image, encode_image, raster_psd, raster_spectrogram,
    raster_timeseries, stack_iq, RasterImage, Representation,
};

use crate::manifest::{DatasetManifest, ImageEntry, ImageManifest, ManifestEntry,
    MANIFEST_VERSION};
use crate::{read_iq, PipelineError, Result};

/// Welch PSD geometry: 3 half-overlapped 256-bin segments per 512 samples.
pub const PSD_NFFT: usize = 256;
pub const PSD_OVERLAP: f64 = 0.5;
/// Spectrogram geometry: 15 frames of 64 bins per 512 samples.
pub const SPEC_NFFT: usize = 64;
pub const SPEC_HOP: usize = 32;

fn trace_planes(
    samples: &[Complex64],
    canvas: usize,
) -> Result<(RasterImage, RasterImage)> {
    let i_vals: Vec<f64> = samples.iter().map(|c| c.re).collect();
    let q_vals: Vec<f64> = samples.iter().map(|c| c.im).collect();
    Ok((
        raster_timeseries(&i_vals, canvas, canvas)?,
        raster_timeseries(&q_vals, canvas, canvas)?,
    ))
}

fn psd_plane(samples: &[Complex64], canvas: usize, db_range: f64) -> Result<RasterImage> {
    let window = hann_window(PSD_NFFT)?;
    let psd = welch_psd(samples, PSD_NFFT, PSD_OVERLAP, &window)?.to_db()?;
    Ok(raster_psd(&psd.bins, canvas, canvas, db_range)?)
}

/// Renders one segment into the representation's image planes: two grayscale
/// traces for the time representation, one plane for PSD and spectrogram,
/// one 3-channel composite for hybrid.
pub fn render_segment(
    samples: &[Complex64],
    rep: Representation,
    canvas: usize,
    db_range: f64,
) -> Result<Vec<RasterImage>> {
    match rep {
        Representation::TimeIq => {
            let (i_img, q_img) = trace_planes(samples, canvas)?;
            Ok(vec![i_img, q_img])
        }
        Representation::Psd => Ok(vec![psd_plane(samples, canvas, db_range)?]),
        Representation::Spectrogram => {
            let window = hann_window(SPEC_NFFT)?;
            let m = stft(samples, SPEC_NFFT, SPEC_HOP, &window)?.to_db()?;
            Ok(vec![raster_spectrogram(&m, canvas, canvas, db_range)?])
        }
        Representation::Hybrid => {
            let (i_img, q_img) = trace_planes(samples, canvas)?;
            let psd_img = psd_plane(samples, canvas, db_range)?;
            Ok(vec![compose_hybrid(&i_img, &q_img, &psd_img)?])
        }
    }
}

/// Image file names for one segment, relative to the image root. The stem
/// mirrors the segment's location in the dataset tree.
fn image_paths(entry: &ManifestEntry, rep: Representation) -> Vec<String> {
    let stem = entry
        .path
        .strip_prefix("iq/")
        .unwrap_or(&entry.path)
        .strip_suffix(".iq")
        .unwrap_or(&entry.path);
    match rep {
        Representation::TimeIq => vec![format!("{stem}_i.pgm"), format!("{stem}_q.pgm")],
        Representation::Psd => vec![format!("{stem}_psd.pgm")],
        Representation::Spectrogram => vec![format!("{stem}_spec.pgm")],
        Representation::Hybrid => vec![format!("{stem}_hybrid.ppm")],
    }
}

fn render_entry(
    dataset_root: &Path,
    out_dir: &Path,
    entry: &ManifestEntry,
    rep: Representation,
    canvas: usize,
    db_range: f64,
) -> Result<ImageEntry> {
    let samples = read_iq(&dataset_root.join(&entry.path))?;
    let images = render_segment(&samples, rep, canvas, db_range)?;
    let paths = image_paths(entry, rep);
    for (rel, img) in paths.iter().zip(&images) {
        let path = out_dir.join(rel);
        if let Some(parent) = path.parent() {
            std::fs::create_dir_all(parent).map_err(|e| PipelineError::io(parent, e))?;
        }
        std::fs::write(&path, encode_image(img)?).map_err(|e| PipelineError::io(&path, e))?;
    }
    Ok(ImageEntry {
        paths,
        label: entry.label,
        split: entry.split,
        snr_db: entry.snr_db,
        seed: entry.seed,
    })
}

/// Renders every segment in the manifest, writing image files plus an
/// `images.json` index under `out_dir`. `jobs` > 1 renders segments in
/// parallel; outputs are byte-identical regardless of the job count because
/// every segment is independent and the index keeps manifest order.
pub fn render_dataset(
    dataset_root: &Path,
    manifest: &DatasetManifest,
    rep: Representation,
    canvas: usize,
    db_range: f64,
    out_dir: &Path,
    jobs: usize,
) -> Result<ImageManifest> {
    if manifest.entries.is_empty() {
        return Err(PipelineError::InvalidArgument(
            "dataset manifest has no entries".into(),
        ));
    }
    if jobs == 0 {
        return Err(PipelineError::InvalidArgument(
            "jobs must be at least 1".into(),
        ));
    }
    std::fs::create_dir_all(out_dir).map_err(|e| PipelineError::io(out_dir, e))?;

    let entries: Vec<ImageEntry> = if jobs == 1 {
        manifest
            .entries
            .iter()
            .map(|e| render_entry(dataset_root, out_dir, e, rep, canvas, db_range))
            .collect::<Result<_>>()?
    } else {
        let chunk = manifest.entries.len().div_ceil(jobs);
        let results: Vec<Result<Vec<ImageEntry>>> = std::thread::scope(|scope| {
            let handles: Vec<_> = manifest
                .entries
                .chunks(chunk)
                .map(|part| {
                    scope.spawn(move || {
                        part.iter()
                            .map(|e| render_entry(dataset_root, out_dir, e, rep, canvas, db_range))
                            .collect::<Result<Vec<_>>>()
                    })
                })
                .collect();
            handles.into_iter().map(|h| h.join().unwrap()).collect()
        });
        let mut all = Vec::with_capacity(manifest.entries.len());
        for part in results {
            all.extend(part?);
        }
        all
    };

    let image_manifest = ImageManifest {
        version: MANIFEST_VERSION,
        representation: rep,
        canvas,
        entries,
    };
    image_manifest.save(&out_dir.join("images.json"))?;
    Ok(image_manifest)
}

/// Loads one image entry as a classifier input tensor plus its class index.
/// The time representation stacks its I and Q planes into two channels.
pub fn load_input(images_root: &Path, entry: &ImageEntry, rep: Representation) -> Result<(Tensor<f32>, usize)> {
    if entry.paths.len() != rep.files_per_segment() {
        return Err(PipelineError::Format(format!(
            "{} entry lists {} files, expected {}",
            rep.name(),
            entry.paths.len(),
            rep.files_per_segment()
        )));
    }
    let mut images = Vec::with_capacity(entry.paths.len());
    for rel in &entry.paths {
        let path = images_root.join(rel);
        let bytes = std::fs::read(&path).map_err(|e| PipelineError::io(&path, e))?;
        images.push(decode_image(&bytes)?);
    }
    let img = match rep {
        Representation::TimeIq => stack_iq(&images[0], &images[1])?,
        _ => images.pop().unwrap(),
    };
    if img.channels != rep.model_channels() {
        return Err(PipelineError::Format(format!(
            "{} input has {} channels, model expects {}",
            rep.name(),
            img.channels,
            rep.model_channels()
        )));
    }
    Ok((image_to_tensor(&img)?, entry.label.index()))
}
