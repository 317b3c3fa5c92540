use crate::line::supercover_line;
use crate::{RasterError, RasterImage, Result};
use hybridsig_dsp::{Scale, StftMatrix};

fn check_canvas(width: usize, height: usize) -> Result<()> {
    if width == 0 || height == 0 {
        return Err(RasterError::InvalidArgument(format!(
            "canvas must be positive, got {width}x{height}"
        )));
    }
    Ok(())
}

/// Plots a [-1,1] sequence as a bright polyline on a dark background.
/// Sample n lands at x = round(n*(width-1)/(N-1)) and
/// y = round((1-v)/2*(height-1)); consecutive samples are joined with
/// 1-pixel-wide supercover lines of intensity 1.
pub fn raster_timeseries(values: &[f64], width: usize, height: usize) -> Result<RasterImage> {
    check_canvas(width, height)?;
    if values.is_empty() {
        return Err(RasterError::InvalidArgument(
            "cannot render an empty sequence".into(),
        ));
    }
    if let Some(bad) = values.iter().find(|v| !(-1.0..=1.0).contains(*v)) {
        return Err(RasterError::InvalidArgument(format!(
            "value {bad} outside [-1, 1]"
        )));
    }

    let n = values.len();
    let points: Vec<(i64, i64)> = values
        .iter()
        .enumerate()
        .map(|(i, &v)| {
            let x = if n == 1 {
                0.0
            } else {
                (i as f64 * (width - 1) as f64 / (n - 1) as f64).round()
            };
            let y = ((1.0 - v) / 2.0 * (height - 1) as f64).round();
            (x as i64, y as i64)
        })
        .collect();

    let mut img = RasterImage::zeros(width, height, 1)?;
    let mut plot = |x: i64, y: i64| {
        img.pixels[y as usize * width + x as usize] = 1.0;
    };
    if points.len() == 1 {
        plot(points[0].0, points[0].1);
    } else {
        for pair in points.windows(2) {
            supercover_line(pair[0].0, pair[0].1, pair[1].0, pair[1].1, &mut plot);
        }
    }
    Ok(img)
}

/// Renders a dB spectrum as a curve: bins are clamped to a `db_range` window
/// below the per-image maximum, mapped affinely to [-1,1], and drawn with
/// the timeseries rules (bin index across, level up).
pub fn raster_psd(
    psd_db: &[f64],
    width: usize,
    height: usize,
    db_range: f64,
) -> Result<RasterImage> {
    check_canvas(width, height)?;
    if psd_db.is_empty() {
        return Err(RasterError::InvalidArgument(
            "cannot render an empty spectrum".into(),
        ));
    }
    if !(db_range > 0.0) {
        return Err(RasterError::InvalidArgument(format!(
            "db_range must be positive, got {db_range}"
        )));
    }
    if let Some(bad) = psd_db.iter().find(|v| !v.is_finite()) {
        return Err(RasterError::InvalidArgument(format!(
            "non-finite dB value {bad}"
        )));
    }

    let max = psd_db.iter().cloned().fold(f64::MIN, f64::max);
    let floor = max - db_range;
    let levels: Vec<f64> = psd_db
        .iter()
        .map(|&v| {
            let clamped = v.clamp(floor, max);
            (2.0 * (clamped - floor) / db_range - 1.0).clamp(-1.0, 1.0)
        })
        .collect();
    raster_timeseries(&levels, width, height)
}

/// Renders a dB spectral matrix as a heatmap: time runs across, frequency
/// up (last bin at the top row), intensity = (dB - floor)/db_range clamped
/// to [0,1] with the floor `db_range` below the matrix maximum.
/// Nearest-neighbor resampling from frames x bins to width x height.
pub fn raster_spectrogram(
    s: &StftMatrix,
    width: usize,
    height: usize,
    db_range: f64,
) -> Result<RasterImage> {
    check_canvas(width, height)?;
    if s.scale != Scale::Db {
        return Err(RasterError::InvalidArgument(
            "spectrogram must be in dB before rendering".into(),
        ));
    }
    if s.num_frames == 0 || s.nfft == 0 {
        return Err(RasterError::InvalidArgument(
            "cannot render an empty spectral matrix".into(),
        ));
    }
    if !(db_range > 0.0) {
        return Err(RasterError::InvalidArgument(format!(
            "db_range must be positive, got {db_range}"
        )));
    }
    if let Some(bad) = s.data.iter().find(|v| !v.is_finite()) {
        return Err(RasterError::InvalidArgument(format!(
            "non-finite dB value {bad}"
        )));
    }

    let max = s.data.iter().cloned().fold(f64::MIN, f64::max);
    let floor = max - db_range;
    let (frames, bins) = (s.num_frames, s.nfft);

    let mut pixels = Vec::with_capacity(width * height);
    for y in 0..height {
        let bin = bins - 1 - y * bins / height;
        for x in 0..width {
            let frame = x * frames / width;
            let v = s.frame(frame)[bin].clamp(floor, max);
            pixels.push((((v - floor) / db_range) as f32).clamp(0.0, 1.0));
        }
    }
    RasterImage::new(width, height, 1, pixels)
}

fn check_same_plane(imgs: &[&RasterImage]) -> Result<()> {
    let (w, h) = (imgs[0].width, imgs[0].height);
    for img in imgs {
        if img.channels != 1 {
            return Err(RasterError::InvalidArgument(format!(
                "expected 1-channel planes, got {} channels",
                img.channels
            )));
        }
        if img.width != w || img.height != h {
            return Err(RasterError::InvalidArgument(format!(
                "plane dimensions disagree: {w}x{h} vs {}x{}",
                img.width, img.height
            )));
        }
    }
    Ok(())
}

fn interleave(planes: &[&RasterImage]) -> RasterImage {
    let (w, h) = (planes[0].width, planes[0].height);
    let mut pixels = Vec::with_capacity(w * h * planes.len());
    for i in 0..w * h {
        for p in planes {
            pixels.push(p.pixels[i]);
        }
    }
    RasterImage {
        width: w,
        height: h,
        channels: planes.len(),
        pixels,
    }
}

/// Builds the 3-channel composite: channel 0 = I trace, 1 = Q trace,
/// 2 = PSD curve.
pub fn compose_hybrid(
    i_img: &RasterImage,
    q_img: &RasterImage,
    psd_img: &RasterImage,
) -> Result<RasterImage> {
    check_same_plane(&[i_img, q_img, psd_img])?;
    Ok(interleave(&[i_img, q_img, psd_img]))
}

/// Stacks the I and Q traces into the 2-channel classifier input used by
/// the time representation.
pub fn stack_iq(i_img: &RasterImage, q_img: &RasterImage) -> Result<RasterImage> {
    check_same_plane(&[i_img, q_img])?;
    Ok(interleave(&[i_img, q_img]))
}

/// Extracts one channel as a standalone grayscale image.
pub fn extract_channel(img: &RasterImage, channel: usize) -> Result<RasterImage> {
    if channel >= img.channels {
        return Err(RasterError::InvalidArgument(format!(
            "channel {channel} out of range for {}-channel image",
            img.channels
        )));
    }
    let pixels = img
        .pixels
        .iter()
        .skip(channel)
        .step_by(img.channels)
        .cloned()
        .collect();
    RasterImage::new(img.width, img.height, 1, pixels)
}
