use crate::{RasterError, RasterImage, Result};

/// Encodes a raster as binary PGM (1 channel, P5) or PPM (3 channels, P6),
/// maxval 255, header exactly "P{5|6}\n{width} {height}\n255\n". Pixels are
/// quantized with round(v*255).
pub fn encode_image(img: &RasterImage) -> Result<Vec<u8>> {
    let magic = match img.channels {
        1 => "P5",
        3 => "P6",
        other => {
            return Err(RasterError::InvalidArgument(format!(
                "no file format for {other}-channel images (1 -> PGM, 3 -> PPM)"
            )))
        }
    };
    let header = format!("{magic}\n{} {}\n255\n", img.width, img.height);
    let mut bytes = Vec::with_capacity(header.len() + img.pixels.len());
    bytes.extend_from_slice(header.as_bytes());
    bytes.extend(img.pixels.iter().map(|&v| (v * 255.0).round() as u8));
    Ok(bytes)
}

/// Strict inverse of `encode_image`: accepts exactly the header layout it
/// writes, requires maxval 255, and rejects truncated or oversized payloads.
/// Pixel values decode as byte/255.
pub fn decode_image(bytes: &[u8]) -> Result<RasterImage> {
    let channels = match bytes.get(..2) {
        Some(b"P5") => 1,
        Some(b"P6") => 3,
        _ => return Err(RasterError::Format("bad magic, expected P5 or P6".into())),
    };

    // Header: magic '\n' width ' ' height '\n' maxval '\n', digits only.
    let rest = &bytes[2..];
    let mut pos = 0usize;
    let expect = |pos: &mut usize, byte: u8, what: &str| -> Result<()> {
        if rest.get(*pos) != Some(&byte) {
            return Err(RasterError::Format(format!("expected {what} in header")));
        }
        *pos += 1;
        Ok(())
    };
    let read_number = |pos: &mut usize, what: &str| -> Result<usize> {
        let start = *pos;
        while rest.get(*pos).is_some_and(|b| b.is_ascii_digit()) {
            *pos += 1;
        }
        if *pos == start || *pos - start > 7 {
            return Err(RasterError::Format(format!("malformed {what} in header")));
        }
        let text = std::str::from_utf8(&rest[start..*pos]).unwrap();
        text.parse::<usize>()
            .map_err(|_| RasterError::Format(format!("malformed {what} in header")))
    };

    expect(&mut pos, b'\n', "newline after magic")?;
    let width = read_number(&mut pos, "width")?;
    expect(&mut pos, b' ', "space between dimensions")?;
    let height = read_number(&mut pos, "height")?;
    expect(&mut pos, b'\n', "newline after dimensions")?;
    let maxval = read_number(&mut pos, "maxval")?;
    if maxval != 255 {
        return Err(RasterError::Format(format!(
            "unsupported maxval {maxval}, expected 255"
        )));
    }
    expect(&mut pos, b'\n', "newline after maxval")?;

    if width == 0 || height == 0 {
        return Err(RasterError::Format("zero image dimension".into()));
    }
    let payload = &rest[pos..];
    let expected = width * height * channels;
    if payload.len() != expected {
        return Err(RasterError::Format(format!(
            "payload holds {} bytes, expected {expected}",
            payload.len()
        )));
    }

    let pixels = payload.iter().map(|&b| b as f32 / 255.0).collect();
    RasterImage::new(width, height, channels, pixels)
}
