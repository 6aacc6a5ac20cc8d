//! PNG input/output via the `png` crate, 8 and 16 bits per channel.

use std::fs::File;
use std::io::BufWriter;
use std::path::Path;

use crate::error::{Error, Result};
use crate::imaging::{DisparityMap, GrayImage, RgbImage, LUMA_WEIGHTS};

struct Decoded {
    width: usize,
    height: usize,
    channels: usize,
    maxval: f64,
    /// Samples widened to u32, interleaved, alpha dropped.
    samples: Vec<u32>,
}

fn decode(path: &Path) -> Result<Decoded> {
    let file = File::open(path).map_err(|source| Error::Read {
        path: path.into(),
        source,
    })?;
    let mut decoder = png::Decoder::new(file);
    // Expand palette and low-bit grayscale; 16-bit stays 16-bit big-endian.
    decoder.set_transformations(png::Transformations::EXPAND);
    let mut reader = decoder
        .read_info()
        .map_err(|e| Error::format(path, format!("bad PNG: {e}")))?;
    let mut buf = vec![0u8; reader.output_buffer_size()];
    let info = reader
        .next_frame(&mut buf)
        .map_err(|e| Error::format(path, format!("bad PNG: {e}")))?;
    buf.truncate(info.buffer_size());

    let sixteen = info.bit_depth == png::BitDepth::Sixteen;
    let raw: Vec<u32> = if sixteen {
        buf.chunks_exact(2)
            .map(|c| u32::from(c[0]) << 8 | u32::from(c[1]))
            .collect()
    } else {
        buf.iter().map(|&b| u32::from(b)).collect()
    };

    let (in_channels, keep) = match info.color_type {
        png::ColorType::Grayscale => (1, 1),
        png::ColorType::GrayscaleAlpha => (2, 1),
        png::ColorType::Rgb => (3, 3),
        png::ColorType::Rgba => (4, 3),
        other => {
            return Err(Error::format(
                path,
                format!("unsupported PNG color type {other:?}"),
            ))
        }
    };
    let samples: Vec<u32> = raw
        .chunks_exact(in_channels)
        .flat_map(|px| px[..keep].to_vec())
        .collect();

    Ok(Decoded {
        width: info.width as usize,
        height: info.height as usize,
        channels: keep,
        maxval: if sixteen { 65535.0 } else { 255.0 },
        samples,
    })
}

/// Loads a PNG as luminance on `[0, 1]`; color converts via the fixed luma
/// weights.
pub fn load_png_gray(path: &Path) -> Result<GrayImage> {
    let d = decode(path)?;
    let data: Vec<f64> = match d.channels {
        1 => d.samples.iter().map(|&s| f64::from(s) / d.maxval).collect(),
        _ => d
            .samples
            .chunks_exact(3)
            .map(|rgb| {
                let y = LUMA_WEIGHTS[0] * f64::from(rgb[0])
                    + LUMA_WEIGHTS[1] * f64::from(rgb[1])
                    + LUMA_WEIGHTS[2] * f64::from(rgb[2]);
                (y / d.maxval).min(1.0)
            })
            .collect(),
    };
    GrayImage::new(d.width, d.height, data)
}

/// Loads a grayscale PNG as a disparity map: sample 0 marks an unknown pixel,
/// anything else is `value * scale` pixels.
pub fn load_png_disparity(path: &Path, scale: f32) -> Result<DisparityMap> {
    let d = decode(path)?;
    if d.channels != 1 {
        return Err(Error::format(path, "disparity PNG must be grayscale"));
    }
    let mut map = DisparityMap::new_invalid(d.width, d.height);
    for v in 0..d.height {
        for u in 0..d.width {
            let s = d.samples[v * d.width + u];
            if s != 0 {
                map.set(u, v, s as f32 * scale);
            }
        }
    }
    Ok(map)
}

/// Loads a grayscale PNG as a boolean mask: nonzero samples are `true`.
pub fn load_png_mask(path: &Path) -> Result<(usize, usize, Vec<bool>)> {
    let d = decode(path)?;
    if d.channels != 1 {
        return Err(Error::format(path, "mask PNG must be grayscale"));
    }
    Ok((d.width, d.height, d.samples.iter().map(|&s| s != 0).collect()))
}

pub(super) fn save_png_rgb(img: &RgbImage, path: &Path) -> Result<()> {
    let file = File::create(path).map_err(|source| Error::Write {
        path: path.into(),
        source,
    })?;
    let mut encoder = png::Encoder::new(BufWriter::new(file), img.width() as u32, img.height() as u32);
    encoder.set_color(png::ColorType::Rgb);
    encoder.set_depth(png::BitDepth::Eight);
    let io_err = |e: png::EncodingError| Error::format(path, format!("PNG encode: {e}"));
    let mut writer = encoder.write_header().map_err(io_err)?;
    writer.write_image_data(img.data()).map_err(io_err)?;
    Ok(())
}
