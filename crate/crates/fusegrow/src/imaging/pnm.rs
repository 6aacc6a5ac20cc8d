//! Binary PNM readers: P5 grayscale and P6 color, 8 or 16 bits per sample.

use std::path::Path;

use crate::error::{Error, Result};
use crate::imaging::{DisparityMap, GrayImage, LUMA_WEIGHTS};

struct Cursor<'a> {
    bytes: &'a [u8],
    pos: usize,
    path: &'a Path,
}

impl<'a> Cursor<'a> {
    fn fail(&self, reason: impl Into<String>) -> Error {
        Error::format(self.path, reason)
    }

    /// Skips whitespace and `#` comments between header tokens.
    fn skip_separators(&mut self) {
        while let Some(&b) = self.bytes.get(self.pos) {
            if b.is_ascii_whitespace() {
                self.pos += 1;
            } else if b == b'#' {
                while let Some(&c) = self.bytes.get(self.pos) {
                    self.pos += 1;
                    if c == b'\n' {
                        break;
                    }
                }
            } else {
                break;
            }
        }
    }

    fn token(&mut self) -> Result<&'a str> {
        self.skip_separators();
        let start = self.pos;
        while let Some(&b) = self.bytes.get(self.pos) {
            if b.is_ascii_whitespace() {
                break;
            }
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.fail("truncated header"));
        }
        std::str::from_utf8(&self.bytes[start..self.pos])
            .map_err(|_| self.fail("non-ASCII header token"))
    }

    fn number(&mut self, what: &str) -> Result<usize> {
        let tok = self.token()?;
        tok.parse()
            .map_err(|_| self.fail(format!("bad {what} {tok:?}")))
    }

    /// Consumes the single whitespace byte that separates header and payload.
    fn payload(&mut self) -> Result<&'a [u8]> {
        match self.bytes.get(self.pos) {
            Some(b) if b.is_ascii_whitespace() => {
                self.pos += 1;
                Ok(&self.bytes[self.pos..])
            }
            _ => Err(self.fail("missing separator before payload")),
        }
    }
}

struct PnmHeader {
    channels: usize,
    width: usize,
    height: usize,
    maxval: usize,
}

fn parse_header<'a>(bytes: &'a [u8], path: &'a Path) -> Result<(PnmHeader, &'a [u8])> {
    let mut cur = Cursor {
        bytes,
        pos: 0,
        path,
    };
    let channels = match cur.token()? {
        "P5" => 1,
        "P6" => 3,
        magic => return Err(cur.fail(format!("unsupported PNM magic {magic:?}"))),
    };
    let width = cur.number("width")?;
    let height = cur.number("height")?;
    let maxval = cur.number("maxval")?;
    if width == 0 || height == 0 {
        return Err(cur.fail("zero image dimensions"));
    }
    if maxval == 0 || maxval > 65535 {
        return Err(cur.fail(format!("maxval {maxval} outside 1..=65535")));
    }
    let payload = cur.payload()?;
    let bytes_per_sample = if maxval > 255 { 2 } else { 1 };
    let needed = width * height * channels * bytes_per_sample;
    if payload.len() < needed {
        return Err(Error::format(
            path,
            format!("truncated payload: need {needed} bytes, have {}", payload.len()),
        ));
    }
    Ok((
        PnmHeader {
            channels,
            width,
            height,
            maxval,
        },
        &payload[..needed],
    ))
}

fn samples(header: &PnmHeader, payload: &[u8]) -> Vec<u32> {
    if header.maxval > 255 {
        // Two-byte samples are big-endian per the PNM convention.
        payload
            .chunks_exact(2)
            .map(|c| u32::from(c[0]) << 8 | u32::from(c[1]))
            .collect()
    } else {
        payload.iter().map(|&b| u32::from(b)).collect()
    }
}

pub(super) fn parse_pnm_gray(bytes: &[u8], path: &Path) -> Result<GrayImage> {
    let (header, payload) = parse_header(bytes, path)?;
    let raw = samples(&header, payload);
    let max = header.maxval as f64;
    let data: Vec<f64> = match header.channels {
        1 => raw.iter().map(|&s| f64::from(s).min(max) / max).collect(),
        _ => raw
            .chunks_exact(3)
            .map(|rgb| {
                let y = LUMA_WEIGHTS[0] * f64::from(rgb[0])
                    + LUMA_WEIGHTS[1] * f64::from(rgb[1])
                    + LUMA_WEIGHTS[2] * f64::from(rgb[2]);
                (y / max).min(1.0)
            })
            .collect(),
    };
    GrayImage::new(header.width, header.height, data)
}

/// Loads an integer PGM as a disparity map: sample 0 marks an unknown pixel,
/// anything else is `value * scale` pixels.
pub(super) fn parse_pgm_disparity(bytes: &[u8], path: &Path, scale: f32) -> Result<DisparityMap> {
    let (header, payload) = parse_header(bytes, path)?;
    if header.channels != 1 {
        return Err(Error::format(path, "disparity PNM must be grayscale (P5)"));
    }
    let raw = samples(&header, payload);
    let mut map = DisparityMap::new_invalid(header.width, header.height);
    for v in 0..header.height {
        for u in 0..header.width {
            let s = raw[v * header.width + u];
            if s != 0 {
                map.set(u, v, s as f32 * scale);
            }
        }
    }
    Ok(map)
}

/// Convenience wrappers reading from disk.
pub fn load_pnm_gray(path: &Path) -> Result<GrayImage> {
    let bytes = std::fs::read(path).map_err(|source| Error::Read {
        path: path.into(),
        source,
    })?;
    parse_pnm_gray(&bytes, path)
}

pub fn load_pgm_disparity(path: &Path, scale: f32) -> Result<DisparityMap> {
    let bytes = std::fs::read(path).map_err(|source| Error::Read {
        path: path.into(),
        source,
    })?;
    parse_pgm_disparity(&bytes, path, scale)
}
