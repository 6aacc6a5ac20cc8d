//! PFM disparity interchange.
//!
//! Grayscale PFM only ("Pf" magic): a text header of width, height, and a
//! scale line whose sign encodes endianness, then `width*height` raw floats
//! stored bottom row first. Invalid pixels are written as +infinity; any
//! non-finite payload value loads as invalid.

use std::path::Path;

use crate::error::{Error, Result};
use crate::imaging::DisparityMap;

/// Writes `map` as a little-endian grayscale PFM with scale line `-1.0`.
pub fn save_disparity_pfm(map: &DisparityMap, path: &Path) -> Result<()> {
    let mut bytes =
        format!("Pf\n{} {}\n-1.0\n", map.width(), map.height()).into_bytes();
    bytes.reserve(map.width() * map.height() * 4);
    // PFM stores the bottom row first.
    for v in (0..map.height()).rev() {
        for u in 0..map.width() {
            let x = map.get(u, v).unwrap_or(f32::INFINITY);
            bytes.extend_from_slice(&x.to_le_bytes());
        }
    }
    std::fs::write(path, bytes).map_err(|source| Error::Write {
        path: path.into(),
        source,
    })
}

/// Reads a grayscale PFM. `scale` multiplies every value on load.
pub fn load_disparity_pfm(path: &Path, scale: f32) -> Result<DisparityMap> {
    let bytes = std::fs::read(path).map_err(|source| Error::Read {
        path: path.into(),
        source,
    })?;
    parse_pfm(&bytes, path, scale)
}

pub(super) fn parse_pfm(bytes: &[u8], path: &Path, scale: f32) -> Result<DisparityMap> {
    let mut pos = 0usize;
    let mut token = |what: &str| -> Result<&str> {
        while bytes.get(pos).is_some_and(|b| b.is_ascii_whitespace()) {
            pos += 1;
        }
        let start = pos;
        while bytes.get(pos).is_some_and(|b| !b.is_ascii_whitespace()) {
            pos += 1;
        }
        if start == pos {
            return Err(Error::format(path, format!("missing {what} in PFM header")));
        }
        std::str::from_utf8(&bytes[start..pos])
            .map_err(|_| Error::format(path, "non-ASCII PFM header"))
    };

    match token("magic")? {
        "Pf" => {}
        "PF" => return Err(Error::format(path, "color PFM is not supported")),
        magic => return Err(Error::format(path, format!("bad PFM magic {magic:?}"))),
    }
    let width: usize = token("width")?
        .parse()
        .map_err(|_| Error::format(path, "bad PFM width"))?;
    let height: usize = token("height")?
        .parse()
        .map_err(|_| Error::format(path, "bad PFM height"))?;
    let file_scale: f32 = token("scale")?
        .parse()
        .map_err(|_| Error::format(path, "bad PFM scale line"))?;
    if width == 0 || height == 0 {
        return Err(Error::format(path, "zero PFM dimensions"));
    }
    let little_endian = file_scale < 0.0;

    // Exactly one whitespace byte separates the header from the payload.
    match bytes.get(pos) {
        Some(b) if b.is_ascii_whitespace() => pos += 1,
        _ => return Err(Error::format(path, "missing separator before PFM payload")),
    }
    let payload = &bytes[pos..];
    let needed = width * height * 4;
    if payload.len() < needed {
        return Err(Error::format(
            path,
            format!("truncated PFM payload: need {needed} bytes, have {}", payload.len()),
        ));
    }

    let mut map = DisparityMap::new_invalid(width, height);
    let mut chunk = payload.chunks_exact(4);
    for v in (0..height).rev() {
        for u in 0..width {
            let raw: [u8; 4] = chunk.next().unwrap().try_into().unwrap();
            let x = if little_endian {
                f32::from_le_bytes(raw)
            } else {
                f32::from_be_bytes(raw)
            };
            if x.is_finite() {
                map.set(u, v, x * scale);
            }
        }
    }
    Ok(map)
}
