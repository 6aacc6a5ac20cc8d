//! Post-processing of grown disparity maps: gap filling, color rendering,
//! and 3D export.

use std::path::Path;

use crate::error::{Error, Result};
use crate::imaging::{DisparityMap, RgbImage};

/// Color rendered for pixels without a disparity: dark blue.
pub const UNMATCHED_COLOR: [u8; 3] = [0, 0, 96];

/// Fills small gaps with the median of the valid neighbors.
///
/// Single pass reading only the input map: an invalid pixel becomes the lower
/// median of the valid pixels in its window when at least `min_support` of
/// them exist; valid input pixels are never modified, so the output mask is a
/// superset of the input mask. One-to-one matching leaves exactly these thin
/// gaps on slanted surfaces.
pub fn fill_gaps(map: &DisparityMap, window: usize, min_support: usize) -> DisparityMap {
    assert!(window % 2 == 1, "window side must be odd");
    let half = (window / 2) as i64;
    let (w, h) = (map.width() as i64, map.height() as i64);
    let mut out = map.clone();
    let mut values: Vec<f32> = Vec::with_capacity(window * window);

    for v in 0..h {
        for u in 0..w {
            if map.is_valid(u as usize, v as usize) {
                continue;
            }
            values.clear();
            for y in (v - half).max(0)..=(v + half).min(h - 1) {
                for x in (u - half).max(0)..=(u + half).min(w - 1) {
                    if let Some(d) = map.get(x as usize, y as usize) {
                        values.push(d);
                    }
                }
            }
            if values.len() >= min_support {
                values.sort_unstable_by(f32::total_cmp);
                // Lower median for even counts.
                out.set(u as usize, v as usize, values[(values.len() - 1) / 2]);
            }
        }
    }
    out
}

/// Disparity rendering polarity. Both figure conventions exist in the wild,
/// so the choice is explicit.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ColorPolarity {
    /// Far surfaces (small disparity) get warm colors. The default.
    WarmFar,
    /// Near surfaces (large disparity) get warm colors.
    WarmNear,
}

impl std::str::FromStr for ColorPolarity {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "warm-far" => Ok(ColorPolarity::WarmFar),
            "warm-near" => Ok(ColorPolarity::WarmNear),
            other => Err(Error::InvalidParameter(format!(
                "unknown polarity {other:?} (expected warm-far or warm-near)"
            ))),
        }
    }
}

/// Classic jet ramp on `t` in `[0, 1]`: dark blue through cyan and yellow to
/// dark red.
fn jet(t: f64) -> [u8; 3] {
    let channel = |x: f64| (255.0 * (1.5 - x.abs()).clamp(0.0, 1.0)).round() as u8;
    [
        channel(4.0 * t - 3.0),
        channel(4.0 * t - 2.0),
        channel(4.0 * t - 1.0),
    ]
}

/// Renders the map on a jet-style ramp between `bounds` (or the map's own
/// min/max); invalid pixels are dark blue.
pub fn colorize(
    map: &DisparityMap,
    bounds: Option<(f32, f32)>,
    polarity: ColorPolarity,
) -> RgbImage {
    let mut img = RgbImage::new(map.width(), map.height());
    let bounds = bounds.or_else(|| map.min_max());
    for v in 0..map.height() {
        for u in 0..map.width() {
            let rgb = match (map.get(u, v), bounds) {
                (Some(d), Some((lo, hi))) => {
                    let t = if hi > lo {
                        f64::from((d - lo) / (hi - lo))
                    } else {
                        0.5
                    };
                    let t = match polarity {
                        ColorPolarity::WarmFar => 1.0 - t,
                        ColorPolarity::WarmNear => t,
                    };
                    jet(t.clamp(0.0, 1.0))
                }
                _ => UNMATCHED_COLOR,
            };
            img.set(u, v, rgb);
        }
    }
    img
}

/// Pinhole geometry for turning disparities into 3D points.
#[derive(Debug, Clone, Copy)]
pub struct StereoGeometry {
    pub focal: f64,
    pub baseline: f64,
    pub cx: f64,
    pub cy: f64,
}

impl StereoGeometry {
    /// Simple geometry with the principal point at the image center.
    pub fn simple(focal: f64, baseline: f64, width: usize, height: usize) -> Self {
        Self {
            focal,
            baseline,
            cx: width as f64 / 2.0,
            cy: height as f64 / 2.0,
        }
    }

    /// Depth of a positive disparity: `z = f * b / d`.
    pub fn depth(&self, d: f64) -> f64 {
        self.focal * self.baseline / d
    }
}

/// Exports the map as an ASCII PLY mesh.
///
/// One vertex per valid pixel with positive disparity at
/// `((u - cx) z / f, (v - cy) z / f, z)`; triangles connect neighboring valid
/// pixels whose disparities differ by at most one pixel.
pub fn export_ply(map: &DisparityMap, geom: &StereoGeometry, path: &Path) -> Result<()> {
    assert!(geom.focal > 0.0 && geom.baseline > 0.0, "invalid geometry");
    let (w, h) = (map.width(), map.height());
    let mut index = vec![u32::MAX; w * h];
    let mut vertices = Vec::new();
    for v in 0..h {
        for u in 0..w {
            let Some(d) = map.get(u, v) else { continue };
            if d <= 0.0 {
                continue;
            }
            let z = geom.depth(f64::from(d));
            let x = (u as f64 - geom.cx) * z / geom.focal;
            let y = (v as f64 - geom.cy) * z / geom.focal;
            index[v * w + u] = vertices.len() as u32;
            vertices.push((x, y, z));
        }
    }

    let mut faces: Vec<[u32; 3]> = Vec::new();
    let close = |a: usize, b: usize| -> bool {
        match (
            map.get(a % w, a / w).filter(|d| *d > 0.0),
            map.get(b % w, b / w).filter(|d| *d > 0.0),
        ) {
            (Some(da), Some(db)) => (da - db).abs() <= 1.0,
            _ => false,
        }
    };
    for v in 0..h.saturating_sub(1) {
        for u in 0..w.saturating_sub(1) {
            let p00 = v * w + u;
            let p10 = v * w + u + 1;
            let p01 = (v + 1) * w + u;
            let p11 = (v + 1) * w + u + 1;
            // Two triangles per quad; every pair in a triangle must be close.
            if close(p00, p10) && close(p00, p01) && close(p10, p01) {
                faces.push([index[p00], index[p01], index[p10]]);
            }
            if close(p10, p01) && close(p10, p11) && close(p01, p11) {
                faces.push([index[p10], index[p01], index[p11]]);
            }
        }
    }

    let mut text = String::new();
    text.push_str("ply\nformat ascii 1.0\n");
    text.push_str(&format!("element vertex {}\n", vertices.len()));
    text.push_str("property float x\nproperty float y\nproperty float z\n");
    text.push_str(&format!("element face {}\n", faces.len()));
    text.push_str("property list uchar int vertex_indices\nend_header\n");
    for (x, y, z) in &vertices {
        text.push_str(&format!("{x} {y} {z}\n"));
    }
    for f in &faces {
        text.push_str(&format!("3 {} {} {}\n", f[0], f[1], f[2]));
    }
    std::fs::write(path, text).map_err(|source| Error::Write {
        path: path.into(),
        source,
    })
}
