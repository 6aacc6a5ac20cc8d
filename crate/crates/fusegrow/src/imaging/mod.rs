//! Images, disparity maps, and their file formats.
//!
//! Grayscale images hold luminance on `[0, 1]` in row-major order. Disparity
//! maps pair a float grid with a per-pixel validity mask; readers must consult
//! the mask before trusting a value. Float disparities are interchanged as PFM,
//! images as PGM/PPM/PNG.

mod pfm;
mod pnm;
mod pngio;

use std::path::Path;

use crate::error::{Error, Result};

pub use pfm::{load_disparity_pfm, save_disparity_pfm};
pub use pnm::{load_pgm_disparity, load_pnm_gray};
pub use pngio::{load_png_disparity, load_png_gray, load_png_mask};

/// ITU-R 601 luma weights used for color-to-gray conversion.
pub const LUMA_WEIGHTS: [f64; 3] = [0.299, 0.587, 0.114];

/// Dense grayscale image with luminance values on `[0, 1]`, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct GrayImage {
    width: usize,
    height: usize,
    data: Vec<f64>,
}

impl GrayImage {
    /// Builds an image from raw luminance data.
    pub fn new(width: usize, height: usize, data: Vec<f64>) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(Error::InvalidParameter(format!(
                "image dimensions must be positive, got {width}x{height}"
            )));
        }
        if data.len() != width * height {
            return Err(Error::InvalidParameter(format!(
                "image data length {} does not match {width}x{height}",
                data.len()
            )));
        }
        if let Some(bad) = data.iter().find(|x| !x.is_finite() || **x < 0.0 || **x > 1.0) {
            return Err(Error::InvalidParameter(format!(
                "luminance value {bad} outside [0, 1]"
            )));
        }
        Ok(Self {
            width,
            height,
            data,
        })
    }

    /// Builds an image by evaluating `f(u, v)` at every pixel.
    ///
    /// Panics if `f` produces a value outside `[0, 1]`.
    pub fn from_fn(width: usize, height: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        assert!(width >= 1 && height >= 1, "empty image");
        let mut data = Vec::with_capacity(width * height);
        for v in 0..height {
            for u in 0..width {
                let x = f(u, v);
                assert!(
                    x.is_finite() && (0.0..=1.0).contains(&x),
                    "luminance {x} outside [0, 1] at ({u}, {v})"
                );
                data.push(x);
            }
        }
        Self {
            width,
            height,
            data,
        }
    }

    /// Constant-valued image.
    pub fn constant(width: usize, height: usize, value: f64) -> Self {
        Self::from_fn(width, height, |_, _| value)
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    /// Luminance at column `u`, row `v`. Panics when out of bounds.
    #[inline]
    pub fn get(&self, u: usize, v: usize) -> f64 {
        assert!(u < self.width && v < self.height);
        self.data[v * self.width + u]
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }
}

/// Dense float disparity grid with a per-pixel validity mask.
///
/// Also reused for any scalar-per-pixel grid with holes (range maps in meters,
/// interpolated priors); the semantics of the values are the caller's.
#[derive(Debug, Clone, PartialEq)]
pub struct DisparityMap {
    width: usize,
    height: usize,
    values: Vec<f32>,
    valid: Vec<bool>,
}

impl DisparityMap {
    /// Map of the given size with every pixel invalid.
    pub fn new_invalid(width: usize, height: usize) -> Self {
        assert!(width >= 1 && height >= 1, "empty map");
        Self {
            width,
            height,
            values: vec![0.0; width * height],
            valid: vec![false; width * height],
        }
    }

    /// Builds a map from raw parts, checking shape and value finiteness.
    pub fn from_parts(
        width: usize,
        height: usize,
        values: Vec<f32>,
        valid: Vec<bool>,
    ) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(Error::InvalidParameter(format!(
                "map dimensions must be positive, got {width}x{height}"
            )));
        }
        if values.len() != width * height || valid.len() != width * height {
            return Err(Error::InvalidParameter(
                "value/mask length does not match dimensions".into(),
            ));
        }
        for (x, ok) in values.iter().zip(&valid) {
            if *ok && !x.is_finite() {
                return Err(Error::InvalidParameter(format!(
                    "valid pixel holds non-finite value {x}"
                )));
            }
        }
        Ok(Self {
            width,
            height,
            values,
            valid,
        })
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    #[inline]
    fn index(&self, u: usize, v: usize) -> usize {
        assert!(u < self.width && v < self.height);
        v * self.width + u
    }

    /// Value at `(u, v)` when the pixel is valid.
    #[inline]
    pub fn get(&self, u: usize, v: usize) -> Option<f32> {
        let i = self.index(u, v);
        self.valid[i].then(|| self.values[i])
    }

    #[inline]
    pub fn is_valid(&self, u: usize, v: usize) -> bool {
        self.valid[self.index(u, v)]
    }

    /// Marks `(u, v)` valid with the given value.
    #[inline]
    pub fn set(&mut self, u: usize, v: usize, value: f32) {
        assert!(value.is_finite(), "disparity must be finite, got {value}");
        let i = self.index(u, v);
        self.values[i] = value;
        self.valid[i] = true;
    }

    pub fn invalidate(&mut self, u: usize, v: usize) {
        let i = self.index(u, v);
        self.valid[i] = false;
        self.values[i] = 0.0;
    }

    pub fn valid_count(&self) -> usize {
        self.valid.iter().filter(|x| **x).count()
    }

    pub fn values(&self) -> &[f32] {
        &self.values
    }

    pub fn validity(&self) -> &[bool] {
        &self.valid
    }

    /// Min and max over valid pixels, or `None` when everything is invalid.
    pub fn min_max(&self) -> Option<(f32, f32)> {
        let mut bounds: Option<(f32, f32)> = None;
        for (x, ok) in self.values.iter().zip(&self.valid) {
            if *ok {
                bounds = Some(match bounds {
                    None => (*x, *x),
                    Some((lo, hi)) => (lo.min(*x), hi.max(*x)),
                });
            }
        }
        bounds
    }

    pub fn same_size(&self, other: &DisparityMap) -> bool {
        self.width == other.width && self.height == other.height
    }
}

/// Prior disparity map interpolated from triangulated seeds.
///
/// Shares the representation of [`DisparityMap`]; pixels outside the seed
/// convex hull are invalid.
pub type PriorMap = DisparityMap;

/// Square window of luminance samples extracted around a pixel.
#[derive(Debug, Clone, PartialEq)]
pub struct Window {
    side: usize,
    samples: Vec<f64>,
}

impl Window {
    /// Window side length `n`.
    pub fn side(&self) -> usize {
        self.side
    }

    /// The `n*n` samples in row-major order.
    pub fn samples(&self) -> &[f64] {
        &self.samples
    }
}

/// Extracts the `n x n` window centered at `(u, v)`, or `None` when any
/// sample would fall outside the image. No padding is ever fabricated.
pub fn extract_window(img: &GrayImage, u: i64, v: i64, n: usize) -> Option<Window> {
    let mut samples = Vec::new();
    extract_window_into(img, u, v, n, &mut samples).then_some(Window { side: n, samples })
}

/// Allocation-free variant of [`extract_window`]; fills `out` and returns
/// whether the window fit inside the image.
pub fn extract_window_into(
    img: &GrayImage,
    u: i64,
    v: i64,
    n: usize,
    out: &mut Vec<f64>,
) -> bool {
    assert!(n % 2 == 1, "window side must be odd, got {n}");
    let half = (n / 2) as i64;
    let (w, h) = (img.width() as i64, img.height() as i64);
    if u - half < 0 || u + half >= w || v - half < 0 || v + half >= h {
        return false;
    }
    out.clear();
    out.reserve(n * n);
    for dv in -half..=half {
        let row = ((v + dv) * w + (u - half)) as usize;
        out.extend_from_slice(&img.data()[row..row + n]);
    }
    true
}

/// Interleaved 8-bit RGB image used only for visualization output.
#[derive(Debug, Clone, PartialEq)]
pub struct RgbImage {
    width: usize,
    height: usize,
    data: Vec<u8>,
}

impl RgbImage {
    pub fn new(width: usize, height: usize) -> Self {
        assert!(width >= 1 && height >= 1);
        Self {
            width,
            height,
            data: vec![0; width * height * 3],
        }
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    #[inline]
    pub fn set(&mut self, u: usize, v: usize, rgb: [u8; 3]) {
        assert!(u < self.width && v < self.height);
        let i = (v * self.width + u) * 3;
        self.data[i..i + 3].copy_from_slice(&rgb);
    }

    #[inline]
    pub fn get(&self, u: usize, v: usize) -> [u8; 3] {
        assert!(u < self.width && v < self.height);
        let i = (v * self.width + u) * 3;
        [self.data[i], self.data[i + 1], self.data[i + 2]]
    }

    pub fn data(&self) -> &[u8] {
        &self.data
    }

    /// Writes a binary PPM (P6, maxval 255).
    pub fn save_ppm(&self, path: &Path) -> Result<()> {
        let mut bytes = format!("P6\n{} {}\n255\n", self.width, self.height).into_bytes();
        bytes.extend_from_slice(&self.data);
        std::fs::write(path, bytes).map_err(|source| Error::Write {
            path: path.into(),
            source,
        })
    }

    /// Writes an 8-bit RGB PNG.
    pub fn save_png(&self, path: &Path) -> Result<()> {
        pngio::save_png_rgb(self, path)
    }

    /// Picks PNG or PPM from the file extension (`.ppm` writes PPM,
    /// anything else PNG).
    pub fn save(&self, path: &Path) -> Result<()> {
        match path.extension().and_then(|e| e.to_str()) {
            Some("ppm") => self.save_ppm(path),
            _ => self.save_png(path),
        }
    }
}

/// Loads a grayscale image from PGM (P5), PPM (P6), or PNG, 8 or 16 bits per
/// channel. Color inputs are converted with the fixed ITU-R 601 luma weights,
/// then scaled to `[0, 1]` by the sample maximum.
pub fn load_gray(path: &Path) -> Result<GrayImage> {
    let bytes = std::fs::read(path).map_err(|source| Error::Read {
        path: path.into(),
        source,
    })?;
    match sniff(&bytes) {
        FileKind::Pnm => pnm::parse_pnm_gray(&bytes, path),
        FileKind::Png => pngio::load_png_gray(path),
        FileKind::Pfm => Err(Error::format(path, "PFM holds disparities, not luminance")),
        FileKind::Unknown => Err(Error::format(path, "unsupported image format")),
    }
}

/// Loads a disparity map, sniffing the format: PFM (float), or 8/16-bit
/// PGM/PNG where integer sample 0 marks an unknown pixel. `scale` multiplies
/// every value on load (ground-truth encodings often store scaled disparity).
pub fn load_disparity(path: &Path, scale: f32) -> Result<DisparityMap> {
    let bytes = std::fs::read(path).map_err(|source| Error::Read {
        path: path.into(),
        source,
    })?;
    match sniff(&bytes) {
        FileKind::Pfm => pfm::parse_pfm(&bytes, path, scale),
        FileKind::Pnm => pnm::parse_pgm_disparity(&bytes, path, scale),
        FileKind::Png => pngio::load_png_disparity(path, scale),
        FileKind::Unknown => Err(Error::format(path, "unsupported disparity format")),
    }
}

enum FileKind {
    Pnm,
    Pfm,
    Png,
    Unknown,
}

fn sniff(bytes: &[u8]) -> FileKind {
    const PNG_MAGIC: [u8; 8] = [0x89, b'P', b'N', b'G', 0x0d, 0x0a, 0x1a, 0x0a];
    if bytes.starts_with(b"P5") || bytes.starts_with(b"P6") {
        FileKind::Pnm
    } else if bytes.starts_with(b"Pf") || bytes.starts_with(b"PF") {
        FileKind::Pfm
    } else if bytes.starts_with(&PNG_MAGIC) {
        FileKind::Png
    } else {
        FileKind::Unknown
    }
}
