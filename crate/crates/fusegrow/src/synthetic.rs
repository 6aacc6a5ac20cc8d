//! Deterministic synthetic stereo scenes.
//!
//! Used by the test and bench harnesses: the generator is a fixed
//! xorshift-style PRNG, so every scene is bit-reproducible across runs and
//! platforms and frozen expected values stay valid.

use crate::imaging::{DisparityMap, GrayImage};

/// Minimal splitmix64 generator; deliberately self-contained so fixtures
/// never drift with an external crate's stream.
#[derive(Debug, Clone)]
pub struct Rng64 {
    state: u64,
}

impl Rng64 {
    pub fn new(seed: u64) -> Self {
        Self {
            state: seed.wrapping_add(0x9e3779b97f4a7c15),
        }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(0x9e3779b97f4a7c15);
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
        z ^ (z >> 31)
    }

    /// Uniform in `[0, 1)`.
    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 / (1u64 << 53) as f64
    }

    pub fn next_range(&mut self, bound: u64) -> u64 {
        self.next_u64() % bound
    }
}

/// A stereo pair where the left image is the right image shifted by a known
/// constant disparity. Columns of the left image without a correspondence
/// (u < shift) are filled with independent noise.
pub fn shifted_texture_pair(
    width: usize,
    height: usize,
    shift: usize,
    seed: u64,
) -> (GrayImage, GrayImage) {
    assert!(shift < width);
    let mut rng = Rng64::new(seed);
    let right = GrayImage::from_fn(width, height, |_, _| rng.next_f64());
    let left = GrayImage::from_fn(width, height, |u, v| {
        if u >= shift {
            right.get(u - shift, v)
        } else {
            rng.next_f64()
        }
    });
    (left, right)
}

/// Configuration for [`planar_scene`].
#[derive(Debug, Clone)]
pub struct PlanarSceneConfig {
    pub width: usize,
    pub height: usize,
    /// Fronto-parallel background disparity.
    pub base_disparity: f64,
    /// Slanted panel `(u0, v0, u1, v1)` with
    /// `d = round(panel_base + panel_slope * (u - u0))`.
    pub panel: (usize, usize, usize, usize),
    pub panel_base: f64,
    pub panel_slope: f64,
    /// Foreground rectangle `(u0, v0, u1, v1)` at constant disparity,
    /// drawn over everything else.
    pub foreground: (usize, usize, usize, usize),
    pub foreground_disparity: f64,
    /// Horizontal band `(u0, u1)` of the right image rendered with constant
    /// intensity: zero texture, so photometric matching is ambiguous there.
    pub flat_band: (usize, usize),
    pub rng_seed: u64,
}

impl Default for PlanarSceneConfig {
    fn default() -> Self {
        Self {
            width: 320,
            height: 240,
            base_disparity: 14.0,
            panel: (20, 130, 150, 240),
            panel_base: 18.0,
            panel_slope: 0.06,
            foreground: (110, 40, 210, 140),
            foreground_disparity: 44.0,
            flat_band: (150, 260),
            rng_seed: 0xf05e,
        }
    }
}

/// A synthetic stereo scene with ground truth for both views.
#[derive(Debug, Clone)]
pub struct StereoScene {
    pub left: GrayImage,
    pub right: GrayImage,
    pub gt_left: DisparityMap,
    pub gt_right: DisparityMap,
}

/// Renders a piecewise-planar scene: a slanted, textured background plane
/// with a weakly textured band, plus a fronto-parallel foreground rectangle.
/// Disparities are integer-valued per pixel, so the left image is an exact
/// resampling of the right and the ground truth is exact.
pub fn planar_scene(cfg: &PlanarSceneConfig) -> StereoScene {
    let (w, h) = (cfg.width, cfg.height);
    let mut rng = Rng64::new(cfg.rng_seed);

    // Right-image texture: smooth value noise plus fine grain, compressed to
    // a faint ripple inside the flat band.
    let cell = 8usize;
    let gw = w / cell + 2;
    let gh = h / cell + 2;
    let grid: Vec<f64> = (0..gw * gh).map(|_| rng.next_f64()).collect();
    let mut fine = Rng64::new(cfg.rng_seed ^ 0xabcdef);
    let right = GrayImage::from_fn(w, h, |u, v| {
        let gx = u / cell;
        let gy = v / cell;
        let fx = (u % cell) as f64 / cell as f64;
        let fy = (v % cell) as f64 / cell as f64;
        let g = |x: usize, y: usize| grid[y * gw + x];
        let smooth = g(gx, gy) * (1.0 - fx) * (1.0 - fy)
            + g(gx + 1, gy) * fx * (1.0 - fy)
            + g(gx, gy + 1) * (1.0 - fx) * fy
            + g(gx + 1, gy + 1) * fx * fy;
        let grain = fine.next_f64();
        if (cfg.flat_band.0..cfg.flat_band.1).contains(&u) {
            0.55
        } else {
            0.25 + 0.45 * smooth + 0.25 * grain
        }
    });

    // Integer ground-truth disparity of the left view.
    let disparity_at = |u: usize, v: usize| -> i64 {
        let (fu0, fv0, fu1, fv1) = cfg.foreground;
        let (pu0, pv0, pu1, pv1) = cfg.panel;
        if (fu0..fu1).contains(&u) && (fv0..fv1).contains(&v) {
            cfg.foreground_disparity.round() as i64
        } else if (pu0..pu1).contains(&u) && (pv0..pv1).contains(&v) {
            (cfg.panel_base + cfg.panel_slope * (u - pu0) as f64).round() as i64
        } else {
            cfg.base_disparity.round() as i64
        }
    };

    let mut gt_left = DisparityMap::new_invalid(w, h);
    let mut gt_right = DisparityMap::new_invalid(w, h);
    let mut left_rng = Rng64::new(cfg.rng_seed ^ 0x5eed);
    let left = GrayImage::from_fn(w, h, |u, v| {
        let d = disparity_at(u, v);
        let up = u as i64 - d;
        if up >= 0 && up < w as i64 {
            right.get(up as usize, v)
        } else {
            left_rng.next_f64()
        }
    });
    for v in 0..h {
        for u in 0..w {
            let d = disparity_at(u, v);
            let up = u as i64 - d;
            if up >= 0 && up < w as i64 {
                gt_left.set(u, v, d as f32);
                // Depth-buffer the right view: the largest disparity mapping
                // onto a right pixel is the visible surface.
                let prev = gt_right.get(up as usize, v).unwrap_or(f32::MIN);
                if d as f32 > prev {
                    gt_right.set(up as usize, v, d as f32);
                }
            }
        }
    }

    StereoScene {
        left,
        right,
        gt_left,
        gt_right,
    }
}
