//! Initial correspondence seeds.
//!
//! Seeds come either from a real range camera — back-projecting each depth
//! pixel to 3D, transforming into the rig frame, and projecting into both
//! rectified images — or from a ground-truth disparity map sampled on a
//! regular grid. A refinement step then discards seeds in very dark regions
//! and seeds that a nearer surface occludes.

use std::collections::HashMap;
use std::path::Path;

use crate::error::{Error, Result};
use crate::imaging::{DisparityMap, GrayImage};

/// An integer point `(u, u', v)` in disparity space: left pixel `(u, v)`
/// matched to right pixel `(u', v)` on the shared row `v`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct SeedCorrespondence {
    pub u: u32,
    pub u_prime: u32,
    pub v: u32,
}

impl SeedCorrespondence {
    pub fn new(u: u32, u_prime: u32, v: u32) -> Self {
        Self { u, u_prime, v }
    }

    /// Disparity `d = u - u'`, non-negative for canonical rectified order.
    #[inline]
    pub fn disparity(&self) -> i64 {
        i64::from(self.u) - i64::from(self.u_prime)
    }

    /// Canonical ordering key.
    #[inline]
    pub fn key(&self) -> (u32, u32, u32) {
        (self.v, self.u, self.u_prime)
    }
}

impl Ord for SeedCorrespondence {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.key().cmp(&other.key())
    }
}

impl PartialOrd for SeedCorrespondence {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

/// Sorts to the canonical lexicographic `(v, u, u')` order and removes exact
/// duplicates.
pub fn canonicalize_seeds(seeds: &mut Vec<SeedCorrespondence>) {
    seeds.sort_unstable();
    seeds.dedup();
}

/// One range-camera frame: depth in meters with a validity mask, plus an
/// optional co-registered amplitude image.
#[derive(Debug, Clone)]
pub struct TofFrame {
    pub depth: DisparityMap,
    pub intensity: Option<GrayImage>,
}

#[derive(Debug, Clone, Copy)]
pub struct TofIntrinsics {
    pub fx: f64,
    pub fy: f64,
    pub cx: f64,
    pub cy: f64,
}

/// Projection matrices of the rectified pair plus the range-camera model.
#[derive(Debug, Clone)]
pub struct CalibrationRig {
    /// 3x4 projection onto the left rectified image, row-major.
    pub p_left: [[f64; 4]; 3],
    /// 3x4 projection onto the right rectified image, row-major.
    pub p_right: [[f64; 4]; 3],
    pub tof_intrinsics: TofIntrinsics,
    /// 4x4 rigid transform from the range-camera frame to the rig frame.
    pub t_tof_to_world: [[f64; 4]; 4],
}

impl CalibrationRig {
    /// Reads the plain-text calibration format: 44 whitespace-separated
    /// numbers — 12 for `P_left` (row-major), 12 for `P_right`, 4 for the
    /// range-camera intrinsics `fx fy cx cy`, and 16 for the 4x4 transform.
    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| Error::Read {
            path: path.into(),
            source,
        })?;
        let mut values = Vec::with_capacity(44);
        let mut last_line = 1;
        let mut last_field = 0;
        for (line_no, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("");
            for (field_no, tok) in line.split_whitespace().enumerate() {
                last_line = line_no + 1;
                last_field = field_no + 1;
                let x: f64 = tok.parse().map_err(|_| Error::Calibration {
                    path: path.into(),
                    line: last_line,
                    field: last_field,
                    reason: format!("expected a number, got {tok:?}"),
                })?;
                if !x.is_finite() {
                    return Err(Error::Calibration {
                        path: path.into(),
                        line: last_line,
                        field: last_field,
                        reason: format!("non-finite value {x}"),
                    });
                }
                values.push(x);
                if values.len() > 44 {
                    return Err(Error::Calibration {
                        path: path.into(),
                        line: last_line,
                        field: last_field,
                        reason: "more than 44 values".into(),
                    });
                }
            }
        }
        if values.len() != 44 {
            return Err(Error::Calibration {
                path: path.into(),
                line: last_line,
                field: last_field,
                reason: format!("expected 44 values, found {}", values.len()),
            });
        }

        let mat34 = |off: usize| {
            let mut m = [[0.0; 4]; 3];
            for r in 0..3 {
                for c in 0..4 {
                    m[r][c] = values[off + r * 4 + c];
                }
            }
            m
        };
        let mut t = [[0.0; 4]; 4];
        for r in 0..4 {
            for c in 0..4 {
                t[r][c] = values[28 + r * 4 + c];
            }
        }
        let rig = Self {
            p_left: mat34(0),
            p_right: mat34(12),
            tof_intrinsics: TofIntrinsics {
                fx: values[24],
                fy: values[25],
                cx: values[26],
                cy: values[27],
            },
            t_tof_to_world: t,
        };
        rig.validate(path)?;
        Ok(rig)
    }

    /// Rejects degenerate rigs: rank-deficient projections or non-positive
    /// range-camera focal lengths.
    pub fn validate(&self, path: &Path) -> Result<()> {
        let diag = |reason: String| Error::Calibration {
            path: path.into(),
            line: 0,
            field: 0,
            reason,
        };
        let positive = |x: f64| x.is_finite() && x > 0.0;
        if !positive(self.tof_intrinsics.fx) || !positive(self.tof_intrinsics.fy) {
            return Err(diag(format!(
                "range-camera focal lengths must be positive, got fx={} fy={}",
                self.tof_intrinsics.fx, self.tof_intrinsics.fy
            )));
        }
        for (name, p) in [("P_left", &self.p_left), ("P_right", &self.p_right)] {
            if matrix_rank_3x4(p) < 3 {
                return Err(diag(format!("{name} is rank-deficient")));
            }
        }
        Ok(())
    }
}

/// Row rank of a 3x4 matrix via Gaussian elimination with partial pivoting.
fn matrix_rank_3x4(m: &[[f64; 4]; 3]) -> usize {
    let mut a = *m;
    let scale = a
        .iter()
        .flatten()
        .fold(0.0f64, |acc, x| acc.max(x.abs()))
        .max(1e-300);
    let tol = scale * 1e-10;
    let mut rank = 0;
    let mut col = 0;
    while rank < 3 && col < 4 {
        let pivot = (rank..3).max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()));
        let pivot = pivot.unwrap();
        if a[pivot][col].abs() <= tol {
            col += 1;
            continue;
        }
        a.swap(rank, pivot);
        let pivot_row = a[rank];
        for row in a.iter_mut().skip(rank + 1) {
            let f = row[col] / pivot_row[col];
            for (x, p) in row[col..].iter_mut().zip(&pivot_row[col..]) {
                *x -= f * p;
            }
        }
        rank += 1;
        col += 1;
    }
    rank
}

#[inline]
fn apply_3x4(m: &[[f64; 4]; 3], x: [f64; 4]) -> [f64; 3] {
    let mut out = [0.0; 3];
    for (r, row) in m.iter().enumerate() {
        out[r] = row[0] * x[0] + row[1] * x[1] + row[2] * x[2] + row[3] * x[3];
    }
    out
}

#[inline]
fn apply_4x4(m: &[[f64; 4]; 4], x: [f64; 4]) -> [f64; 4] {
    let mut out = [0.0; 4];
    for (r, row) in m.iter().enumerate() {
        out[r] = row[0] * x[0] + row[1] * x[1] + row[2] * x[2] + row[3] * x[3];
    }
    out
}

/// Projects every valid range pixel into both rectified images.
///
/// A point is kept when both projections round to pixels inside both images,
/// the projected rows agree within one pixel, and the rounded disparity is
/// non-negative. Output is in canonical order with exact duplicates removed.
pub fn project_tof_seeds(
    tof: &TofFrame,
    calib: &CalibrationRig,
    left: &GrayImage,
    right: &GrayImage,
) -> Vec<SeedCorrespondence> {
    assert!(
        left.width() == right.width() && left.height() == right.height(),
        "rectified images must have equal size"
    );
    let (w, h) = (left.width() as i64, left.height() as i64);
    let k = &calib.tof_intrinsics;
    let mut seeds = Vec::new();

    for j in 0..tof.depth.height() {
        for i in 0..tof.depth.width() {
            let Some(z) = tof.depth.get(i, j) else {
                continue;
            };
            let z = f64::from(z);
            if !z.is_finite() || z <= 0.0 {
                continue;
            }
            let x_tof = [
                (i as f64 - k.cx) * z / k.fx,
                (j as f64 - k.cy) * z / k.fy,
                z,
                1.0,
            ];
            let x_world = apply_4x4(&calib.t_tof_to_world, x_tof);
            let hl = apply_3x4(&calib.p_left, x_world);
            let hr = apply_3x4(&calib.p_right, x_world);
            if hl[2] <= 0.0 || hr[2] <= 0.0 {
                continue;
            }
            let (ul, vl) = (hl[0] / hl[2], hl[1] / hl[2]);
            let (ur, vr) = (hr[0] / hr[2], hr[1] / hr[2]);
            if (vl - vr).abs() > 1.0 {
                continue;
            }
            let (rul, rvl) = (ul.round() as i64, vl.round() as i64);
            let (rur, rvr) = (ur.round() as i64, vr.round() as i64);
            let in_bounds =
                |u: i64, v: i64| (0..w).contains(&u) && (0..h).contains(&v);
            if !in_bounds(rul, rvl) || !in_bounds(rur, rvr) {
                continue;
            }
            if rul - rur < 0 {
                continue;
            }
            seeds.push(SeedCorrespondence::new(rul as u32, rur as u32, rvl as u32));
        }
    }
    canonicalize_seeds(&mut seeds);
    seeds
}

/// Samples a ground-truth disparity map on a regular grid anchored at the
/// origin, one seed per valid grid point. No noise is added.
pub fn simulate_tof_seeds(gt: &DisparityMap, step: usize) -> Vec<SeedCorrespondence> {
    assert!(step >= 1, "grid step must be at least 1");
    let w = gt.width() as i64;
    let mut seeds = Vec::new();
    for v in (0..gt.height()).step_by(step) {
        for u in (0..gt.width()).step_by(step) {
            let Some(d) = gt.get(u, v) else {
                continue;
            };
            let u_prime = u as i64 - f64::from(d).round() as i64;
            if (0..w).contains(&u_prime) {
                seeds.push(SeedCorrespondence::new(u as u32, u_prime as u32, v as u32));
            }
        }
    }
    // Already lexicographically ordered by construction.
    seeds
}

/// Configuration for [`refine_seeds`]. The thresholds are implementation
/// defaults, deliberately exposed rather than hard-coded.
#[derive(Debug, Clone, Copy)]
pub struct RefineParams {
    /// Seeds whose mean luminance around either endpoint falls below this
    /// are dropped as unreliable range returns.
    pub dark_threshold: f64,
    /// Two nearby seeds conflict when their disparities differ by more than
    /// this many pixels; the background one is dropped.
    pub depth_gap: i64,
    /// Neighborhood side length for both filters.
    pub window: usize,
}

impl Default for RefineParams {
    fn default() -> Self {
        Self {
            dark_threshold: 0.04,
            depth_gap: 2,
            window: 5,
        }
    }
}

/// Mean luminance over the window clipped to the image bounds.
fn clipped_mean(img: &GrayImage, u: i64, v: i64, half: i64) -> f64 {
    let (w, h) = (img.width() as i64, img.height() as i64);
    let (mut sum, mut count) = (0.0, 0u32);
    for y in (v - half).max(0)..=(v + half).min(h - 1) {
        for x in (u - half).max(0)..=(u + half).min(w - 1) {
            sum += img.get(x as usize, y as usize);
            count += 1;
        }
    }
    if count == 0 {
        0.0
    } else {
        sum / f64::from(count)
    }
}

/// Discards unreliable seeds; the output is always a subset of the input.
///
/// Pass 1 drops seeds lying in very dark regions of either image. Pass 2
/// walks the survivors in decreasing disparity order and drops any seed that
/// sits within the occupancy window of an already-retained seed whose
/// disparity is larger by more than `depth_gap` — the retained foreground
/// seed wins, the background one goes.
pub fn refine_seeds(
    seeds: &[SeedCorrespondence],
    left: &GrayImage,
    right: &GrayImage,
    params: &RefineParams,
) -> Vec<SeedCorrespondence> {
    let half = (params.window / 2) as i64;

    let bright: Vec<SeedCorrespondence> = seeds
        .iter()
        .copied()
        .filter(|s| {
            let ml = clipped_mean(left, i64::from(s.u), i64::from(s.v), half);
            let mr = clipped_mean(right, i64::from(s.u_prime), i64::from(s.v), half);
            ml >= params.dark_threshold && mr >= params.dark_threshold
        })
        .collect();

    // Foreground first: descending disparity, canonical order within ties.
    let mut order: Vec<usize> = (0..bright.len()).collect();
    order.sort_unstable_by(|&a, &b| {
        bright[b]
            .disparity()
            .cmp(&bright[a].disparity())
            .then(bright[a].key().cmp(&bright[b].key()))
    });

    let mut left_px: HashMap<(i64, i64), Vec<usize>> = HashMap::new();
    let mut right_px: HashMap<(i64, i64), Vec<usize>> = HashMap::new();
    let mut retained: Vec<usize> = Vec::with_capacity(bright.len());

    for &idx in &order {
        let s = &bright[idx];
        let (su, sup, sv) = (i64::from(s.u), i64::from(s.u_prime), i64::from(s.v));
        let mut occluded = false;
        'scan: for dv in -half..=half {
            for du in -half..=half {
                for (map, u0) in [(&left_px, su), (&right_px, sup)] {
                    if let Some(others) = map.get(&(u0 + du, sv + dv)) {
                        if others
                            .iter()
                            .any(|&o| bright[o].disparity() - s.disparity() > params.depth_gap)
                        {
                            occluded = true;
                            break 'scan;
                        }
                    }
                }
            }
        }
        if !occluded {
            left_px.entry((su, sv)).or_default().push(idx);
            right_px.entry((sup, sv)).or_default().push(idx);
            retained.push(idx);
        }
    }

    let mut out: Vec<SeedCorrespondence> = retained.into_iter().map(|i| bright[i]).collect();
    canonicalize_seeds(&mut out);
    out
}

/// Writes seeds as CSV with header `u,u_prime,v`, canonically sorted.
pub fn write_seeds_csv(seeds: &[SeedCorrespondence], path: &Path) -> Result<()> {
    let mut sorted = seeds.to_vec();
    canonicalize_seeds(&mut sorted);
    let mut text = String::from("u,u_prime,v\n");
    for s in &sorted {
        text.push_str(&format!("{},{},{}\n", s.u, s.u_prime, s.v));
    }
    std::fs::write(path, text).map_err(|source| Error::Write {
        path: path.into(),
        source,
    })
}

/// Reads a seeds CSV written by [`write_seeds_csv`].
pub fn read_seeds_csv(path: &Path) -> Result<Vec<SeedCorrespondence>> {
    let text = std::fs::read_to_string(path).map_err(|source| Error::Read {
        path: path.into(),
        source,
    })?;
    let mut lines = text.lines().enumerate();
    match lines.next() {
        Some((_, header)) if header.trim() == "u,u_prime,v" => {}
        _ => return Err(Error::format(path, "missing seeds CSV header 'u,u_prime,v'")),
    }
    let mut seeds = Vec::new();
    for (no, line) in lines {
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').map(str::trim).collect();
        if fields.len() != 3 {
            return Err(Error::format(
                path,
                format!("line {}: expected 3 fields, got {}", no + 1, fields.len()),
            ));
        }
        let parse = |f: &str| -> Result<u32> {
            f.parse().map_err(|_| {
                Error::format(path, format!("line {}: bad integer {f:?}", no + 1))
            })
        };
        seeds.push(SeedCorrespondence::new(
            parse(fields[0])?,
            parse(fields[1])?,
            parse(fields[2])?,
        ));
    }
    Ok(seeds)
}
