//! Dense prior disparity map from sparse seeds.
//!
//! The refined seeds' left-image positions are Delaunay-triangulated and the
//! seed disparities are interpolated linearly inside every triangle, giving a
//! full-resolution prior. Pixels outside the convex hull of the seeds have no
//! prior and stay invalid.

mod delaunay;

use std::collections::BTreeMap;
use std::path::Path;

use crate::error::{Error, Result};
use crate::imaging::PriorMap;
use crate::seeding::SeedCorrespondence;

pub use delaunay::MAX_COORD;

/// A triangulated seed vertex: left-image position and its disparity.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeedVertex {
    pub u: u32,
    pub v: u32,
    pub d: f64,
}

/// Delaunay triangulation over seed positions in the left image.
#[derive(Debug, Clone)]
pub struct SeedTriangulation {
    vertices: Vec<SeedVertex>,
    /// Vertex index triples, counter-clockwise, non-degenerate.
    triangles: Vec<[u32; 3]>,
    /// Convex hull vertex indices in cyclic order; the prior is valid
    /// exactly inside this polygon.
    hull: Vec<u32>,
}

impl SeedTriangulation {
    pub fn vertices(&self) -> &[SeedVertex] {
        &self.vertices
    }

    pub fn triangles(&self) -> &[[u32; 3]] {
        &self.triangles
    }

    pub fn hull(&self) -> &[u32] {
        &self.hull
    }

    /// Dumps the triangulation as OBJ-style text for debugging: one
    /// `v u v d` line per vertex, then 1-based `f i j k` faces.
    pub fn write_obj(&self, path: &Path) -> Result<()> {
        let mut text = String::new();
        for vert in &self.vertices {
            text.push_str(&format!("v {} {} {}\n", vert.u, vert.v, vert.d));
        }
        for t in &self.triangles {
            text.push_str(&format!("f {} {} {}\n", t[0] + 1, t[1] + 1, t[2] + 1));
        }
        std::fs::write(path, text).map_err(|source| Error::Write {
            path: path.into(),
            source,
        })
    }
}

/// Triangulates the seeds' left-image positions.
///
/// Seeds sharing a left pixel collapse to one vertex keeping the larger
/// disparity. Fails when fewer than three distinct positions remain or all
/// positions are collinear; the pipeline then runs with an everywhere-invalid
/// prior.
pub fn triangulate_seeds(seeds: &[SeedCorrespondence]) -> Result<SeedTriangulation> {
    let mut best: BTreeMap<(u32, u32), f64> = BTreeMap::new();
    for s in seeds {
        let d = s.disparity() as f64;
        best.entry((s.v, s.u))
            .and_modify(|old| *old = old.max(d))
            .or_insert(d);
    }
    let vertices: Vec<SeedVertex> = best
        .into_iter()
        .map(|((v, u), d)| SeedVertex { u, v, d })
        .collect();
    let points: Vec<(i64, i64)> = vertices
        .iter()
        .map(|s| (i64::from(s.u), i64::from(s.v)))
        .collect();
    let tri = delaunay::triangulate(&points)?;
    Ok(SeedTriangulation {
        vertices,
        triangles: tri.triangles,
        hull: tri.hull,
    })
}

/// Rasterizes the triangulation into a dense prior map.
///
/// Every pixel center inside or on the boundary of a triangle receives the
/// barycentric interpolation of the triangle's vertex disparities; pixels on
/// shared edges are resolved by the first covering triangle in triangle-list
/// order (the values agree up to rounding by linearity). The interpolated
/// value is clamped to the triangle's vertex range.
pub fn interpolate_prior(tri: &SeedTriangulation, width: usize, height: usize) -> PriorMap {
    let mut map = PriorMap::new_invalid(width, height);
    let verts = &tri.vertices;

    for t in &tri.triangles {
        let a = verts[t[0] as usize];
        let b = verts[t[1] as usize];
        let c = verts[t[2] as usize];
        let pa = (i64::from(a.u), i64::from(a.v));
        let pb = (i64::from(b.u), i64::from(b.v));
        let pc = (i64::from(c.u), i64::from(c.v));
        let area2 = delaunay::orient(pa, pb, pc);
        debug_assert!(area2 > 0, "degenerate or misoriented triangle");
        let inv_area = 1.0 / area2 as f64;
        let (lo, hi) = (a.d.min(b.d).min(c.d), a.d.max(b.d).max(c.d));

        let u0 = a.u.min(b.u).min(c.u) as usize;
        let u1 = (a.u.max(b.u).max(c.u) as usize).min(width.saturating_sub(1));
        let v0 = a.v.min(b.v).min(c.v) as usize;
        let v1 = (a.v.max(b.v).max(c.v) as usize).min(height.saturating_sub(1));
        for v in v0..=v1 {
            for u in u0..=u1 {
                if map.is_valid(u, v) {
                    continue;
                }
                let p = (u as i64, v as i64);
                // Exact integer edge functions: w0 + w1 + w2 == area2.
                let w0 = delaunay::orient(pb, pc, p);
                if w0 < 0 {
                    continue;
                }
                let w1 = delaunay::orient(pc, pa, p);
                if w1 < 0 {
                    continue;
                }
                let w2 = delaunay::orient(pa, pb, p);
                if w2 < 0 {
                    continue;
                }
                let val = (w0 as f64 * a.d + w1 as f64 * b.d + w2 as f64 * c.d) * inv_area;
                map.set(u, v, val.clamp(lo, hi) as f32);
            }
        }
    }
    map
}

#[cfg(test)]
mod tests {
    use super::*;

    fn seed(u: u32, d: u32, v: u32) -> SeedCorrespondence {
        SeedCorrespondence::new(u, u - d, v)
    }

    #[test]
    fn three_seeds_make_one_triangle() {
        let tri =
            triangulate_seeds(&[seed(10, 3, 0), seed(30, 5, 0), seed(10, 7, 20)]).unwrap();
        assert_eq!(tri.triangles().len(), 1);
        assert_eq!(tri.vertices().len(), 3);
    }

    #[test]
    fn duplicate_positions_keep_larger_disparity() {
        let tri = triangulate_seeds(&[
            seed(10, 3, 0),
            seed(10, 9, 0), // same left pixel, larger disparity
            seed(30, 5, 0),
            seed(10, 7, 20),
        ])
        .unwrap();
        let v = tri
            .vertices()
            .iter()
            .find(|s| (s.u, s.v) == (10, 0))
            .unwrap();
        assert_eq!(v.d, 9.0);
    }

    #[test]
    fn too_few_or_collinear_fails() {
        assert!(triangulate_seeds(&[seed(5, 1, 0), seed(9, 2, 0)]).is_err());
        let row: Vec<_> = (0..6).map(|i| seed(10 + i, 2, 7)).collect();
        assert!(triangulate_seeds(&row).is_err());
    }

    #[test]
    fn vertex_pixels_reproduce_seed_disparity() {
        let seeds = [seed(4, 3, 2), seed(60, 9, 5), seed(20, 6, 50)];
        let tri = triangulate_seeds(&seeds).unwrap();
        let prior = interpolate_prior(&tri, 64, 64);
        for s in &seeds {
            let got = prior.get(s.u as usize, s.v as usize).unwrap();
            assert!((f64::from(got) - s.disparity() as f64).abs() < 1e-6);
        }
    }

    #[test]
    fn constant_triangle_fills_constant() {
        let tri = triangulate_seeds(&[seed(10, 7, 10), seed(40, 7, 12), seed(22, 7, 40)]).unwrap();
        let prior = interpolate_prior(&tri, 64, 64);
        let mut covered = 0;
        for v in 0..64 {
            for u in 0..64 {
                if let Some(x) = prior.get(u, v) {
                    assert_eq!(x, 7.0);
                    covered += 1;
                }
            }
        }
        assert!(covered > 100);
    }

    #[test]
    fn centroid_interpolates_barycentric_mean() {
        // Triangle (0,0), (3,0), (0,3) with disparities 3, 6, 9: the centroid
        // lands on pixel (1,1) and all three barycentric weights are 1/3.
        let tri = SeedTriangulation {
            vertices: vec![
                SeedVertex { u: 0, v: 0, d: 3.0 },
                SeedVertex { u: 3, v: 0, d: 6.0 },
                SeedVertex { u: 0, v: 3, d: 9.0 },
            ],
            triangles: vec![[0, 1, 2]],
            hull: vec![0, 1, 2],
        };
        let prior = interpolate_prior(&tri, 8, 8);
        let got = prior.get(1, 1).unwrap();
        assert!((f64::from(got) - 6.0).abs() < 1e-6);
    }

    #[test]
    fn outside_hull_is_invalid() {
        let tri = triangulate_seeds(&[seed(10, 2, 10), seed(20, 2, 10), seed(10, 2, 20)]).unwrap();
        let prior = interpolate_prior(&tri, 64, 64);
        assert_eq!(prior.get(40, 40), None);
        assert_eq!(prior.get(0, 0), None);
    }

    #[test]
    fn values_bounded_by_triangle_range() {
        let tri = SeedTriangulation {
            vertices: vec![
                SeedVertex { u: 0, v: 0, d: 2.0 },
                SeedVertex { u: 17, v: 1, d: 11.0 },
                SeedVertex { u: 5, v: 19, d: 5.0 },
            ],
            triangles: vec![[0, 1, 2]],
            hull: vec![0, 1, 2],
        };
        let prior = interpolate_prior(&tri, 24, 24);
        for v in 0..24 {
            for u in 0..24 {
                if let Some(x) = prior.get(u, v) {
                    assert!((2.0..=11.0).contains(&x));
                }
            }
        }
    }

    #[test]
    fn obj_dump_format() {
        let tri = SeedTriangulation {
            vertices: vec![
                SeedVertex { u: 1, v: 2, d: 3.5 },
                SeedVertex { u: 4, v: 2, d: 4.0 },
                SeedVertex { u: 1, v: 6, d: 5.0 },
            ],
            triangles: vec![[0, 1, 2]],
            hull: vec![0, 1, 2],
        };
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("tri.obj");
        tri.write_obj(&path).unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        assert_eq!(text, "v 1 2 3.5\nv 4 2 4\nv 1 6 5\nf 1 2 3\n");
    }
}
