//! Delaunay triangulation of integer points.
//!
//! Sweep-circle construction in the style of the delaunator family:
//! points are processed by distance from the circumcenter of a small seed
//! triangle, each new point is stitched onto the advancing convex hull and
//! the affected edges are legalized by Lawson flips.
//!
//! Coordinates are integers, so the orientation and in-circle predicates are
//! evaluated exactly in `i128` — no epsilon tuning, and degenerate cocircular
//! configurations resolve deterministically from the fixed insertion order.

use crate::error::{Error, Result};

const EMPTY: usize = usize::MAX;

/// Largest permitted coordinate magnitude; keeps the 4-point in-circle
/// determinant well inside `i128`.
pub const MAX_COORD: i64 = 1 << 20;

#[derive(Debug)]
pub struct Delaunay {
    /// Vertex indices, three per triangle, counter-clockwise under
    /// [`orient`] (`orient(a, b, c) > 0`).
    pub triangles: Vec<[u32; 3]>,
    /// Convex hull vertex indices in cyclic order.
    pub hull: Vec<u32>,
}

/// Twice the signed area of `(a, b, c)`; positive when `c` lies to the left
/// of the directed line `a -> b`.
#[inline]
pub fn orient(a: (i64, i64), b: (i64, i64), c: (i64, i64)) -> i128 {
    let abx = i128::from(b.0 - a.0);
    let aby = i128::from(b.1 - a.1);
    let acx = i128::from(c.0 - a.0);
    let acy = i128::from(c.1 - a.1);
    abx * acy - aby * acx
}

/// Lifted in-circle determinant with rows `(a-p, b-p, c-p)`. For a
/// clockwise triangle `(a, b, c)` a negative value means `p` lies strictly
/// inside the circumcircle.
#[inline]
fn in_circle_det(p: (i64, i64), a: (i64, i64), b: (i64, i64), c: (i64, i64)) -> i128 {
    let dx = i128::from(a.0 - p.0);
    let dy = i128::from(a.1 - p.1);
    let ex = i128::from(b.0 - p.0);
    let ey = i128::from(b.1 - p.1);
    let fx = i128::from(c.0 - p.0);
    let fy = i128::from(c.1 - p.1);
    let ap = dx * dx + dy * dy;
    let bp = ex * ex + ey * ey;
    let cp = fx * fx + fy * fy;
    dx * (ey * cp - bp * fy) - dy * (ex * cp - bp * fx) + ap * (ex * fy - ey * fx)
}

fn circumradius_sq(a: (i64, i64), b: (i64, i64), c: (i64, i64)) -> f64 {
    let dx = (b.0 - a.0) as f64;
    let dy = (b.1 - a.1) as f64;
    let ex = (c.0 - a.0) as f64;
    let ey = (c.1 - a.1) as f64;
    let bl = dx * dx + dy * dy;
    let cl = ex * ex + ey * ey;
    let det = dx * ey - dy * ex;
    if det == 0.0 {
        return f64::MAX;
    }
    let x = (ey * bl - dy * cl) * (0.5 / det);
    let y = (dx * cl - ex * bl) * (0.5 / det);
    x * x + y * y
}

fn circumcenter(a: (i64, i64), b: (i64, i64), c: (i64, i64)) -> (f64, f64) {
    let dx = (b.0 - a.0) as f64;
    let dy = (b.1 - a.1) as f64;
    let ex = (c.0 - a.0) as f64;
    let ey = (c.1 - a.1) as f64;
    let bl = dx * dx + dy * dy;
    let cl = ex * ex + ey * ey;
    let det = dx * ey - dy * ex;
    let x = (ey * bl - dy * cl) * (0.5 / det);
    let y = (dx * cl - ex * bl) * (0.5 / det);
    (a.0 as f64 + x, a.1 as f64 + y)
}

#[inline]
fn next_halfedge(e: usize) -> usize {
    if e % 3 == 2 {
        e - 2
    } else {
        e + 1
    }
}

#[inline]
fn prev_halfedge(e: usize) -> usize {
    if e.is_multiple_of(3) {
        e + 2
    } else {
        e - 1
    }
}

struct Mesh {
    /// Vertex id each halfedge starts from; triangles stored clockwise
    /// internally (flipped to counter-clockwise on output).
    triangles: Vec<usize>,
    /// Twin halfedge of each halfedge, or `EMPTY` on the boundary.
    halfedges: Vec<usize>,
}

struct HullState {
    prev: Vec<usize>,
    next: Vec<usize>,
    /// For each hull vertex, a boundary halfedge of the triangle below it.
    tri: Vec<usize>,
    start: usize,
}

impl Mesh {
    fn link(&mut self, a: usize, b: usize) {
        let len = self.halfedges.len();
        if a == len {
            self.halfedges.push(b);
        } else {
            debug_assert!(a < len);
            self.halfedges[a] = b;
        }
        if b != EMPTY {
            let len = self.halfedges.len();
            if b == len {
                self.halfedges.push(a);
            } else {
                debug_assert!(b < len);
                self.halfedges[b] = a;
            }
        }
    }

    fn add_triangle(&mut self, i0: usize, i1: usize, i2: usize, a: usize, b: usize, c: usize) -> usize {
        let t = self.triangles.len();
        self.triangles.push(i0);
        self.triangles.push(i1);
        self.triangles.push(i2);
        self.link(t, a);
        self.link(t + 1, b);
        self.link(t + 2, c);
        t
    }

    /// Lawson legalization with an explicit stack; returns a halfedge that
    /// stays on the boundary path for hull bookkeeping.
    fn legalize(&mut self, edge: usize, points: &[(i64, i64)], hull: &mut HullState) -> usize {
        let mut stack: Vec<usize> = Vec::new();
        let mut a = edge;
        let mut ar;

        loop {
            let b = self.halfedges[a];
            ar = prev_halfedge(a);

            if b == EMPTY {
                match stack.pop() {
                    Some(e) => {
                        a = e;
                        continue;
                    }
                    None => break,
                }
            }

            let al = next_halfedge(a);
            let bl = prev_halfedge(b);

            let p0 = self.triangles[ar];
            let pr = self.triangles[a];
            let pl = self.triangles[al];
            let p1 = self.triangles[bl];

            let illegal = in_circle_det(points[p1], points[p0], points[pr], points[pl]) < 0;
            if illegal {
                self.triangles[a] = p1;
                self.triangles[b] = p0;

                let hbl = self.halfedges[bl];
                // The flipped edge may have been on the hull; repoint the
                // hull's triangle reference at the surviving halfedge.
                if hbl == EMPTY {
                    let mut e = hull.start;
                    loop {
                        if hull.tri[e] == bl {
                            hull.tri[e] = a;
                            break;
                        }
                        e = hull.prev[e];
                        if e == hull.start {
                            break;
                        }
                    }
                }

                self.link(a, hbl);
                self.link(b, self.halfedges[ar]);
                self.link(ar, bl);

                stack.push(next_halfedge(b));
            } else {
                match stack.pop() {
                    Some(e) => {
                        a = e;
                        continue;
                    }
                    None => break,
                }
            }
        }
        ar
    }
}

/// Index of the point closest to `(x, y)`, excluding indices in `skip`;
/// ties keep the smallest index.
fn closest_point(points: &[(i64, i64)], x: f64, y: f64, skip: &[usize]) -> Option<usize> {
    let mut best = None;
    let mut best_d = f64::MAX;
    for (i, p) in points.iter().enumerate() {
        if skip.contains(&i) {
            continue;
        }
        let dx = p.0 as f64 - x;
        let dy = p.1 as f64 - y;
        let d = dx * dx + dy * dy;
        if d < best_d {
            best_d = d;
            best = Some(i);
        }
    }
    best
}

/// Triangulates distinct integer points. Fails for fewer than three points,
/// collinear input, or coordinates beyond [`MAX_COORD`].
pub fn triangulate(points: &[(i64, i64)]) -> Result<Delaunay> {
    let n = points.len();
    if n < 3 {
        return Err(Error::DegenerateTriangulation(format!(
            "need at least 3 distinct seed positions, got {n}"
        )));
    }
    if let Some(p) = points
        .iter()
        .find(|p| p.0.abs() > MAX_COORD || p.1.abs() > MAX_COORD)
    {
        return Err(Error::InvalidParameter(format!(
            "seed coordinate {p:?} exceeds the supported magnitude {MAX_COORD}"
        )));
    }

    // Seed triangle: the point nearest the bounding-box center, its nearest
    // neighbor, and the point minimizing the circumradius with those two.
    let (mut min_x, mut min_y, mut max_x, mut max_y) = (i64::MAX, i64::MAX, i64::MIN, i64::MIN);
    for p in points {
        min_x = min_x.min(p.0);
        min_y = min_y.min(p.1);
        max_x = max_x.max(p.0);
        max_y = max_y.max(p.1);
    }
    let cx = (min_x + max_x) as f64 / 2.0;
    let cy = (min_y + max_y) as f64 / 2.0;

    let i0 = closest_point(points, cx, cy, &[]).unwrap();
    let i1 = closest_point(points, points[i0].0 as f64, points[i0].1 as f64, &[i0]).unwrap();

    let mut i2 = EMPTY;
    let mut min_radius = f64::MAX;
    for (i, p) in points.iter().enumerate() {
        if i == i0 || i == i1 {
            continue;
        }
        let r = circumradius_sq(points[i0], points[i1], *p);
        if r < min_radius {
            min_radius = r;
            i2 = i;
        }
    }
    if min_radius == f64::MAX {
        return Err(Error::DegenerateTriangulation(
            "all seed positions are collinear".into(),
        ));
    }
    // Store the seed clockwise, the internal orientation of the mesh.
    let (i1, i2) = if orient(points[i0], points[i1], points[i2]) > 0 {
        (i2, i1)
    } else {
        (i1, i2)
    };

    let center = circumcenter(points[i0], points[i1], points[i2]);

    // Process points by distance from the seed circumcenter; break exact
    // ties by coordinates so the result is independent of input order.
    let mut order: Vec<usize> = (0..n).collect();
    let key = |i: usize| {
        let dx = points[i].0 as f64 - center.0;
        let dy = points[i].1 as f64 - center.1;
        (dx * dx + dy * dy, points[i].0, points[i].1)
    };
    order.sort_unstable_by(|&a, &b| {
        let (da, xa, ya) = key(a);
        let (db, xb, yb) = key(b);
        da.total_cmp(&db).then(xa.cmp(&xb)).then(ya.cmp(&yb))
    });

    let mut mesh = Mesh {
        triangles: Vec::with_capacity((2 * n - 5) * 3),
        halfedges: Vec::with_capacity((2 * n - 5) * 3),
    };
    let mut hull = HullState {
        prev: vec![EMPTY; n],
        next: vec![EMPTY; n],
        tri: vec![EMPTY; n],
        start: i0,
    };

    hull.next[i0] = i1;
    hull.prev[i2] = i1;
    hull.next[i1] = i2;
    hull.prev[i0] = i2;
    hull.next[i2] = i0;
    hull.prev[i1] = i0;
    hull.tri[i0] = 0;
    hull.tri[i1] = 1;
    hull.tri[i2] = 2;

    mesh.add_triangle(i0, i1, i2, EMPTY, EMPTY, EMPTY);

    for &i in &order {
        if i == i0 || i == i1 || i == i2 {
            continue;
        }
        let p = points[i];

        // Find the first visible hull edge, walking from the last insertion
        // point. An edge e -> next[e] is visible when p lies strictly on its
        // outer side.
        let visible = |a: usize, b: usize| orient(p, points[a], points[b]) > 0;
        let scan_start = hull.start;
        let mut e = scan_start;
        let mut found = false;
        loop {
            if visible(e, hull.next[e]) {
                found = true;
                break;
            }
            e = hull.next[e];
            if e == scan_start {
                break;
            }
        }
        // Every distinct point in the processing order lies outside the
        // current hull, so a visible edge always exists.
        debug_assert!(found, "no visible hull edge for point {p:?}");
        if !found {
            continue;
        }
        let walk_back = e == scan_start;

        // First triangle from the new point onto the visible edge.
        let mut t = mesh.add_triangle(e, i, hull.next[e], EMPTY, EMPTY, hull.tri[e]);
        hull.tri[i] = mesh.legalize(t + 2, points, &mut hull);
        hull.tri[e] = t;

        // Walk forward while subsequent hull edges stay visible.
        let mut next = hull.next[e];
        loop {
            let q = hull.next[next];
            if !visible(next, q) {
                break;
            }
            t = mesh.add_triangle(next, i, q, hull.tri[i], EMPTY, hull.tri[next]);
            hull.tri[i] = mesh.legalize(t + 2, points, &mut hull);
            hull.next[next] = next; // mark removed
            next = q;
        }

        // Walk backward only if the scan began inside the visible arc.
        if walk_back {
            loop {
                let q = hull.prev[e];
                if !visible(q, e) {
                    break;
                }
                t = mesh.add_triangle(q, i, e, EMPTY, hull.tri[e], hull.tri[q]);
                mesh.legalize(t + 2, points, &mut hull);
                hull.tri[q] = t;
                hull.next[e] = e; // mark removed
                e = q;
            }
        }

        hull.prev[i] = e;
        hull.next[e] = i;
        hull.prev[next] = i;
        hull.next[i] = next;
        hull.start = e;
    }

    let mut hull_cycle = Vec::new();
    let mut e = hull.start;
    loop {
        hull_cycle.push(e as u32);
        e = hull.next[e];
        if e == hull.start {
            break;
        }
    }

    // Flip to counter-clockwise for the public contract.
    let triangles = mesh
        .triangles
        .chunks_exact(3)
        .map(|t| [t[0] as u32, t[2] as u32, t[1] as u32])
        .collect();

    Ok(Delaunay {
        triangles,
        hull: hull_cycle,
    })
}
